"""Energy per information nat over an SNR grid (CSI-TR exact and asymptotic, CSI-R)."""

from rician_lowsnr import config, io
from rician_lowsnr.commands.sweep import SweepRequest, cmd_sweep, emit
from rician_lowsnr.errors import UsageError
from rician_lowsnr.ui import console, err_console, print_banner, rows_table

ENERGY_METHODS = ("exact", "asymptotic_simple")

DISPLAY_COLUMNS = ("snr_db", "ee_csitr", "ee_csitr_asym", "ee_csir", "flags")


def with_asymptotic_efficiency(rows):
    """Add ee_csitr_asym = snr / asymptotic capacity for display (not part of the CSV schema)."""
    shown = []
    for row in rows:
        new = dict(row)
        cap = row.get("cap_asym_simple_npcu")
        new["ee_csitr_asym"] = row["snr_linear"] / cap if cap else None
        shown.append(new)
    return shown


def cmd_energy(req: SweepRequest) -> list[dict]:
    if not req.energy:
        raise UsageError("energy sweep requires energy=True on the request")
    return cmd_sweep(req)


def run_energy(req: SweepRequest, out=None, bits=False) -> int:
    status_console = console if out is not None else err_console
    with status_console.status(f"[bold cyan]Energy efficiency for {req.spec.label()}...[/bold cyan]", spinner="dots"):
        rows = cmd_energy(req)
    path = emit(rows, req.output_format, out, f"energy {req.label or req.spec.label()}", bits=bits)

    target = console if path is not None else err_console
    print_banner(target)
    unit = "J per bit" if bits else "J per nat"
    shown = with_asymptotic_efficiency(rows)
    if bits:
        shown = io.to_bits(shown)
    target.print(rows_table(f"Energy efficiency, {req.spec.label()} ({unit}, noise-normalized)", DISPLAY_COLUMNS, shown))
    if path is not None:
        target.print(f"  [success]✓ Saved:[/success] {path}")
    return config.EXIT_OK
