"""Invariant suite runner: check table on the terminal, JSON report as data."""

from rician_lowsnr import config, io
from rician_lowsnr.specfun import DEFAULT_CONFIG
from rician_lowsnr.ui import console, err_console, check_table, print_banner
from rician_lowsnr.validation import ValidationReport, run_suite


def cmd_validate(level="fast", seed=config.DEFAULT_SEED, perturb_omega=1.0, cfg=DEFAULT_CONFIG, progress=None) -> tuple[ValidationReport, int]:
    """Run the suite; the exit code is EXIT_VALIDATION when any gating check fails."""
    report = run_suite(level=level, seed=seed, perturb_omega=perturb_omega, cfg=cfg, progress=progress)
    return report, config.EXIT_OK if report.passed else config.EXIT_VALIDATION


def run_validate(level="fast", seed=config.DEFAULT_SEED, perturb_omega=1.0, out=None) -> int:
    status_console = console if out is not None else err_console
    with status_console.status("[bold cyan]Validating...[/bold cyan]", spinner="dots") as status:
        report, code = cmd_validate(
            level=level,
            seed=seed,
            perturb_omega=perturb_omega,
            progress=lambda name: status.update(f"[bold cyan]Validating:[/bold cyan] {name}"),
        )
    path = io.write_report(report.to_dict(), out, f"validate {level}")

    target = console if path is not None else err_console
    print_banner(target, subtitle=f"validation · {level}")
    target.print(check_table(f"{len(report.checks)} checks in {report.elapsed_s:.1f} s", [
        {"name": c.name + (" (info)" if c.informational else ""), "passed": c.passed, "detail": c.detail}
        for c in report.checks
    ]))
    if path is not None:
        target.print(f"  [success]✓ Saved:[/success] {path}")
    if code != config.EXIT_OK:
        target.print(f"  [error]{len(report.failures)} check(s) failed[/error]")
        return code
    target.print("  [success]✓ All checks passed[/success]")
    return code
