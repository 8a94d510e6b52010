"""SNR sweep across capacity methods: request, per-row computation, emission."""

from __future__ import annotations

import logging
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from rician_lowsnr import config, io
from rician_lowsnr.asymptotics import (
    EnergyMode,
    capacity_asymptotic,
    capacity_asymptotic_simple,
    capacity_awgn_limit,
    energy_efficiency,
)
from rician_lowsnr.channel import ChannelSpec, RandomStream
from rician_lowsnr.errors import RegimeWarning, RicianError, UsageError
from rician_lowsnr.exact import capacity_exact
from rician_lowsnr.onoff import build_policy, rate, simulate_throughput_parallel
from rician_lowsnr.specfun import DEFAULT_CONFIG, NumericConfig, db_to_linear
from rician_lowsnr.ui import console, err_console, print_banner, rows_table

log = logging.getLogger(__name__)

# Columns shown in the terminal summary, in CSV order.
SUMMARY_COLUMNS = tuple(c for c in config.CSV_COLUMNS if c != "snr_linear")


@dataclass(frozen=True)
class SweepRequest:
    spec: ChannelSpec
    snr_db_start: float = config.SNR_DB_START
    snr_db_stop: float = config.SNR_DB_STOP
    snr_db_step: float = config.SNR_DB_STEP
    methods: tuple[str, ...] = ("exact", "asymptotic_regime", "asymptotic_simple", "awgn_limit", "onoff")
    seed: int = config.DEFAULT_SEED
    mc_samples: int = config.DEFAULT_MC_SAMPLES
    output_format: str = "csv"
    energy: bool = False
    label: str = ""
    cfg: NumericConfig = field(default=DEFAULT_CONFIG, compare=False)

    def __post_init__(self):
        if not self.snr_db_start < self.snr_db_stop:
            raise UsageError(f"snr-db-start ({self.snr_db_start:g}) must be below snr-db-stop ({self.snr_db_stop:g})")
        if not self.snr_db_step > 0:
            raise UsageError(f"snr-db-step must be > 0, got {self.snr_db_step:g}")
        unknown = [m for m in self.methods if m not in config.METHODS]
        if unknown or not self.methods:
            raise UsageError(f"unknown methods {unknown or '(none given)'}; choose from {', '.join(config.METHODS)}")
        if "onoff_mc" in self.methods and self.mc_samples < config.MIN_MC_SAMPLES:
            raise UsageError(f"--mc-samples must be >= {config.MIN_MC_SAMPLES} for onoff_mc, got {self.mc_samples}")
        if self.output_format not in config.OUTPUT_FORMATS:
            raise UsageError(f"format must be one of {config.OUTPUT_FORMATS}, got {self.output_format!r}")
        # canonical method order keeps rows identical however methods were listed
        object.__setattr__(self, "methods", tuple(m for m in config.METHODS if m in self.methods))


def snr_grid(req: SweepRequest) -> list[float]:
    """dB grid from start to stop inclusive (when stop lies on the grid), ascending."""
    n = int(math.floor((req.snr_db_stop - req.snr_db_start) / req.snr_db_step + 1e-9)) + 1
    return [round(req.snr_db_start + i * req.snr_db_step, 10) for i in range(n)]


def _cell(flags: list[str], method: str, fn):
    try:
        return fn()
    except RicianError as e:
        log.debug("%s failed: %s", method, e)
        flags.append(f"{method}:{type(e).__name__}")
        return None


def compute_row(req: SweepRequest, index: int, snr_db: float) -> dict:
    """One SweepRow as a dict keyed by CSV column; failures land in ``flags``."""
    spec, cfg = req.spec, req.cfg
    snr = db_to_linear(snr_db)
    row = {"snr_db": snr_db, "snr_linear": snr}
    flags: list[str] = []

    if "exact" in req.methods:
        sol = _cell(flags, "exact", lambda: capacity_exact(spec, snr, cfg))
        if sol is not None:
            row["cap_exact_npcu"] = sol.capacity_nats
            row["lambda_exact"] = sol.lam

    if "asymptotic_regime" in req.methods:
        sol = _cell(flags, "asymptotic_regime", lambda: capacity_asymptotic(spec, snr, refined=False))
        if sol is not None:
            row["cap_asym_regime_npcu"] = sol.capacity_nats
            row["lambda_asym"] = sol.lam
            if not sol.valid:
                flags.append("asymptotic_regime:outside_regime")

    if "asymptotic_simple" in req.methods:
        sol = _cell(flags, "asymptotic_simple", lambda: capacity_asymptotic_simple(spec, snr))
        if sol is not None:
            row["cap_asym_simple_npcu"] = sol.capacity_nats
            if not sol.valid:
                flags.append("asymptotic_simple:outside_regime")

    if "awgn_limit" in req.methods:
        sol = _cell(flags, "awgn_limit", lambda: capacity_awgn_limit(spec, snr))
        if sol is not None:
            row["cap_awgn_npcu"] = sol.capacity_nats

    policy = None
    if "onoff" in req.methods or "onoff_mc" in req.methods:
        policy = _cell(flags, "onoff", lambda: build_policy(spec, snr, cfg=cfg))
    if policy is not None and "onoff" in req.methods:
        row["rate_onoff_npcu"] = _cell(flags, "onoff", lambda: rate(spec, policy, cfg))
    if policy is not None and "onoff_mc" in req.methods:
        est = _cell(
            flags,
            "onoff_mc",
            lambda: simulate_throughput_parallel(spec, policy, RandomStream(req.seed, index), req.mc_samples),
        )
        if est is not None:
            row["rate_onoff_mc_npcu"] = est.rate_estimate

    if req.energy:
        cap = row.get("cap_exact_npcu")
        if cap is not None and cap > 0:
            row["ee_csitr"] = snr / cap
        elif "exact" in req.methods:
            flags.append("ee_csitr:capacity_underflow")
        row["ee_csir"] = energy_efficiency(spec, snr, EnergyMode.CSIR)

    row["flags"] = ";".join(flags)
    return row


def cmd_sweep(req: SweepRequest, max_workers: int | None = None) -> list[dict]:
    """All rows of the sweep, ordered by snr_db and normalized to the CSV schema."""
    grid = snr_grid(req)
    workers = max_workers if max_workers is not None else config.max_workers()
    log.debug("sweep %s over %d points with methods %s (workers=%s)", req.spec.label(), len(grid), req.methods, workers)
    with warnings.catch_warnings():
        # the regime condition is carried in the flags column instead
        warnings.simplefilter("ignore", RegimeWarning)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda item: compute_row(req, item[0], item[1]), enumerate(grid)))
    return io.normalize_rows(rows)


def emit(rows, fmt, out, label, bits=False):
    """Write rows to --out (file or directory) or stdout; returns the path or None."""
    if bits:
        rows = io.to_bits(rows)
    path = io.resolve_output(out, label, fmt)
    if path is None:
        sys.stdout.write(io.render_table(rows, fmt))
        sys.stdout.flush()
        return None
    return io.write_table(rows, path, fmt)


def summarize(rows, req: SweepRequest, path, bits=False, columns=SUMMARY_COLUMNS):
    """Rich summary on stdout when data went to a file, on stderr otherwise."""
    out = console if path is not None else err_console
    shown = io.to_bits(rows) if bits else rows
    unit = "bits" if bits else "nats"
    print_banner(out)
    visible = [c for c in columns if any(r.get(c) not in (None, "") for r in shown) or c in ("snr_db", "flags")]
    out.print(rows_table(f"{req.label or req.spec.label()} ({unit} per channel use)", visible, shown))
    if path is not None:
        out.print(f"  [success]✓ Saved:[/success] {path}")


def run_sweep(req: SweepRequest, out=None, bits=False) -> int:
    status_console = console if out is not None else err_console
    with status_console.status(f"[bold cyan]Sweeping {req.spec.label()}...[/bold cyan]", spinner="dots"):
        rows = cmd_sweep(req)
    path = emit(rows, req.output_format, out, req.label or req.spec.label(), bits=bits)
    summarize(rows, req, path, bits=bits)
    return config.EXIT_OK
