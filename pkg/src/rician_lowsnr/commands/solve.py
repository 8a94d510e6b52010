"""Water level λ(SNR) at one SNR, with its power residual and the asymptotic comparison."""

import logging
import warnings

from rician_lowsnr import config, io
from rician_lowsnr.asymptotics import lambda_asymptotic, validity_bound
from rician_lowsnr.channel import ChannelSpec
from rician_lowsnr.errors import RegimeWarning, RicianError, UsageError
from rician_lowsnr.exact import g_function, solve_lambda
from rician_lowsnr.specfun import DEFAULT_CONFIG, db_to_linear
from rician_lowsnr.ui import console, err_console, key_value_table, print_banner

log = logging.getLogger(__name__)

SOLVE_METHODS = ("exact", "asymptotic", "asymptotic_simple")


def _try(fn):
    try:
        return fn()
    except RicianError as e:
        log.debug("comparison skipped: %s", e)
        return None


def _gap(value, reference):
    if value is None or reference is None:
        return None
    return abs(value - reference) / reference


def cmd_solve_lambda(spec: ChannelSpec, snr_db: float, method: str = "exact", cfg=DEFAULT_CONFIG) -> dict:
    """Scalar report for ``solve-lambda``.

    For the asymptotic methods an out-of-range SNR raises ValidityError with
    the bound attached; the exact λ is still reported alongside for
    comparison.
    """
    if method not in SOLVE_METHODS:
        raise UsageError(f"method must be one of {SOLVE_METHODS}, got {method!r}")
    snr = db_to_linear(snr_db)
    bound = validity_bound(spec)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        if method == "exact":
            lam = solve_lambda(spec, snr, cfg)
            lam_exact = lam
        else:
            lam = lambda_asymptotic(spec, snr, refined=(method == "asymptotic"))
            lam_exact = _try(lambda: solve_lambda(spec, snr, cfg))
        lam_refined = _try(lambda: lambda_asymptotic(spec, snr, refined=True))
        lam_simple = _try(lambda: lambda_asymptotic(spec, snr, refined=False))

    g_value = g_function(spec, lam, cfg) if lam > 0 else None
    return {
        "spec": spec.label(),
        "method": method,
        "snr_db": snr_db,
        "snr_linear": snr,
        "lambda": lam,
        "g_at_lambda": g_value,
        "residual_rel": _gap(g_value, snr),
        "lambda_exact": lam_exact,
        "lambda_refined": lam_refined,
        "lambda_simplified": lam_simple,
        "gap_refined": _gap(lam_refined, lam_exact),
        "gap_simplified": _gap(lam_simple, lam_exact),
        "validity_bound": bound,
    }


_LABELS = {
    "lambda": "λ",
    "g_at_lambda": "G(λ)",
    "residual_rel": "|G(λ) − SNR| / SNR",
    "lambda_exact": "λ exact",
    "lambda_refined": "λ refined asymptotic",
    "lambda_simplified": "λ simplified asymptotic",
    "gap_refined": "refined gap to exact",
    "gap_simplified": "simplified gap to exact",
    "validity_bound": "refined validity bound (SNR)",
}


def run_solve(spec, snr_db, method, fmt=None, out=None) -> int:
    report = cmd_solve_lambda(spec, snr_db, method)
    path = None
    if fmt == "json":
        path = io.write_report(report, out, f"lambda {spec.label()}")
    target = err_console if fmt == "json" and path is None else console
    print_banner(target)
    rows = [("SNR", f"{snr_db:g} dB ({report['snr_linear']:.6g})"), ("method", method)]
    rows += [(label, report[key]) for key, label in _LABELS.items()]
    target.print(key_value_table(f"Water level for {spec.label()}", rows))
    if path is not None:
        target.print(f"  [success]✓ Saved:[/success] {path}")
    return config.EXIT_OK
