"""Invariant suites run by ``rician-lowsnr validate``.

Each check returns a :class:`CheckResult`; the suite collects them into a
JSON-serialisable report. ``fast`` stays analytic and quadrature-only,
``full`` widens the grids and adds the Monte Carlo checks.

Checks marked informational are reported with their metrics but do not
change the exit status.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import asdict, dataclass, field, replace
from itertools import product

import numpy as np
from scipy import stats

from rician_lowsnr import config
from rician_lowsnr.asymptotics import (
    EnergyMode,
    capacity_asymptotic_simple,
    energy_efficiency,
    lambda_asymptotic,
)
from rician_lowsnr.channel import (
    ChannelSpec,
    RandomStream,
    ccdf_gamma,
    mean_gamma,
    moment_gamma_quadrature,
    normalization_quadrature,
    pdf_gamma,
    sample_gamma,
)
from rician_lowsnr.errors import RicianError
from rician_lowsnr.exact import (
    average_power,
    capacity_constant_power,
    capacity_exact,
    capacity_from_lambda,
    g_function,
    solve_lambda,
)
from rician_lowsnr.onoff import (
    average_power_identity,
    build_policy,
    rate,
    rate_lower_bound,
    simulate_throughput_parallel,
)
from rician_lowsnr.specfun import (
    DEFAULT_CONFIG,
    INV_E,
    NumericConfig,
    bessel_i_scaled,
    lambert_w0,
    lambert_wm1,
    lower_gamma_regularized,
    upper_gamma_regularized,
)

log = logging.getLogger(__name__)

LEVELS = ("fast", "full")

# (K, L, Ω) points used by the asymptotic and on-off checks
ASYMPTOTIC_SPECS = ((1.0, 3, 1.0), (2.0, 2, 1.0), (0.0, 1, 1.0), (1.0, 4, 1.0))
ONOFF_SPECS = ((1.0, 3, 1.0), (2.0, 2, 1.0))
ONOFF_FLOOR = 0.8

_FULL_GRID = {"L": (1, 2, 3, 4, 6), "K": (0.0, 0.5, 1.0, 2.0, 5.0, 10.0), "omega": (0.5, 1.0, 2.0)}
_FAST_GRID = {"L": (1, 3, 6), "K": (0.0, 1.0, 10.0), "omega": (1.0,)}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    metrics: dict = field(default_factory=dict)
    informational: bool = False

    def __post_init__(self):
        # numpy scalars from the grids
        self.passed = bool(self.passed)
        self.informational = bool(self.informational)
        self.metrics = _plain(self.metrics)


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass
class ValidationReport:
    level: str
    seed: int
    perturb_omega: float
    checks: list[CheckResult]
    elapsed_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "seed": self.seed,
            "perturb_omega": self.perturb_omega,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": len(self.failures),
            "elapsed_s": round(self.elapsed_s, 3),
            "checks": [asdict(c) for c in self.checks],
        }


def _grid(level: str) -> list[ChannelSpec]:
    g = _FULL_GRID if level == "full" else _FAST_GRID
    return [ChannelSpec(K, L, omega) for L, K, omega in product(g["L"], g["K"], g["omega"])]


def _specs(points) -> list[ChannelSpec]:
    return [ChannelSpec(K, L, omega) for K, L, omega in points]


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def _gap_closes(ratios: list[float]) -> bool:
    gaps = [abs(r - 1.0) for r in ratios]
    return all(later < earlier for earlier, later in zip(gaps, gaps[1:]))


# ─── Special functions ────────────────────────────────────────


def check_lambert_residuals(n: int = 10_000) -> CheckResult:
    half = n // 2
    x0 = np.concatenate([-INV_E * np.geomspace(1e-10, 1.0, half), np.geomspace(1e-10, 1e10, n - half)])
    xm = -INV_E * np.geomspace(1e-12, 1.0, n)
    worst = 0.0
    for x in x0:
        w = lambert_w0(x)
        worst = max(worst, abs(w * math.exp(w) - x) / max(1.0, abs(x)))
    for x in xm:
        w = lambert_wm1(x)
        worst = max(worst, abs(w * math.exp(w) - x) / max(1.0, abs(x)))
    return CheckResult(
        "lambert_residual",
        worst <= 1e-12,
        f"max scaled residual {worst:.3g} over {2 * n} points",
        {"max_residual": worst},
    )


def check_lambert_branch_order(n: int = 1_000) -> CheckResult:
    xs = -INV_E * np.linspace(0.001, 0.999, n)
    bad = [float(x) for x in xs if not lambert_wm1(x) <= -1.0 <= lambert_w0(x)]
    return CheckResult("lambert_branch_order", not bad, f"{len(bad)} violations of W-1 <= -1 <= W0", {"violations": len(bad)})


def check_bessel_monotone() -> CheckResult:
    xs = np.geomspace(1e-6, 700.0, 2_000)
    values = [bessel_i_scaled(0, x) for x in xs]
    ok = all(b < a for a, b in zip(values, values[1:]))
    return CheckResult("bessel_scaled_decreasing", ok, "e^-x I0(x) on [1e-6, 700]")


def check_gamma_identity() -> CheckResult:
    worst = 0.0
    for s in range(1, 13):
        for x in np.geomspace(1e-6, 60.0, 200):
            total = upper_gamma_regularized(s, x) + lower_gamma_regularized(s, x)
            worst = max(worst, abs(total - 1.0))
            finite_sum = math.exp(-x) * sum(x ** k / math.factorial(k) for k in range(s))
            worst = max(worst, abs(upper_gamma_regularized(s, x) - finite_sum))
    return CheckResult("incomplete_gamma_identity", worst <= 1e-13, f"max deviation {worst:.3g}", {"max_error": worst})


# ─── Channel ──────────────────────────────────────────────────


def check_density(level: str, perturb_omega: float, cfg: NumericConfig) -> list[CheckResult]:
    worst_norm = 0.0
    worst_moment = 0.0
    worst_moment_spec = ""
    for spec in _grid(level):
        density_spec = replace(spec, omega=spec.omega * perturb_omega)
        worst_norm = max(worst_norm, abs(normalization_quadrature(density_spec, cfg) - 1.0))
        err = _rel(moment_gamma_quadrature(density_spec, cfg), mean_gamma(spec))
        if err > worst_moment:
            worst_moment, worst_moment_spec = err, spec.label()
    return [
        CheckResult("pdf_normalization", worst_norm <= 1e-8, f"max |∫f - 1| = {worst_norm:.3g}", {"max_error": worst_norm}),
        CheckResult(
            "first_moment",
            worst_moment <= 1e-6,
            f"max relative error {worst_moment:.3g} ({worst_moment_spec})",
            {"max_rel_error": worst_moment},
        ),
    ]


def check_rayleigh_reduction() -> CheckResult:
    worst = 0.0
    for L, omega in product((1, 2, 3, 6), (0.5, 1.0, 2.0)):
        spec = ChannelSpec(0.0, L, omega)
        for x in np.geomspace(1e-3, 40.0 * omega * L, 50):
            ref = stats.gamma.pdf(x, L, scale=omega)
            if ref > 1e-280:
                worst = max(worst, _rel(pdf_gamma(spec, x), ref))
    return CheckResult("rayleigh_reduction", worst <= 1e-10, f"max relative error vs Gamma(L, Ω) {worst:.3g}", {"max_rel_error": worst})


def check_noncentral_oracle() -> CheckResult:
    """pdf_gamma against scipy's noncentral chi-square after rescaling."""
    worst = 0.0
    for K, L in product((0.5, 1.0, 5.0), (1, 2, 4)):
        spec = ChannelSpec(K, L, 1.0)
        c = spec.chi2_scale
        for x in np.linspace(0.05, 4.0 * spec.mean, 40):
            ref = stats.ncx2.pdf(x / c, 2 * L, 2 * K) / c
            if ref > 1e-200:
                worst = max(worst, _rel(pdf_gamma(spec, x), ref))
    return CheckResult("noncentral_chi2_oracle", worst <= 1e-8, f"max relative error {worst:.3g}", {"max_rel_error": worst})


def check_sampler_ks(seed: int, n: int) -> CheckResult:
    specs = [ChannelSpec(K, L, om) for K, L, om in ((0, 1, 1), (1, 1, 1), (1, 3, 1), (2, 2, 1), (0.5, 4, 0.5), (5, 2, 2), (10, 6, 1), (1, 6, 2))]
    worst_p = 1.0
    for i, spec in enumerate(specs):
        draws = sample_gamma(spec, RandomStream(seed, i), n)
        c = spec.chi2_scale
        result = stats.kstest(draws / c, stats.ncx2(2 * spec.L, 2 * spec.K).cdf)
        worst_p = min(worst_p, float(result.pvalue))
    return CheckResult("sampler_ks", worst_p >= 0.01, f"smallest KS p-value {worst_p:.3g} over {len(specs)} specs", {"min_pvalue": worst_p})


# ─── Water-filling ────────────────────────────────────────────


def check_waterfill_round_trip(level: str, cfg: NumericConfig) -> list[CheckResult]:
    snrs = [10.0 ** -d for d in range(1, 6)]
    worst_g = 0.0
    worst_p = 0.0
    monotone = True
    specs = _grid(level) if level == "full" else _specs(ASYMPTOTIC_SPECS)
    for spec in specs:
        previous = math.inf
        for snr in reversed(snrs):
            lam = solve_lambda(spec, snr, cfg)
            worst_g = max(worst_g, _rel(g_function(spec, lam, cfg), snr))
            worst_p = max(worst_p, _rel(average_power(spec, lam, cfg), snr))
            monotone = monotone and lam < previous
            previous = lam
    return [
        CheckResult("lambda_round_trip", worst_g <= 1e-8, f"max |G(λ)-snr|/snr = {worst_g:.3g}", {"max_rel_error": worst_g}),
        CheckResult("power_constraint_equality", worst_p <= 1e-8, f"max |E[P]-snr|/snr = {worst_p:.3g}", {"max_rel_error": worst_p}),
        CheckResult("lambda_decreasing_in_snr", monotone, "λ(snr) strictly decreasing"),
    ]


def check_quadrature_refinement(cfg: NumericConfig, lams=(0.5, 2.0, 5.0, 10.0)) -> CheckResult:
    """C(λ) and G(λ) move by less than the tolerance when the subdivision limit doubles."""
    fine = cfg.doubled()
    worst = 0.0
    bad = []
    for spec in _specs(ASYMPTOTIC_SPECS + ((10.0, 6, 1.0),)):
        for lam in lams:
            for name, fn in (("C", capacity_from_lambda), ("G", g_function)):
                coarse_value, fine_value = fn(spec, lam, cfg), fn(spec, lam, fine)
                gap = abs(coarse_value - fine_value)
                worst = max(worst, _rel(coarse_value, fine_value))
                if gap > cfg.tolerance(fine_value):
                    bad.append(f"{name}({lam:g}) {spec.label()}")
    return CheckResult(
        "quadrature_refinement",
        not bad,
        ", ".join(bad) or f"max relative change {worst:.3g} with {fine.max_subdivisions} subdivisions",
        {"max_rel_change": worst},
    )


def check_capacity_dominance(cfg: NumericConfig) -> CheckResult:
    bad = []
    for spec in _specs(ASYMPTOTIC_SPECS):
        for snr in (1e-1, 1e-2, 1e-3):
            c_wf = capacity_exact(spec, snr, cfg).capacity_nats
            c_cp = capacity_constant_power(spec, snr, cfg)
            if c_wf < c_cp * (1.0 - 1e-8):
                bad.append(f"{spec.label()} @ {snr:g}")
    return CheckResult("waterfilling_dominates_constant_power", not bad, ", ".join(bad) or "holds on all points")


# ─── Asymptotics ──────────────────────────────────────────────


def check_simple_form_convergence(cfg: NumericConfig) -> list[CheckResult]:
    results = []
    snrs = [1e-2, 1e-4, 1e-6, 1e-8]
    for spec in _specs(ASYMPTOTIC_SPECS):
        ratios = [capacity_exact(spec, snr, cfg).capacity_nats / capacity_asymptotic_simple(spec, snr).capacity_nats for snr in snrs]
        closes = _gap_closes(ratios)
        gating = spec.K == 0.0 and spec.L < 3
        results.append(CheckResult(
            f"simple_form_convergence[{spec.label()}]",
            closes,
            "ratios " + ", ".join(f"{r:.4f}" for r in ratios) + " at snr 1e-2..1e-8",
            {"ratios": ratios, "final_gap": abs(ratios[-1] - 1.0)},
            informational=not gating,
        ))
    return results


def check_refined_vs_simple() -> CheckResult:
    worst_trend = True
    metrics = {}
    for spec in _specs(ASYMPTOTIC_SPECS):
        ratios = []
        for snr in (1e-4, 1e-8, 1e-16, 1e-32):
            ratios.append(lambda_asymptotic(spec, snr, refined=True) / lambda_asymptotic(spec, snr, refined=False))
        metrics[spec.label()] = ratios
        worst_trend = worst_trend and (_gap_closes(ratios) or all(abs(r - 1.0) < 1e-12 for r in ratios))
    return CheckResult("refined_over_simplified_lambda", worst_trend, "λ_refined/λ_simplified approaches 1", metrics)


def check_awgn_limit(cfg: NumericConfig) -> list[CheckResult]:
    spec = ChannelSpec(1e4, 3, 1.0)
    snr = 1e-3
    ratio = capacity_exact(spec, snr, cfg).capacity_nats / (spec.mean * snr)
    return [
        CheckResult("awgn_limit", abs(ratio - 1.0) <= 0.05, f"C(K=1e4)/(LΩ·snr) = {ratio:.6f}, within 5% required", {"ratio": ratio}),
        # water-filling on the residual fading still edges past the linear AWGN value
        CheckResult(
            "awgn_limit_below_linear",
            0.9 <= ratio <= 1.0,
            f"C(K=1e4)/(LΩ·snr) = {ratio:.6f} in [0.9, 1]",
            {"ratio": ratio},
            informational=True,
        ),
    ]


def check_energy_ordering(cfg: NumericConfig) -> CheckResult:
    bad = []
    for spec in _specs(ASYMPTOTIC_SPECS):
        csir = energy_efficiency(spec, 1e-3, EnergyMode.CSIR)
        csitr = energy_efficiency(spec, 1e-3, EnergyMode.CSITR_EXACT, cfg)
        if not csitr < csir:
            bad.append(f"{spec.label()}: {csitr:.4g} >= {csir:.4g}")
    return CheckResult("energy_csitr_below_csir", not bad, "; ".join(bad) or "holds at snr=1e-3")


# ─── On-off ───────────────────────────────────────────────────


def check_onoff(cfg: NumericConfig) -> list[CheckResult]:
    dominance = []
    worst_power = 0.0
    trend = {}
    for spec in _specs(ONOFF_SPECS):
        ratios = []
        for snr in (1e-2, 1e-3, 1e-4):
            policy = build_policy(spec, snr, cfg=cfg)
            r = rate(spec, policy, cfg)
            lb = rate_lower_bound(spec, policy)
            cap = capacity_exact(spec, snr, cfg).capacity_nats
            if not (lb <= r * (1.0 + 1e-10) and r <= cap * (1.0 + 1e-8)):
                dominance.append(f"{spec.label()} @ {snr:g}")
            worst_power = max(worst_power, _rel(average_power_identity(spec, policy, cfg), snr))
            ratios.append(r / cap)
        trend[spec.label()] = ratios
    increasing = all(all(b > a for a, b in zip(v, v[1:])) for v in trend.values())
    floor = min(v[-1] for v in trend.values())
    return [
        CheckResult("onoff_dominance", not dominance, ", ".join(dominance) or "lower bound <= rate <= capacity"),
        CheckResult("onoff_power_identity", worst_power <= 1e-9, f"max relative error {worst_power:.3g}", {"max_rel_error": worst_power}),
        CheckResult(
            "onoff_rate_over_capacity",
            increasing,
            "; ".join(f"{k}: " + ", ".join(f"{r:.4f}" for r in v) for k, v in trend.items()),
            {"ratios": trend},
        ),
        CheckResult(
            "onoff_rate_over_capacity_floor",
            floor >= ONOFF_FLOOR,
            f"min rate/capacity at snr=1e-4 is {floor:.4f}, >= {ONOFF_FLOOR} required",
            {"min_ratio": floor},
        ),
    ]


def check_onoff_monte_carlo(seed: int, n_slots: int, cfg: NumericConfig) -> CheckResult:
    metrics = {}
    ok = True
    for i, spec in enumerate(_specs(ONOFF_SPECS)):
        policy = build_policy(spec, 1e-2, cfg=cfg)
        est = simulate_throughput_parallel(spec, policy, RandomStream(seed, 1000 + i), n_slots)
        exact_rate = rate(spec, policy, cfg)
        ccdf = ccdf_gamma(spec, policy.threshold, cfg)
        binom_se = math.sqrt(ccdf * (1.0 - ccdf) / est.n_slots)
        z_rate = abs(est.rate_estimate - exact_rate) / est.stderr if est.stderr > 0 else math.inf
        z_active = abs(est.active_fraction - ccdf) / binom_se if binom_se > 0 else math.inf
        metrics[spec.label()] = {"z_rate": z_rate, "z_active": z_active}
        ok = ok and z_rate <= 4.0 and z_active <= 4.0
    return CheckResult("onoff_monte_carlo", ok, f"{n_slots} slots per spec, |z| <= 4 required", metrics)


# ─── Suite ────────────────────────────────────────────────────


def _guard(name: str, fn: Callable[[], CheckResult | list[CheckResult]]) -> list[CheckResult]:
    try:
        out = fn()
    except RicianError as e:
        log.warning("check %s raised %s", name, e)
        return [CheckResult(name, False, f"{type(e).__name__}: {e}")]
    return out if isinstance(out, list) else [out]


def run_suite(
    level: str = "fast",
    seed: int = config.DEFAULT_SEED,
    perturb_omega: float = 1.0,
    cfg: NumericConfig = DEFAULT_CONFIG,
    progress: Callable[[str], None] | None = None,
) -> ValidationReport:
    """Run the invariant checks for ``level`` and return the report."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    steps: list[tuple[str, Callable]] = [
        ("lambert_residual", check_lambert_residuals),
        ("lambert_branch_order", check_lambert_branch_order),
        ("bessel_scaled_decreasing", check_bessel_monotone),
        ("incomplete_gamma_identity", check_gamma_identity),
        ("density", lambda: check_density(level, perturb_omega, cfg)),
        ("rayleigh_reduction", check_rayleigh_reduction),
        ("noncentral_chi2_oracle", check_noncentral_oracle),
        ("waterfill", lambda: check_waterfill_round_trip(level, cfg)),
        ("quadrature_refinement", lambda: check_quadrature_refinement(cfg)),
        ("waterfilling_dominates_constant_power", lambda: check_capacity_dominance(cfg)),
        ("simple_form_convergence", lambda: check_simple_form_convergence(cfg)),
        ("refined_over_simplified_lambda", check_refined_vs_simple),
        ("awgn_limit", lambda: check_awgn_limit(cfg)),
        ("energy_csitr_below_csir", lambda: check_energy_ordering(cfg)),
        ("onoff", lambda: check_onoff(cfg)),
    ]
    if level == "full":
        steps += [
            ("sampler_ks", lambda: check_sampler_ks(seed, 1_000_000)),
            ("onoff_monte_carlo", lambda: check_onoff_monte_carlo(seed, 1_000_000, cfg)),
        ]

    start = time.perf_counter()
    checks: list[CheckResult] = []
    for name, fn in steps:
        if progress:
            progress(name)
        checks.extend(_guard(name, fn))
    report = ValidationReport(level, seed, perturb_omega, checks, time.perf_counter() - start)
    log.debug("validation %s: %d checks, %d failed", level, len(checks), len(report.failures))
    return report
