"""Special functions and numeric kernels used by the channel and capacity modules.

Everything here is pure and stateless. Scalars in, scalars out; array work is
left to the callers that need it (sampling, sweeps).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from rician_lowsnr import config
from rician_lowsnr.errors import BracketError, DomainError, InvariantViolation, QuadratureError

log = logging.getLogger(__name__)

INV_E = math.exp(-1.0)
_EPS = float(np.finfo(float).eps)

# quad reports roundoff-limited results with ier=2; accept them when the error
# estimate is within this multiple of rel_tol.
_ACCEPT_FACTOR = 100.0


@dataclass(frozen=True)
class NumericConfig:
    """Tolerances and iteration caps for quadrature and root finding."""

    rel_tol: float = config.REL_TOL
    abs_tol: float = config.ABS_TOL
    max_iter: int = config.MAX_ITER
    max_subdivisions: int = config.MAX_SUBDIVISIONS

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be a positive integer, got {self.max_subdivisions}")

    def tolerance(self, target: float) -> float:
        """Acceptance threshold max(abs_tol, rel_tol*|target|)."""
        return max(self.abs_tol, self.rel_tol * abs(target))

    def doubled(self) -> NumericConfig:
        """Same tolerances with twice the quadrature subdivision budget."""
        return NumericConfig(self.rel_tol, self.abs_tol, self.max_iter, 2 * self.max_subdivisions)


DEFAULT_CONFIG = NumericConfig()


def _check_order(order) -> int:
    if isinstance(order, bool) or int(order) != order or order < 0:
        raise DomainError(f"order must be a nonnegative integer, got {order!r}")
    return int(order)


def db_to_linear(snr_db: float) -> float:
    """10**(dB/10)."""
    return 10.0 ** (float(snr_db) / 10.0)


def linear_to_db(snr: float) -> float:
    if not snr > 0:
        raise DomainError(f"linear SNR must be > 0, got {snr}")
    return 10.0 * math.log10(snr)


# ─── Bessel ───────────────────────────────────────────────────


def bessel_i_scaled(order: int, x: float) -> float:
    """Exponentially scaled modified Bessel function e^(-x)·I_order(x)."""
    order = _check_order(order)
    if not x >= 0:
        raise DomainError(f"x must be >= 0, got {x}")
    return float(special.ive(order, x))


def log_bessel_i(order: int, x: float) -> float:
    """log I_order(x) without overflow; -inf where I_order(x) = 0."""
    order = _check_order(order)
    if 0.0 < x < 1e-8:
        # leading series term, relative error O(x^2)
        return order * math.log(0.5 * x) - math.lgamma(order + 1)
    scaled = bessel_i_scaled(order, x)
    if scaled == 0.0:
        return -math.inf
    return math.log(scaled) + x


# ─── Lambert W ────────────────────────────────────────────────


def _halley(x: float, w: float, cfg: NumericConfig) -> float:
    """Refine w·e^w = x with Halley's method."""
    for _ in range(cfg.max_iter):
        ew = math.exp(w)
        f = w * ew - x
        w1 = w + 1.0
        if w1 == 0.0:
            break
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if abs(dw) <= 0.7e-16 * (2.0 + abs(w)):
            return w
    log.debug("Halley iteration for W(%r) hit max_iter=%d", x, cfg.max_iter)
    return w


def _branch_point_series(x: float, sign: float) -> float:
    # sign=+1 gives the principal branch, -1 the lower branch
    p = sign * math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def _check_lambert_domain(x: float) -> bool:
    """True when x sits on the branch point (within the guard band)."""
    if x < -INV_E - config.BRANCH_POINT_GUARD:
        raise DomainError(f"Lambert W is real only for x >= -1/e, got {x}")
    return x <= -INV_E


def lambert_w0(x: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """Principal branch W0(x), x >= -1/e."""
    x = float(x)
    if math.isnan(x):
        raise DomainError("Lambert W of NaN")
    if _check_lambert_domain(x):
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    if x < -0.25:
        w = _branch_point_series(x, 1.0)
    elif x < 3.0:
        w = math.log1p(x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    return _halley(x, w, cfg)


def lambert_wm1(x: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """Lower branch W-1(x), -1/e <= x < 0."""
    x = float(x)
    if math.isnan(x) or x >= 0.0:
        raise DomainError(f"W-1 is real only for -1/e <= x < 0, got {x}")
    if _check_lambert_domain(x):
        return -1.0
    if x < -0.25:
        w = _branch_point_series(x, -1.0)
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    return _halley(x, w, cfg)


# ─── Incomplete gamma ─────────────────────────────────────────


def _check_gamma_args(s, x):
    if isinstance(s, bool) or int(s) != s or s < 1:
        raise DomainError(f"s must be a positive integer, got {s!r}")
    if not x >= 0:
        raise DomainError(f"x must be >= 0, got {x}")


def upper_gamma_regularized(s: int, x: float) -> float:
    """Γ(s, x)/(s-1)! for integer s >= 1."""
    _check_gamma_args(s, x)
    return float(special.gammaincc(int(s), x))


def lower_gamma_regularized(s: int, x: float) -> float:
    """γ(s, x)/(s-1)!, the complement of upper_gamma_regularized."""
    _check_gamma_args(s, x)
    return float(special.gammainc(int(s), x))


# ─── Quadrature ───────────────────────────────────────────────


def _quad_piece(f, a, b, cfg):
    result = integrate.quad(
        f, a, b,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        full_output=1,
    )
    value, err = float(result[0]), float(result[1])
    if len(result) > 3:
        # quad only appends a message when it stopped short of the tolerance
        message = str(result[3]).strip().splitlines()[0] if result[3] else "unknown"
        accept = max(cfg.abs_tol, _ACCEPT_FACTOR * cfg.rel_tol * abs(value))
        if err > accept:
            raise QuadratureError(
                f"quadrature on [{a:.6g}, {b:.6g}] did not converge: {message}",
                estimate=value,
                error_bound=err,
            )
        log.debug("quad on [%g, %g] stopped early (%s) with acceptable err=%.3g", a, b, message, err)
    return value, err


def integrate_semi_infinite(
    f: Callable[[float], float],
    lower: float,
    cfg: NumericConfig = DEFAULT_CONFIG,
    points: Sequence[float] | None = None,
) -> float:
    """∫_lower^∞ f(x) dx by adaptive Gauss–Kronrod quadrature.

    Breakpoints in ``points`` above ``lower`` split the range into finite
    pieces; the last piece runs to infinity through QUADPACK's variable map.
    """
    lower = float(lower)
    cuts = sorted(p for p in (points or ()) if p > lower and math.isfinite(p))
    edges = [lower, *cuts]
    total = 0.0
    total_err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value, err = _quad_piece(f, a, b, cfg)
        total += value
        total_err += err
    value, err = _quad_piece(f, edges[-1], math.inf, cfg)
    total += value
    total_err += err
    log.debug("∫_%g^∞ over %d pieces = %.12g (± %.3g)", lower, len(edges), total, total_err)
    return total


def integrate_finite(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    cfg: NumericConfig = DEFAULT_CONFIG,
    points: Sequence[float] | None = None,
) -> float:
    """∫_lower^upper f(x) dx, split at interior breakpoints."""
    cuts = sorted(p for p in (points or ()) if lower < p < upper)
    edges = [float(lower), *cuts, float(upper)]
    return sum(_quad_piece(f, a, b, cfg)[0] for a, b in zip(edges[:-1], edges[1:]))


# ─── Root finding ─────────────────────────────────────────────


def solve_monotone_decreasing(
    f: Callable[[float], float],
    target: float,
    bracket_seed: float,
    cfg: NumericConfig = DEFAULT_CONFIG,
    growth: float = 2.0,
) -> float:
    """Solve f(x) = target for f strictly decreasing on (0, ∞).

    The bracket is grown geometrically from ``bracket_seed`` until it holds a
    sign change of f - target, then refined with Brent's method.
    """
    if not bracket_seed > 0:
        raise DomainError(f"bracket_seed must be > 0, got {bracket_seed}")
    if not growth > 1:
        raise DomainError(f"growth must be > 1, got {growth}")

    x = float(bracket_seed)
    fx = f(x)
    if fx == target:
        return x

    # Walk right when f is still above target, left otherwise.
    step = growth if fx > target else 1.0 / growth
    prev_x, prev_f = x, fx
    for i in range(cfg.max_iter):
        x = prev_x * step
        fx = f(x)
        if (step > 1 and fx > prev_f) or (step < 1 and fx < prev_f):
            raise InvariantViolation(
                f"function is not decreasing: f({prev_x:.6g})={prev_f:.6g}, f({x:.6g})={fx:.6g}"
            )
        if fx == target:
            return x
        if (fx - target) * (prev_f - target) < 0:
            break
        prev_x, prev_f = x, fx
    else:
        raise BracketError(
            f"no sign change after {cfg.max_iter} expansions for target {target:.6g}",
            bracket=(min(prev_x, x), max(prev_x, x)),
        )

    lo, hi = min(prev_x, x), max(prev_x, x)
    log.debug("bracket [%g, %g] after %d expansions", lo, hi, i + 1)
    root = optimize.brentq(
        lambda t: f(t) - target,
        lo,
        hi,
        xtol=max(cfg.abs_tol, 1e-300),
        rtol=4.0 * _EPS,
        maxiter=cfg.max_iter,
    )
    residual = abs(f(root) - target)
    if residual > cfg.tolerance(target):
        log.warning("root %.12g leaves residual %.3g above tolerance %.3g", root, residual, cfg.tolerance(target))
    return float(root)
