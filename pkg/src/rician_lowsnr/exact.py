"""Exact CSI-TR capacity: water-filling policy, the power function G and its inversion."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from rician_lowsnr.channel import ChannelSpec, pdf_gamma
from rician_lowsnr.errors import DomainError, RicianError
from rician_lowsnr.specfun import DEFAULT_CONFIG, NumericConfig, integrate_semi_infinite, solve_monotone_decreasing

log = logging.getLogger(__name__)


class Method(str, enum.Enum):
    EXACT = "exact"
    ASYMPTOTIC_REGIME = "asymptotic_regime"
    ASYMPTOTIC_SIMPLE = "asymptotic_simple"
    AWGN_LIMIT = "awgn_limit"
    ONOFF = "onoff"


@dataclass(frozen=True)
class WaterfillSolution:
    """Capacity at one SNR together with the water level that produced it.

    ``lam`` is the water-filling level λ(SNR). ``linearized`` is only set by
    the AWGN limit (its low-SNR linearization LΩ·SNR).
    """

    snr: float
    lam: float
    capacity_nats: float
    method: Method
    valid: bool = True
    linearized: float | None = None

    def __post_init__(self):
        if not self.snr > 0:
            raise DomainError(f"snr must be > 0, got {self.snr}")
        if not self.lam >= 0:
            raise DomainError(f"water level must be >= 0, got {self.lam}")
        if not self.capacity_nats >= 0:
            raise DomainError(f"capacity must be >= 0, got {self.capacity_nats}")

    @property
    def capacity_bits(self) -> float:
        return self.capacity_nats / math.log(2.0)


def waterfill_power(lam, gamma):
    """(1/λ - 1/γ)⁺. Accepts a scalar or an array of gains."""
    g = np.asarray(gamma, dtype=float)
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    if np.any(~(g > 0)):
        raise DomainError("gamma must be > 0")
    power = np.maximum(1.0 / lam - 1.0 / g, 0.0)
    return float(power) if power.ndim == 0 else power


def _check_lambda(lam):
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")


def g_function(spec: ChannelSpec, lam: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """G(λ) = E[(1/λ - 1/γ)⁺], the average power spent at water level λ."""
    _check_lambda(lam)
    inv = 1.0 / lam
    # integrand vanishes below λ, so the range starts at the kink
    return integrate_semi_infinite(
        lambda x: (inv - 1.0 / x) * pdf_gamma(spec, x),
        lam,
        cfg,
        points=spec.breakpoints(),
    )


def average_power(spec: ChannelSpec, lam: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """E[P(γ)] under the water-filling policy at level λ."""
    _check_lambda(lam)
    return integrate_semi_infinite(
        lambda x: waterfill_power(lam, x) * pdf_gamma(spec, x),
        lam,
        cfg,
        points=spec.breakpoints(),
    )


def _lambda_seed(spec: ChannelSpec, snr: float) -> float:
    """Starting point for the λ search: the simplified asymptotic level when it exists."""
    from rician_lowsnr import asymptotics

    fallback = 1.0 / (snr + 1.0 / spec.mean)
    if snr >= 1.0:
        return fallback
    try:
        seed = asymptotics.lambda_asymptotic(spec, snr, refined=False, warn=False)
    except RicianError:
        return fallback
    return seed if seed > 0 and math.isfinite(seed) else fallback


def solve_lambda(spec: ChannelSpec, snr: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """λ(SNR) such that G(λ) = SNR."""
    if not snr > 0:
        raise DomainError(f"snr must be > 0, got {snr}")
    seed = _lambda_seed(spec, snr)
    lam = solve_monotone_decreasing(lambda t: g_function(spec, t, cfg), snr, seed, cfg)
    log.debug("λ(%g) = %.12g for %s (seed %.6g)", snr, lam, spec.label(), seed)
    return lam


def capacity_from_lambda(spec: ChannelSpec, lam: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """C(λ) = ∫_λ^∞ log(x/λ) f_γ(x) dx."""
    _check_lambda(lam)
    return integrate_semi_infinite(
        lambda x: math.log(x / lam) * pdf_gamma(spec, x),
        lam,
        cfg,
        points=spec.breakpoints(),
    )


def capacity_exact(spec: ChannelSpec, snr: float, cfg: NumericConfig = DEFAULT_CONFIG) -> WaterfillSolution:
    """Ergodic capacity with full CSI, in nats per channel use."""
    lam = solve_lambda(spec, snr, cfg)
    capacity = max(capacity_from_lambda(spec, lam, cfg), 0.0)
    return WaterfillSolution(snr=snr, lam=lam, capacity_nats=capacity, method=Method.EXACT)


def capacity_constant_power(spec: ChannelSpec, snr: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """E[log(1 + SNR·γ)]: receiver CSI only, constant transmit power."""
    if not snr > 0:
        raise DomainError(f"snr must be > 0, got {snr}")
    return integrate_semi_infinite(
        lambda x: math.log1p(snr * x) * pdf_gamma(spec, x),
        0.0,
        cfg,
        points=spec.breakpoints(),
    )
