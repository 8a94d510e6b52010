"""Closed-form low-SNR capacity.

With only the leading term of the density series kept, the power constraint
reads

    SNR ≈ A · λ^(L-3) · e^(-rλ),   A = e^(-K) r^(L-2) / (L-1)!,   r = (K+L)/(LΩ)

which is solved in closed form: a logarithm for L = 3, the principal Lambert
branch for L < 3 and the lower branch for L > 3. Capacity then follows from
C ≈ SNR·λ(SNR).

The approximations drop the higher-order terms of the noncentral density, so
for K > 0 they converge to the exact curves slowly (the true tail carries an
extra e^(2√(Krx)) factor).
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass

from rician_lowsnr.channel import ChannelSpec
from rician_lowsnr.errors import DomainError, RegimeWarning, ValidityError
from rician_lowsnr.exact import Method, WaterfillSolution, capacity_constant_power, capacity_exact
from rician_lowsnr.specfun import DEFAULT_CONFIG, INV_E, NumericConfig, lambert_w0, lambert_wm1

log = logging.getLogger(__name__)

# Slope of SNR·log(1/SNR) changes sign here.
REGIME_EDGE = INV_E

# Smallest capacity used as a divisor in energy efficiency.
_CAPACITY_FLOOR = 1e-300


class Regime(str, enum.Enum):
    L_BELOW_3 = "L_below_3"
    L_EQUAL_3 = "L_equal_3"
    L_ABOVE_3 = "L_above_3"


class EnergyMode(str, enum.Enum):
    CSITR_ASYMPTOTIC = "csitr_asymptotic"
    CSITR_EXACT = "csitr_exact"
    CSIR = "csir"
    CSIR_EXACT = "csir_exact"


@dataclass(frozen=True)
class AsymptoticForm:
    regime: Regime
    refined: bool
    validity_snr_max: float | None


def regime_of(spec: ChannelSpec) -> Regime:
    if spec.L < 3:
        return Regime.L_BELOW_3
    if spec.L == 3:
        return Regime.L_EQUAL_3
    return Regime.L_ABOVE_3


def alpha_constant(spec: ChannelSpec) -> float:
    """|α| = (1/|3-L|)·(e^(-K)·r/(L-1)!)^(1/(3-L)).

    For L > 3 the printed constant carries the sign of 1/(3-L); the sign is
    applied to the Lambert argument instead, so this always returns |α|.
    """
    L = spec.L
    if L == 3:
        raise DomainError("alpha is undefined for L = 3")
    n = 3 - L
    base = math.exp(-spec.K) * spec.rate / math.factorial(L - 1)
    return base ** (1.0 / n) / abs(n)


def validity_bound(spec: ChannelSpec) -> float | None:
    """Largest SNR for which the refined λ(SNR) exists, or None if unbounded."""
    L = spec.L
    if L < 3:
        return None
    if L == 3:
        return (L + spec.K) / (2.0 * L * spec.omega) * math.exp(-spec.K)
    # W-1 needs its argument -|α|·SNR^(1/(L-3)) to stay >= -1/e
    return (INV_E / alpha_constant(spec)) ** (L - 3)


def simple_validity_bound(spec: ChannelSpec) -> float | None:
    """Largest SNR for which the simplified λ(SNR) is defined, or None if unbounded."""
    if spec.L < 3:
        return None
    if spec.L == 3:
        return 1.0
    return math.exp(-(spec.L - 3))


def asymptotic_form(spec: ChannelSpec, refined: bool) -> AsymptoticForm:
    bound = validity_bound(spec) if refined else None
    return AsymptoticForm(regime=regime_of(spec), refined=refined, validity_snr_max=bound)


def _check_snr(snr):
    if not snr > 0:
        raise DomainError(f"snr must be > 0, got {snr}")


def _warn_regime(snr: float, what: str):
    warnings.warn(
        f"{what} evaluated at SNR={snr:.4g} >= 1/e, outside the low-SNR regime",
        RegimeWarning,
        stacklevel=3,
    )


def lambda_asymptotic(spec: ChannelSpec, snr: float, refined: bool = False, warn: bool = True) -> float:
    """Low-SNR water level λ(SNR).

    ``refined`` keeps the constant of the leading-order expansion; the
    simplified form drops it, which does not change the limit.
    """
    _check_snr(snr)
    L = spec.L
    scale = spec.lambda_scale
    regime = regime_of(spec)

    if refined:
        bound = validity_bound(spec)
        if bound is not None and snr > bound:
            raise ValidityError(
                f"refined λ(SNR) for {spec.label()} is valid only for SNR <= {bound:.6g}, got {snr:.6g}",
                bound=bound,
            )
        if regime is Regime.L_EQUAL_3:
            return scale * math.log(spec.rate * math.exp(-spec.K) / (2.0 * snr))
        n = 3 - L
        arg = alpha_constant(spec) * (1.0 / snr) ** (1.0 / n)
        if regime is Regime.L_BELOW_3:
            return scale * n * lambert_w0(arg)
        return scale * n * lambert_wm1(-arg)

    bound = simple_validity_bound(spec)
    if bound is not None and snr > bound:
        raise ValidityError(
            f"simplified λ(SNR) for {spec.label()} is defined only for SNR <= {bound:.6g}, got {snr:.6g}",
            bound=bound,
        )
    if warn and snr >= REGIME_EDGE:
        _warn_regime(snr, "simplified λ(SNR)")
    if regime is Regime.L_EQUAL_3:
        return scale * math.log(1.0 / snr)
    n = 3 - L
    arg = (1.0 / snr) ** (1.0 / n)
    if regime is Regime.L_BELOW_3:
        return scale * n * lambert_w0(arg)
    return scale * n * lambert_wm1(-arg)


def capacity_asymptotic(spec: ChannelSpec, snr: float, refined: bool = False) -> WaterfillSolution:
    """Regime-dependent low-SNR capacity C ≈ SNR·λ(SNR)."""
    lam = lambda_asymptotic(spec, snr, refined=refined)
    valid = snr < REGIME_EDGE
    return WaterfillSolution(
        snr=snr,
        lam=max(lam, 0.0),
        capacity_nats=max(snr * lam, 0.0),
        method=Method.ASYMPTOTIC_REGIME,
        valid=valid,
    )


def capacity_asymptotic_simple(spec: ChannelSpec, snr: float) -> WaterfillSolution:
    """C ≈ (LΩ/(K+L))·SNR·log(1/SNR), the same formula for every L."""
    _check_snr(snr)
    if snr > 1.0:
        raise DomainError(f"SNR·log(1/SNR) is negative for SNR > 1, got {snr}")
    if snr >= REGIME_EDGE:
        _warn_regime(snr, "SNR·log(1/SNR)")
    lam = spec.lambda_scale * math.log(1.0 / snr)
    return WaterfillSolution(
        snr=snr,
        lam=lam,
        capacity_nats=snr * lam,
        method=Method.ASYMPTOTIC_SIMPLE,
        valid=snr < REGIME_EDGE,
    )


def capacity_awgn_limit(spec: ChannelSpec, snr: float) -> WaterfillSolution:
    """K → ∞: the channel becomes L-branch AWGN with gain LΩ."""
    _check_snr(snr)
    gain = spec.mean
    return WaterfillSolution(
        snr=snr,
        lam=1.0 / (snr + 1.0 / gain),
        capacity_nats=math.log1p(snr * gain),
        method=Method.AWGN_LIMIT,
        linearized=gain * snr,
    )


def capacity_large_l(spec: ChannelSpec, snr: float) -> float:
    """Linear scaling LΩ·SNR reached as L grows."""
    _check_snr(snr)
    return spec.mean * snr


def energy_efficiency(
    spec: ChannelSpec,
    snr: float,
    mode: EnergyMode | str = EnergyMode.CSITR_ASYMPTOTIC,
    cfg: NumericConfig = DEFAULT_CONFIG,
) -> float:
    """Transmit energy per information nat, normalised by the noise variance."""
    _check_snr(snr)
    mode = EnergyMode(mode)
    if mode is EnergyMode.CSIR:
        return 1.0 / spec.mean
    if mode is EnergyMode.CSITR_ASYMPTOTIC:
        if snr >= 1.0:
            raise DomainError(f"asymptotic energy efficiency needs SNR < 1, got {snr}")
        return spec.rate / math.log(1.0 / snr)
    if mode is EnergyMode.CSITR_EXACT:
        capacity = capacity_exact(spec, snr, cfg).capacity_nats
    else:
        capacity = capacity_constant_power(spec, snr, cfg)
    if capacity <= _CAPACITY_FLOOR:
        raise DomainError(f"capacity underflow at SNR={snr:.3g} ({capacity:.3g} nats)")
    return snr / capacity


def series_leading_terms(spec: ChannelSpec, lam: float, second_order: bool = False) -> tuple[float, float]:
    """Leading terms of C(λ) and SNR(λ) for large λ.

    Returns (capacity_series, snr_series). ``second_order`` adds the
    (2L-3) term of the capacity expansion.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    L, r = spec.L, spec.rate
    log_pref = -spec.K + (L - 2) * math.log(r) - math.lgamma(L) - r * lam
    capacity = math.exp(log_pref + (L - 2) * math.log(lam))
    snr = math.exp(log_pref + (L - 3) * math.log(lam))
    if second_order:
        capacity += (2 * L - 3) * math.exp(log_pref - math.log(r) + (L - 3) * math.log(lam))
    return capacity, snr
