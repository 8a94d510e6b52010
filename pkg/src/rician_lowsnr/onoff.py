"""On-off power control driven by one feedback bit per fading block.

The transmitter stays silent while γ < λ(SNR) and otherwise sends at the
constant level SNR / Prob(γ >= λ), so the average power is met exactly.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from rician_lowsnr import config
from rician_lowsnr.asymptotics import lambda_asymptotic
from rician_lowsnr.channel import ChannelSpec, RandomStream, ccdf_gamma, draw_gamma, pdf_gamma
from rician_lowsnr.errors import DomainError
from rician_lowsnr.exact import solve_lambda
from rician_lowsnr.specfun import DEFAULT_CONFIG, NumericConfig, integrate_semi_infinite, upper_gamma_regularized

log = logging.getLogger(__name__)

_CHUNK = 1_000_000


class ThresholdSource(str, enum.Enum):
    EXACT_LAMBDA = "exact_lambda"
    ASYMPTOTIC_LAMBDA = "asymptotic_lambda"


@dataclass(frozen=True)
class OnOffPolicy:
    """Threshold λ and the power used when the feedback bit is 1.

    ``ccdf`` is Prob(γ >= threshold) as used to set ``on_power``.
    """

    threshold: float
    on_power: float
    snr: float
    ccdf: float
    source: ThresholdSource = ThresholdSource.EXACT_LAMBDA

    def power(self, gamma):
        """P(γ) for a scalar or array of gains."""
        return self.on_power * feedback_bit(gamma, self)


class ApproxChain(NamedTuple):
    rayleigh_form: float
    gamma_form: float
    tail_form: float


class ThroughputEstimate(NamedTuple):
    rate_estimate: float
    active_fraction: float
    stderr: float
    power_estimate: float
    power_stderr: float
    n_slots: int


def build_policy(
    spec: ChannelSpec,
    snr: float,
    threshold_source: ThresholdSource | str = ThresholdSource.EXACT_LAMBDA,
    cfg: NumericConfig = DEFAULT_CONFIG,
    refined: bool = True,
) -> OnOffPolicy:
    """On-off policy for the given SNR, thresholded at the water level."""
    if not snr > 0:
        raise DomainError(f"snr must be > 0, got {snr}")
    source = ThresholdSource(threshold_source)
    if source is ThresholdSource.EXACT_LAMBDA:
        threshold = solve_lambda(spec, snr, cfg)
    else:
        threshold = lambda_asymptotic(spec, snr, refined=refined)
    if not threshold > 0:
        raise DomainError(f"threshold must be > 0, got {threshold:.6g} at SNR={snr:.6g}")
    ccdf = ccdf_gamma(spec, threshold, cfg)
    if ccdf < config.CCDF_FLOOR:
        raise DomainError(f"Prob(γ >= {threshold:.6g}) underflows ({ccdf:.3g})")
    policy = OnOffPolicy(threshold=threshold, on_power=snr / ccdf, snr=snr, ccdf=ccdf, source=source)
    log.debug("on-off policy %s at SNR=%g: %s", spec.label(), snr, policy)
    return policy


def feedback_bit(gamma, policy: OnOffPolicy):
    """1 when γ >= threshold, else 0. Arrays give an int array."""
    bits = (np.asarray(gamma) >= policy.threshold).astype(int)
    return int(bits) if bits.ndim == 0 else bits


def rate(spec: ChannelSpec, policy: OnOffPolicy, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """E[log(1 + P(γ)γ)] of the on-off scheme, in nats."""
    p = policy.on_power
    return integrate_semi_infinite(
        lambda t: math.log1p(p * t) * pdf_gamma(spec, t),
        policy.threshold,
        cfg,
        points=spec.breakpoints(),
    )


def rate_lower_bound(spec: ChannelSpec, policy: OnOffPolicy) -> float:
    """log(1 + λ·P_on)·Prob(γ >= λ), obtained by replacing γ with λ in the rate."""
    return math.log1p(policy.threshold * policy.on_power) * policy.ccdf


def average_power_identity(spec: ChannelSpec, policy: OnOffPolicy, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """E[P(γ)] recomputed from a fresh tail integral; equals the policy SNR."""
    return policy.on_power * ccdf_gamma(spec, policy.threshold, cfg)


def ccdf_approx_chain(spec: ChannelSpec, threshold: float) -> ApproxChain:
    """Successive approximations of Prob(γ >= threshold) for large thresholds.

    rayleigh_form drops the line-of-sight term of the vector model,
    gamma_form is the regularized incomplete gamma at (K+1)λ/(LΩ), and
    tail_form replaces it with its large-argument behaviour.
    """
    if not threshold > 0:
        raise DomainError(f"threshold must be > 0, got {threshold}")
    L, K, omega = spec.L, spec.K, spec.omega
    rayleigh = upper_gamma_regularized(L, (1.0 + K) * threshold / omega)
    x = (K + 1.0) * threshold / (L * omega)
    gamma_form = upper_gamma_regularized(L, x)
    tail = math.exp((L - 1) * math.log(x) - x - math.lgamma(L))
    return ApproxChain(rayleigh_form=rayleigh, gamma_form=gamma_form, tail_form=tail)


def vanishing_ratio(spec: ChannelSpec, threshold: float) -> float:
    """Large-λ form of λ·SNR / Prob(γ >= λ), which tends to zero."""
    if not threshold > 0:
        raise DomainError(f"threshold must be > 0, got {threshold}")
    L, K, omega = spec.L, spec.K, spec.omega
    log_value = (
        -K
        + math.log(L * omega / (K + 1.0))
        + (L - 2) * math.log((K + L) / (K + 1.0))
        - (L - 1) * threshold / (L * omega)
        - math.log(threshold)
    )
    return math.exp(log_value)


# ─── Monte Carlo ──────────────────────────────────────────────


class _ShardSums(NamedTuple):
    n: int
    rate_sum: float
    rate_sumsq: float
    active: int


def _simulate_shard(spec: ChannelSpec, policy: OnOffPolicy, stream: RandomStream, n_slots: int) -> _ShardSums:
    gen = stream.generator()
    rate_sum = 0.0
    rate_sumsq = 0.0
    active = 0
    remaining = n_slots
    while remaining > 0:
        size = min(_CHUNK, remaining)
        gamma = draw_gamma(spec, gen, size)
        bits = feedback_bit(gamma, policy)
        per_slot = np.where(bits == 1, np.log1p(policy.on_power * gamma), 0.0)
        rate_sum += float(per_slot.sum())
        rate_sumsq += float(np.square(per_slot).sum())
        active += int(bits.sum())
        remaining -= size
    return _ShardSums(n_slots, rate_sum, rate_sumsq, active)


def _merge(parts: list[_ShardSums], policy: OnOffPolicy) -> ThroughputEstimate:
    n = sum(p.n for p in parts)
    rate_mean = sum(p.rate_sum for p in parts) / n
    rate_var = max(sum(p.rate_sumsq for p in parts) / n - rate_mean ** 2, 0.0)
    active_fraction = sum(p.active for p in parts) / n
    power_mean = policy.on_power * active_fraction
    power_stderr = policy.on_power * math.sqrt(active_fraction * (1.0 - active_fraction) / n)
    return ThroughputEstimate(
        rate_estimate=rate_mean,
        active_fraction=active_fraction,
        stderr=math.sqrt(rate_var / n),
        power_estimate=power_mean,
        power_stderr=power_stderr,
        n_slots=n,
    )


def _check_slots(n_slots):
    if int(n_slots) != n_slots or n_slots < config.MIN_MC_SAMPLES:
        raise DomainError(f"n_slots must be an integer >= {config.MIN_MC_SAMPLES}, got {n_slots!r}")


def simulate_throughput(
    spec: ChannelSpec,
    policy: OnOffPolicy,
    stream: RandomStream,
    n_slots: int,
) -> ThroughputEstimate:
    """Slot-by-slot simulation of the one-bit feedback scheme."""
    _check_slots(n_slots)
    return _merge([_simulate_shard(spec, policy, stream, int(n_slots))], policy)


def simulate_throughput_parallel(
    spec: ChannelSpec,
    policy: OnOffPolicy,
    stream: RandomStream,
    n_slots: int,
    shards: int = config.DEFAULT_SHARDS,
    max_workers: int | None = None,
) -> ThroughputEstimate:
    """simulate_throughput split over child streams and merged by slot count."""
    _check_slots(n_slots)
    if shards < 1:
        raise DomainError(f"shards must be >= 1, got {shards}")
    n_slots = int(n_slots)
    sizes = [n_slots // shards + (1 if i < n_slots % shards else 0) for i in range(shards)]
    children = stream.spawn(shards)
    jobs = [(child, size) for child, size in zip(children, sizes) if size > 0]
    workers = max_workers if max_workers is not None else config.max_workers()
    log.debug("simulating %d slots over %d shards (workers=%s)", n_slots, len(jobs), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda job: _simulate_shard(spec, policy, job[0], job[1]), jobs))
    return _merge(parts, policy)
