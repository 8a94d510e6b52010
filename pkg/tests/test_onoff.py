"""Tests for one-bit on-off power control (policy, rates, tail forms, simulation)."""

import math

import numpy as np
import pytest

from rician_lowsnr.asymptotics import lambda_asymptotic
from rician_lowsnr.channel import ChannelSpec, RandomStream
from rician_lowsnr.errors import DomainError, ValidityError
from rician_lowsnr.exact import capacity_exact, solve_lambda
from rician_lowsnr.onoff import (
    OnOffPolicy,
    ThresholdSource,
    average_power_identity,
    build_policy,
    ccdf_approx_chain,
    feedback_bit,
    rate,
    rate_lower_bound,
    simulate_throughput,
    simulate_throughput_parallel,
    vanishing_ratio,
)


# ─── Policy ───────────────────────────────────────────────────


def test_policy_meets_power_budget(fig1_spec):
    policy = build_policy(fig1_spec, 1e-2)
    assert policy.source is ThresholdSource.EXACT_LAMBDA
    assert policy.threshold == pytest.approx(solve_lambda(fig1_spec, 1e-2))
    assert policy.on_power > policy.snr
    assert average_power_identity(fig1_spec, policy) == pytest.approx(1e-2, rel=1e-9)


def test_policy_rayleigh_closed_form(rayleigh):
    policy = build_policy(rayleigh, 1e-3)
    assert policy.ccdf == pytest.approx(math.exp(-policy.threshold), rel=1e-8)
    assert policy.on_power == pytest.approx(1e-3 * math.exp(policy.threshold), rel=1e-8)


def test_policy_threshold_grows_as_snr_falls(fig2_spec):
    thresholds = [build_policy(fig2_spec, s).threshold for s in (1e-2, 1e-3, 1e-4)]
    assert thresholds[0] < thresholds[1] < thresholds[2]


def test_policy_asymptotic_threshold(fig1_spec):
    policy = build_policy(fig1_spec, 1e-3, threshold_source="asymptotic_lambda")
    assert policy.source is ThresholdSource.ASYMPTOTIC_LAMBDA
    assert policy.threshold == pytest.approx(lambda_asymptotic(fig1_spec, 1e-3, refined=True))
    assert average_power_identity(fig1_spec, policy) == pytest.approx(1e-3, rel=1e-9)


def test_policy_asymptotic_threshold_outside_validity(fig1_spec):
    with pytest.raises(ValidityError):
        build_policy(fig1_spec, 0.3, threshold_source=ThresholdSource.ASYMPTOTIC_LAMBDA)


def test_policy_rejects_bad_inputs(fig1_spec):
    with pytest.raises(DomainError):
        build_policy(fig1_spec, 0.0)
    with pytest.raises(ValueError):
        build_policy(fig1_spec, 1e-3, threshold_source="median")


def test_feedback_bit_boundary():
    policy = OnOffPolicy(threshold=2.0, on_power=5.0, snr=0.1, ccdf=0.02)
    assert feedback_bit(1.999, policy) == 0
    assert feedback_bit(2.0, policy) == 1
    assert feedback_bit(7.0, policy) == 1
    bits = feedback_bit(np.array([0.5, 2.0, 3.0]), policy)
    assert bits.tolist() == [0, 1, 1]
    assert policy.power(np.array([1.0, 2.5])).tolist() == [0.0, 5.0]


# ─── Rates ────────────────────────────────────────────────────


@pytest.mark.parametrize("snr", [1e-3, 1e-2])
def test_rate_between_lower_bound_and_capacity(fig1_spec, snr):
    policy = build_policy(fig1_spec, snr)
    r = rate(fig1_spec, policy)
    assert rate_lower_bound(fig1_spec, policy) < r
    assert r <= capacity_exact(fig1_spec, snr).capacity_nats


def test_rate_lower_bound_rayleigh(rayleigh):
    policy = build_policy(rayleigh, 1e-2)
    lam = policy.threshold
    expected = math.log1p(lam * 1e-2 * math.exp(lam)) * math.exp(-lam)
    assert rate_lower_bound(rayleigh, policy) == pytest.approx(expected, rel=1e-7)


def test_rate_lower_bound_approaches_lambda_snr(fig1_spec):
    ratios = []
    for snr in (1e-2, 1e-3, 1e-4):
        policy = build_policy(fig1_spec, snr)
        ratios.append(rate_lower_bound(fig1_spec, policy) / (policy.threshold * snr))
    assert all(r < 1.0 for r in ratios)
    assert ratios[0] < ratios[1] < ratios[2]


@pytest.mark.parametrize("K,L", [(1.0, 3), (2.0, 2)])
def test_rate_over_capacity_rises_toward_one(K, L):
    spec = ChannelSpec(K, L)
    ratios = []
    for snr in (1e-2, 1e-3, 1e-4):
        ratios.append(rate(spec, build_policy(spec, snr)) / capacity_exact(spec, snr).capacity_nats)
    assert ratios[0] < ratios[1] < ratios[2] <= 1.0
    assert ratios[2] >= 0.8


# ─── Tail approximations ──────────────────────────────────────


def test_approx_chain_rayleigh_all_equal(rayleigh):
    for t in (0.5, 3.0, 10.0):
        chain = ccdf_approx_chain(rayleigh, t)
        assert chain.rayleigh_form == pytest.approx(math.exp(-t), rel=1e-12)
        assert chain.gamma_form == pytest.approx(math.exp(-t), rel=1e-12)
        assert chain.tail_form == pytest.approx(math.exp(-t), rel=1e-12)


def test_approx_chain_tail_converges(fig1_spec):
    ratios = [ccdf_approx_chain(fig1_spec, t).tail_form / ccdf_approx_chain(fig1_spec, t).gamma_form
              for t in (10.0, 20.0, 40.0)]
    assert all(r < 1.0 for r in ratios)
    assert ratios[0] < ratios[1] < ratios[2]
    assert ratios[2] > 0.9


def test_approx_chain_rejects_nonpositive_threshold(fig1_spec):
    with pytest.raises(DomainError):
        ccdf_approx_chain(fig1_spec, 0.0)


def test_vanishing_ratio_decreases(fig1_spec):
    values = [vanishing_ratio(fig1_spec, t) for t in (10.0, 20.0, 40.0)]
    assert values[0] > values[1] > values[2] > 0.0


def test_vanishing_ratio_single_branch_rayleigh(rayleigh):
    assert vanishing_ratio(rayleigh, 4.0) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        vanishing_ratio(rayleigh, -1.0)


# ─── Monte Carlo ──────────────────────────────────────────────


def test_simulation_rejects_small_or_fractional_slot_counts(fig1_spec):
    policy = build_policy(fig1_spec, 1e-2)
    with pytest.raises(DomainError):
        simulate_throughput(fig1_spec, policy, RandomStream(1), 100)
    with pytest.raises(DomainError):
        simulate_throughput(fig1_spec, policy, RandomStream(1), 20_000.5)
    with pytest.raises(DomainError):
        simulate_throughput_parallel(fig1_spec, policy, RandomStream(1), 20_000, shards=0)


def test_simulation_matches_quadrature(fig1_spec):
    policy = build_policy(fig1_spec, 1e-2)
    est = simulate_throughput(fig1_spec, policy, RandomStream(2024), 200_000)
    assert est.n_slots == 200_000
    assert abs(est.rate_estimate - rate(fig1_spec, policy)) < 4 * est.stderr
    assert abs(est.power_estimate - 1e-2) < 4 * est.power_stderr
    active_se = math.sqrt(policy.ccdf * (1 - policy.ccdf) / est.n_slots)
    assert abs(est.active_fraction - policy.ccdf) < 4 * active_se


def test_simulation_reproducible(fig2_spec):
    policy = build_policy(fig2_spec, 1e-2)
    a = simulate_throughput(fig2_spec, policy, RandomStream(5), 20_000)
    b = simulate_throughput(fig2_spec, policy, RandomStream(5), 20_000)
    assert a == b


def test_parallel_simulation_reproducible_and_consistent(fig2_spec):
    policy = build_policy(fig2_spec, 1e-2)
    a = simulate_throughput_parallel(fig2_spec, policy, RandomStream(9), 100_003, shards=4)
    b = simulate_throughput_parallel(fig2_spec, policy, RandomStream(9), 100_003, shards=4, max_workers=1)
    assert a == b
    assert a.n_slots == 100_003
    assert abs(a.rate_estimate - rate(fig2_spec, policy)) < 4 * a.stderr


@pytest.mark.slow
def test_parallel_simulation_million_slots(fig1_spec):
    policy = build_policy(fig1_spec, 1e-3)
    est = simulate_throughput_parallel(fig1_spec, policy, RandomStream(31), 1_000_000)
    assert abs(est.rate_estimate - rate(fig1_spec, policy)) < 4 * est.stderr
    assert abs(est.power_estimate - 1e-3) < 4 * est.power_stderr
