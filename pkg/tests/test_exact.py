"""Tests for the exact water-filling capacity (policy, power function, λ inversion)."""

import math

import numpy as np
import pytest
from scipy import special

from rician_lowsnr.channel import ChannelSpec, RandomStream, sample_gamma
from rician_lowsnr.errors import DomainError
from rician_lowsnr.exact import (
    Method,
    WaterfillSolution,
    average_power,
    capacity_constant_power,
    capacity_exact,
    capacity_from_lambda,
    g_function,
    solve_lambda,
    waterfill_power,
)

G_AT_ONE = math.exp(-1.0) - special.exp1(1.0)  # Rayleigh single branch, λ = 1


def test_waterfill_power_scalar_and_array():
    assert waterfill_power(1.0, 2.0) == pytest.approx(0.5)
    assert waterfill_power(1.0, 0.5) == 0.0
    assert waterfill_power(2.0, 2.0) == 0.0
    out = waterfill_power(0.5, np.array([0.25, 1.0, 4.0]))
    assert np.allclose(out, [0.0, 1.0, 1.75])


def test_waterfill_power_rejects_bad_inputs():
    with pytest.raises(DomainError):
        waterfill_power(0.0, 1.0)
    with pytest.raises(DomainError):
        waterfill_power(1.0, 0.0)
    with pytest.raises(DomainError):
        waterfill_power(1.0, np.array([1.0, -2.0]))


def test_g_function_rayleigh_closed_form(rayleigh):
    assert G_AT_ONE == pytest.approx(0.1484955, abs=1e-7)
    assert g_function(rayleigh, 1.0) == pytest.approx(G_AT_ONE, rel=1e-9)


def test_g_function_decreasing(fig1_spec):
    lams = [0.05, 0.2, 1.0, 3.0, 8.0, 20.0]
    values = [g_function(fig1_spec, lam) for lam in lams]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert all(v > 0 for v in values)


def test_g_function_vanishes_at_large_lambda(fig1_spec):
    assert g_function(fig1_spec, 1e6) < 1e-6 * fig1_spec.mean


def test_g_function_rejects_nonpositive_lambda(fig1_spec):
    with pytest.raises(DomainError):
        g_function(fig1_spec, 0.0)


def test_average_power_equals_g(fig2_spec):
    for lam in (0.3, 2.0, 6.0):
        assert average_power(fig2_spec, lam) == pytest.approx(g_function(fig2_spec, lam), rel=1e-9)


def test_solve_lambda_rayleigh(rayleigh):
    assert solve_lambda(rayleigh, G_AT_ONE) == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("K,L,omega", [(0.0, 1, 1.0), (1.0, 3, 1.0), (2.0, 2, 1.0), (10.0, 6, 0.5)])
@pytest.mark.parametrize("snr", [1e-5, 1e-3, 1e-1, 3.0])
def test_solve_lambda_round_trip(K, L, omega, snr):
    spec = ChannelSpec(K, L, omega)
    lam = solve_lambda(spec, snr)
    assert lam > 0
    assert g_function(spec, lam) == pytest.approx(snr, rel=1e-8)


def test_solve_lambda_decreasing_in_snr(fig1_spec):
    lams = [solve_lambda(fig1_spec, s) for s in (1e-4, 1e-3, 1e-2)]
    assert lams[0] > lams[1] > lams[2]


def test_solve_lambda_rejects_nonpositive_snr(fig1_spec):
    with pytest.raises(DomainError):
        solve_lambda(fig1_spec, 0.0)


def test_capacity_exact_rayleigh(rayleigh):
    sol = capacity_exact(rayleigh, G_AT_ONE)
    assert sol.method is Method.EXACT
    assert sol.valid
    assert sol.lam == pytest.approx(1.0, rel=1e-6)
    assert sol.capacity_nats == pytest.approx(special.exp1(1.0), rel=1e-6)
    assert sol.capacity_nats == pytest.approx(0.2193839, abs=1e-6)
    assert capacity_from_lambda(rayleigh, 1.0) == pytest.approx(special.exp1(1.0), rel=1e-9)


def test_capacity_exact_spends_the_budget(fig1_spec):
    sol = capacity_exact(fig1_spec, 1e-2)
    assert average_power(fig1_spec, sol.lam) == pytest.approx(1e-2, rel=1e-8)


def test_capacity_exact_tiny_snr(fig1_spec):
    c = capacity_exact(fig1_spec, 1e-8).capacity_nats
    assert 0.0 < c < 1e-5


def test_capacity_concave_increasing_in_snr(fig1_spec):
    snrs = np.geomspace(1e-3, 1e-1, 6)
    caps = [capacity_exact(fig1_spec, s).capacity_nats for s in snrs]
    slopes = [(c2 - c1) / (s2 - s1) for (s1, c1), (s2, c2) in zip(zip(snrs, caps), zip(snrs[1:], caps[1:]))]
    assert all(s > 0 for s in slopes)
    assert all(a >= b for a, b in zip(slopes, slopes[1:]))


def test_capacity_exact_dominates_constant_power(fig1_spec, fig2_spec):
    for spec in (fig1_spec, fig2_spec):
        for snr in (1e-3, 1e-2, 1.0):
            assert capacity_exact(spec, snr).capacity_nats >= capacity_constant_power(spec, snr)


def test_constant_power_bounded_by_jensen(fig1_spec):
    snr = 1e-2
    assert capacity_constant_power(fig1_spec, snr) <= math.log1p(snr * fig1_spec.mean)


def test_capacity_strong_los_approaches_awgn():
    spec = ChannelSpec(1e4, 3)
    c = capacity_exact(spec, 1e-3).capacity_nats
    assert c == pytest.approx(math.log1p(3e-3), rel=0.05)


# ─── Monte Carlo oracles and quadrature refinement ───────────


def _within_four_se(samples, value):
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    assert abs(samples.mean() - value) <= 4.0 * se


def test_g_function_matches_sample_average(fig1_spec):
    gamma = sample_gamma(fig1_spec, RandomStream(11, 0), 1_000_000)
    _within_four_se(waterfill_power(5.0, gamma), g_function(fig1_spec, 5.0))


def test_capacity_exact_matches_sample_average(fig1_spec):
    sol = capacity_exact(fig1_spec, 1e-2)
    gamma = sample_gamma(fig1_spec, RandomStream(11, 1), 1_000_000)
    _within_four_se(np.log1p(waterfill_power(sol.lam, gamma) * gamma), sol.capacity_nats)


@pytest.mark.parametrize("K,L,omega", [(1.0, 3, 1.0), (0.0, 1, 1.0), (2.0, 2, 0.5), (10.0, 6, 1.0)])
def test_capacity_integrand_stable_under_refinement(cfg, K, L, omega):
    spec = ChannelSpec(K, L, omega)
    fine = cfg.doubled()
    assert fine.max_subdivisions == 2 * cfg.max_subdivisions
    for lam in (0.2, 1.0, 3.0, 8.0):
        coarse_value = capacity_from_lambda(spec, lam, cfg)
        assert abs(coarse_value - capacity_from_lambda(spec, lam, fine)) <= cfg.tolerance(coarse_value)


def test_waterfill_solution_validation_and_bits():
    sol = WaterfillSolution(snr=0.1, lam=2.0, capacity_nats=math.log(2.0), method=Method.EXACT)
    assert sol.capacity_bits == pytest.approx(1.0)
    with pytest.raises(DomainError):
        WaterfillSolution(snr=0.0, lam=2.0, capacity_nats=0.1, method=Method.EXACT)
    with pytest.raises(DomainError):
        WaterfillSolution(snr=0.1, lam=-1.0, capacity_nats=0.1, method=Method.EXACT)
    with pytest.raises(DomainError):
        WaterfillSolution(snr=0.1, lam=1.0, capacity_nats=-0.1, method=Method.EXACT)
