"""Tests for the closed-form low-SNR capacity (water level, validity bounds, limits, energy)."""

import math
import warnings

import pytest
from scipy import special

from rician_lowsnr.asymptotics import (
    REGIME_EDGE,
    EnergyMode,
    Regime,
    alpha_constant,
    asymptotic_form,
    capacity_asymptotic,
    capacity_asymptotic_simple,
    capacity_awgn_limit,
    capacity_large_l,
    energy_efficiency,
    lambda_asymptotic,
    regime_of,
    series_leading_terms,
    simple_validity_bound,
    validity_bound,
)
from rician_lowsnr.channel import ChannelSpec
from rician_lowsnr.errors import DomainError, RegimeWarning, ValidityError
from rician_lowsnr.exact import Method, capacity_exact, capacity_from_lambda, g_function, solve_lambda
from rician_lowsnr.specfun import NumericConfig


def test_regime_of_branch_count():
    assert regime_of(ChannelSpec(1, 1)) is Regime.L_BELOW_3
    assert regime_of(ChannelSpec(1, 2)) is Regime.L_BELOW_3
    assert regime_of(ChannelSpec(1, 3)) is Regime.L_EQUAL_3
    assert regime_of(ChannelSpec(1, 7)) is Regime.L_ABOVE_3


def test_alpha_constant_values():
    assert alpha_constant(ChannelSpec(0, 1)) == pytest.approx(0.5)
    assert alpha_constant(ChannelSpec(0, 2)) == pytest.approx(1.0)
    assert alpha_constant(ChannelSpec(1, 2)) == pytest.approx(1.5 * math.exp(-1.0))
    assert alpha_constant(ChannelSpec(1, 4)) == pytest.approx(6.0 * math.exp(1.0) / 1.25)


def test_alpha_constant_undefined_at_three_branches(fig1_spec):
    with pytest.raises(DomainError):
        alpha_constant(fig1_spec)


def test_validity_bounds():
    assert validity_bound(ChannelSpec(1, 3)) == pytest.approx(4.0 / 6.0 * math.exp(-1.0))
    assert validity_bound(ChannelSpec(0, 3)) == pytest.approx(0.5)
    assert validity_bound(ChannelSpec(1, 2)) is None
    assert validity_bound(ChannelSpec(1, 4)) == pytest.approx(0.02817, abs=1e-4)
    assert simple_validity_bound(ChannelSpec(1, 2)) is None
    assert simple_validity_bound(ChannelSpec(1, 3)) == 1.0
    assert simple_validity_bound(ChannelSpec(1, 5)) == pytest.approx(math.exp(-2.0))


def test_asymptotic_form_carries_bound(fig1_spec):
    form = asymptotic_form(fig1_spec, refined=True)
    assert form.regime is Regime.L_EQUAL_3
    assert form.validity_snr_max == pytest.approx(validity_bound(fig1_spec))
    assert asymptotic_form(fig1_spec, refined=False).validity_snr_max is None


# ─── Water level ──────────────────────────────────────────────


def test_lambda_refined_three_branches(fig1_spec):
    lam = lambda_asymptotic(fig1_spec, 1e-3, refined=True)
    assert lam == pytest.approx(0.75 * math.log((4.0 / 3.0) * math.exp(-1.0) / 2e-3), rel=1e-12)
    assert lam == pytest.approx(4.127, abs=2e-3)


def test_lambda_simplified_lower_branch():
    spec = ChannelSpec(1, 4)
    lam = lambda_asymptotic(spec, 1e-4)
    assert lam == pytest.approx(-0.8 * special.lambertw(-1e-4, -1).real, rel=1e-10)
    assert lam == pytest.approx(9.334, abs=0.01)


def test_lambda_simplified_principal_branch(rayleigh):
    for snr in (1e-2, 1e-6):
        expected = 2.0 * special.lambertw(snr ** -0.5, 0).real
        assert lambda_asymptotic(rayleigh, snr) == pytest.approx(expected, rel=1e-10)


def test_lambda_refined_outside_validity_raises():
    with pytest.raises(ValidityError) as exc:
        lambda_asymptotic(ChannelSpec(1, 3), 0.3, refined=True)
    assert exc.value.bound == pytest.approx(4.0 / 6.0 * math.exp(-1.0))
    with pytest.raises(ValidityError):
        lambda_asymptotic(ChannelSpec(1, 4), 0.05, refined=True)


def test_lambda_simplified_outside_definition_raises():
    with pytest.raises(ValidityError):
        lambda_asymptotic(ChannelSpec(1, 5), 0.2)


def test_lambda_simplified_principal_branch_above_unit_snr():
    spec = ChannelSpec(2, 2)
    with pytest.warns(RegimeWarning):
        lam = lambda_asymptotic(spec, 2.0)
    assert lam == pytest.approx(spec.lambda_scale * special.lambertw(0.5, 0).real, rel=1e-10)


def test_lambda_refined_and_simplified_meet_at_low_snr(rayleigh):
    gaps = []
    for snr in (1e-4, 1e-8, 1e-16):
        refined = lambda_asymptotic(rayleigh, snr, refined=True)
        simple = lambda_asymptotic(rayleigh, snr)
        gaps.append(abs(refined / simple - 1.0))
    assert gaps[0] > gaps[1] > gaps[2]


def test_lambda_refined_exact_for_two_branches_without_los():
    # K = 0, L = 2: G(λ) = e^(-λ)/λ, so the refined level is exact
    spec = ChannelSpec(0, 2)
    for snr in (1e-2, 1e-4, 1e-6):
        assert lambda_asymptotic(spec, snr, refined=True) == pytest.approx(solve_lambda(spec, snr), rel=1e-7)


def test_lambda_refined_tracks_exact_single_branch(rayleigh):
    gaps = []
    for snr in (1e-2, 1e-4, 1e-6):
        exact = solve_lambda(rayleigh, snr)
        gaps.append(abs(lambda_asymptotic(rayleigh, snr, refined=True) / exact - 1.0))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05


def test_lambda_regime_warning(fig1_spec):
    with pytest.warns(RegimeWarning):
        lambda_asymptotic(fig1_spec, 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error", RegimeWarning)
        lambda_asymptotic(fig1_spec, 0.5, warn=False)
        lambda_asymptotic(fig1_spec, 0.1)


def test_lambda_rejects_nonpositive_snr(fig1_spec):
    with pytest.raises(DomainError):
        lambda_asymptotic(fig1_spec, 0.0)


# ─── Capacities ───────────────────────────────────────────────


def test_capacity_asymptotic_three_branches(fig1_spec):
    sol = capacity_asymptotic(fig1_spec, 1e-2)
    assert sol.method is Method.ASYMPTOTIC_REGIME
    assert sol.valid
    assert sol.capacity_nats == pytest.approx(0.75 * 1e-2 * math.log(100.0), rel=1e-12)


def test_capacity_asymptotic_at_unit_snr(fig1_spec):
    with pytest.warns(RegimeWarning):
        sol = capacity_asymptotic(fig1_spec, 1.0)
    assert sol.capacity_nats == 0.0
    assert not sol.valid


def test_capacity_asymptotic_simple(fig2_spec):
    sol = capacity_asymptotic_simple(fig2_spec, 1e-3)
    assert sol.method is Method.ASYMPTOTIC_SIMPLE
    assert sol.capacity_nats == pytest.approx(0.5 * 1e-3 * math.log(1e3), rel=1e-12)
    assert sol.lam == pytest.approx(0.5 * math.log(1e3))


def test_capacity_asymptotic_simple_edges(fig2_spec):
    with pytest.warns(RegimeWarning):
        sol = capacity_asymptotic_simple(fig2_spec, 1.0)
    assert sol.capacity_nats == 0.0
    assert not sol.valid
    with pytest.raises(DomainError):
        capacity_asymptotic_simple(fig2_spec, 1.5)


def test_capacity_asymptotic_simple_below_regime_edge_is_valid(fig1_spec):
    with warnings.catch_warnings():
        warnings.simplefilter("error", RegimeWarning)
        sol = capacity_asymptotic_simple(fig1_spec, 0.9 * REGIME_EDGE)
    assert sol.valid


def test_capacity_awgn_limit(fig1_spec):
    sol = capacity_awgn_limit(fig1_spec, 1e-3)
    assert sol.method is Method.AWGN_LIMIT
    assert sol.capacity_nats == pytest.approx(math.log1p(3e-3))
    assert sol.linearized == pytest.approx(3e-3)
    assert sol.capacity_nats <= sol.linearized


def test_capacity_large_l():
    assert capacity_large_l(ChannelSpec(1, 10, 2.0), 1e-3) == pytest.approx(20.0 * 1e-3)


def test_fading_beats_awgn_at_low_snr(fig1_spec):
    # log(γ/λ) >= λ(1/λ - 1/γ) gives C >= λ·SNR
    sol = capacity_exact(fig1_spec, 1e-4)
    assert sol.capacity_nats >= sol.lam * 1e-4 * (1.0 - 1e-8)
    assert sol.capacity_nats > capacity_awgn_limit(fig1_spec, 1e-4).linearized


# ─── Energy ───────────────────────────────────────────────────


def test_energy_receiver_csi(fig2_spec):
    assert energy_efficiency(fig2_spec, 1e-3, EnergyMode.CSIR) == pytest.approx(0.5)
    assert energy_efficiency(fig2_spec, 1e-3, "csir") == pytest.approx(0.5)


def test_energy_asymptotic(fig1_spec):
    assert energy_efficiency(fig1_spec, 1e-3) == pytest.approx((4.0 / 3.0) / math.log(1e3))
    with pytest.raises(DomainError):
        energy_efficiency(fig1_spec, 1.0)


def test_energy_exact_modes(fig1_spec):
    snr = 1e-3
    exact = energy_efficiency(fig1_spec, snr, EnergyMode.CSITR_EXACT)
    assert exact == pytest.approx(snr / capacity_exact(fig1_spec, snr).capacity_nats, rel=1e-10)
    assert exact < energy_efficiency(fig1_spec, snr, EnergyMode.CSIR)
    # log(1+x) <= x keeps the constant-power energy above 1/(LΩ)
    assert energy_efficiency(fig1_spec, snr, EnergyMode.CSIR_EXACT) >= 1.0 / fig1_spec.mean


def test_energy_rejects_unknown_mode(fig1_spec):
    with pytest.raises(ValueError):
        energy_efficiency(fig1_spec, 1e-3, "bogus")


# ─── Series ───────────────────────────────────────────────────


def test_series_capacity_is_lambda_times_snr():
    for spec in (ChannelSpec(1, 3), ChannelSpec(2, 2), ChannelSpec(0.5, 6, 2.0)):
        cap, snr = series_leading_terms(spec, 7.0)
        assert cap == pytest.approx(7.0 * snr, rel=1e-12)


def test_series_converges_to_exact_without_los():
    spec = ChannelSpec(0, 3)
    tight = NumericConfig(abs_tol=0.0)
    snr_gaps, cap_gaps = [], []
    for lam in (5.0, 8.0, 12.0, 20.0):
        cap, snr = series_leading_terms(spec, lam)
        # G(λ) = e^(-λ)(1 + 2/λ)/2 in closed form here
        assert g_function(spec, lam, tight) == pytest.approx(math.exp(-lam) * (1.0 + 2.0 / lam) / 2.0, rel=1e-8)
        snr_gaps.append(abs(snr / g_function(spec, lam, tight) - 1.0))
        cap_gaps.append(abs(cap / capacity_from_lambda(spec, lam, tight) - 1.0))
    assert all(a > b for a, b in zip(snr_gaps, snr_gaps[1:]))
    assert all(a > b for a, b in zip(cap_gaps, cap_gaps[1:]))


def test_series_second_order_is_closer():
    spec = ChannelSpec(0, 3)
    tight = NumericConfig(abs_tol=0.0)
    for lam in (10.0, 20.0):
        exact = capacity_from_lambda(spec, lam, tight)
        first, _ = series_leading_terms(spec, lam)
        second, _ = series_leading_terms(spec, lam, second_order=True)
        assert abs(second - exact) < abs(first - exact)


def test_series_rejects_nonpositive_lambda(fig1_spec):
    with pytest.raises(DomainError):
        series_leading_terms(fig1_spec, 0.0)
