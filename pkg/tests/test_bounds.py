"""Regulator moment bounds, sigma series with certified truncation, sequences."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glsreg.bounds import (
    SERIES_TERM_CAP,
    MomentEnvelope,
    generalized_bound,
    generalized_generating,
    regulator_lp_bound,
    regulator_norm_bound,
    sigma_function,
    sigma_interval,
    tchebychev_tail_sum_bound,
    tchebychev_term_bound,
)
from glsreg.errors import (
    ConfigError,
    Divergent,
    DomainError,
    InvalidEpsilon,
    InvalidExponent,
    ToleranceUnreachable,
)
from glsreg.generating import PowerRoot, Tabulated, evaluate, natural_function
from glsreg.moments import constant_moments, gls_norm, std_exponential_moments
from glsreg.sequences import (
    DecaySequencePair,
    GeometricSequence,
    PowerLogSequence,
    SlowlyVaryingSequence,
    pair_from_config,
    sequence_from_config,
)


def constant_envelope(level: float, alpha: float = 1.0, index_start: int = 1) -> MomentEnvelope:
    psi = Tabulated(points=((1.0, level), (1000.0, level)))
    return MomentEnvelope(envelope=psi, alpha=alpha, index_start=index_start)


class TestRegulatorLpBound:
    def test_frozen_value(self):
        # K = 3, eps = 5/8, p = 3: 3 * (15/8 - 1)^(-1/3) = 3 * (7/8)^(-1/3)
        env = constant_envelope(3.0)
        assert regulator_lp_bound(env, 0.625, 3.0) == pytest.approx(3.136547751448261, rel=1e-12)

    def test_exponential_envelope_values(self):
        env = MomentEnvelope(envelope=natural_function(std_exponential_moments()), alpha=1.0, index_start=2)
        # Gamma(p+1)^(1/p) (p/2 - 1)^(-1/p) at p = 4
        assert regulator_lp_bound(env, 0.5, 4.0) == pytest.approx(2.213363839400643, rel=1e-12)
        assert regulator_lp_bound(env, 0.5, 2.5) == pytest.approx(2.814844964752713, rel=1e-12)

    def test_blows_up_at_threshold(self):
        env = constant_envelope(1.0)
        assert regulator_lp_bound(env, 0.5, 2.0 + 1e-12) > 1e6

    def test_exponent_guard(self):
        env = constant_envelope(1.0)
        with pytest.raises(InvalidExponent):
            regulator_lp_bound(env, 0.5, 2.0)

    def test_eps_guard(self):
        env = constant_envelope(1.0, alpha=0.4)
        with pytest.raises(InvalidEpsilon):
            regulator_lp_bound(env, 0.5, 10.0)
        with pytest.raises(InvalidEpsilon):
            regulator_lp_bound(constant_envelope(1.0), 0.0, 10.0)

    def test_envelope_validation(self):
        with pytest.raises(DomainError):
            constant_envelope(1.0, alpha=0.0)
        with pytest.raises(DomainError):
            constant_envelope(1.0, index_start=0)


class TestRegulatorNormBound:
    def test_returns_unit_bound_against_composite_weight(self):
        env = constant_envelope(2.0)
        psi, level = regulator_norm_bound(env, 0.5)
        assert level == 1.0
        # composite = envelope * (p eps - 1)^(-1/p); check one value
        assert evaluate(psi, 4.0) == pytest.approx(2.0 * 1.0, rel=1e-12)

    def test_norm_of_scaled_curve_respects_bound(self):
        # a curve sitting at half the envelope has composite norm <= 1
        env = constant_envelope(2.0)
        psi, level = regulator_norm_bound(env, 0.5)
        m = constant_moments(1.0)
        assert gls_norm(m, psi) <= level + 1e-12


class TestGeometricSigma:
    def test_spec_example(self):
        pair = DecaySequencePair(GeometricSequence(q=0.25), GeometricSequence(q=0.5))
        assert pair.delta == 0.5
        assert sigma_function(pair, 1.0) == pytest.approx(2.0, rel=1e-12)

    def test_closed_form_general(self):
        pair = DecaySequencePair(GeometricSequence(q=0.3), GeometricSequence(q=0.6))
        for p in (1.0, 2.0, 5.0):
            assert sigma_function(pair, p) == pytest.approx((1.0 - 0.5**p) ** (-1.0 / p), rel=1e-12)

    def test_series_matches_closed_form(self):
        pair = DecaySequencePair(GeometricSequence(q=0.45), GeometricSequence(q=0.5))
        for p in (1.0, 2.0, 5.0):
            closed = sigma_function(pair, p)
            series = sigma_function(pair, p, rel_tol=1e-9, force_series=True)
            assert series == pytest.approx(closed, rel=1e-9)

    def test_scales_carry_through(self):
        # eps_n = 3 q^n against beta_n = Q^n multiplies sigma by 3
        base = DecaySequencePair(GeometricSequence(q=0.25), GeometricSequence(q=0.5))
        scaled = DecaySequencePair(GeometricSequence(q=0.25, scale=3.0), GeometricSequence(q=0.5))
        assert sigma_function(scaled, 2.0) == pytest.approx(3.0 * sigma_function(base, 2.0), rel=1e-12)

    def test_uniform_cap(self):
        for delta in (0.1, 0.5, 0.9):
            pair = DecaySequencePair(GeometricSequence(q=0.5 * delta), GeometricSequence(q=0.5))
            for p in (1.0, 2.0, 5.0):
                assert sigma_function(pair, p) <= 1.0 / (1.0 - delta) + 1e-12


class TestPowerLogSigma:
    def test_zeta_oracle(self):
        # ratio n^(-1/2), p = 4: sum n^(-2) = zeta(2); frozen value
        pair = DecaySequencePair(PowerLogSequence(rate=1.0), PowerLogSequence(rate=0.5))
        assert sigma_function(pair, 4.0, rel_tol=1e-8) == pytest.approx(1.1324971656480405, rel=1e-7)

    def test_brute_force_agreement(self):
        pair = DecaySequencePair(PowerLogSequence(rate=2.0), PowerLogSequence(rate=0.5))
        n = np.arange(1.0, 2_000_000.0)
        brute = float(np.sum((n**-1.5) ** 3.0) ** (1.0 / 3.0))
        assert sigma_function(pair, 3.0, rel_tol=1e-6) == pytest.approx(brute, rel=1e-5)

    def test_log_correction_brute_force(self):
        # ratio n^(-1) ln(n+1): converges for p = 3 despite the log growth
        pair = DecaySequencePair(PowerLogSequence(rate=1.5, log_power=1.0), PowerLogSequence(rate=0.5))
        n = np.arange(1.0, 3_000_000.0)
        brute = float(np.sum((n**-1.0 * np.log(n + 1.0)) ** 3.0) ** (1.0 / 3.0))
        assert sigma_function(pair, 3.0, rel_tol=1e-6) == pytest.approx(brute, rel=1e-4)

    def test_divergent_below_threshold(self):
        pair = DecaySequencePair(PowerLogSequence(rate=1.0), PowerLogSequence(rate=0.5))
        with pytest.raises(Divergent):
            sigma_function(pair, 1.5)

    def test_divergent_boundary_with_log(self):
        # p * gamma = 1 and p * mu = 0 >= -1: harmonic-like, diverges
        pair = DecaySequencePair(PowerLogSequence(rate=1.0), PowerLogSequence(rate=0.5))
        with pytest.raises(Divergent):
            sigma_function(pair, 2.0)

    def test_boundary_converges_with_strong_log_decay(self):
        # p * gamma = 1, p * mu = -2 < -1: sum n^(-1) ln(n+1)^(-2) converges
        pair = DecaySequencePair(
            PowerLogSequence(rate=1.0, log_power=-1.0), PowerLogSequence(rate=0.5)
        )
        value = sigma_function(pair, 2.0, rel_tol=0.05)
        n = np.arange(1.0, 5_000_000.0)
        brute = float(np.sum(n**-1.0 * np.log(n + 1.0) ** -2.0) ** 0.5)
        # 1/ln(N) remainder: both estimates sit a little below the limit
        assert value == pytest.approx(brute, rel=0.05)

    def test_boundary_tight_tolerance_unreachable(self):
        # the 1/ln(N) remainder cannot certify 1e-4 within the term cap
        pair = DecaySequencePair(
            PowerLogSequence(rate=1.0, log_power=-1.0), PowerLogSequence(rate=0.5)
        )
        with pytest.raises(ToleranceUnreachable):
            sigma_function(pair, 2.0, rel_tol=1e-4)

    def test_tolerance_cap(self):
        # p gamma - 1 = 1e-3 needs ~1e9000 terms at 1e-9: unreachable
        pair = DecaySequencePair(PowerLogSequence(rate=1.0), PowerLogSequence(rate=0.5))
        with pytest.raises(ToleranceUnreachable):
            sigma_function(pair, 2.002, rel_tol=1e-9)

    def test_slowly_varying_constant_table_scales_sigma(self):
        plain = DecaySequencePair(PowerLogSequence(rate=2.0), PowerLogSequence(rate=0.5))
        tabled = DecaySequencePair(
            SlowlyVaryingSequence(rate=2.0, table=(2.0, 2.0)), PowerLogSequence(rate=0.5)
        )
        # constant table means every ratio term doubles, so sigma doubles
        assert sigma_function(tabled, 4.0, rel_tol=1e-8) == pytest.approx(
            2.0 * sigma_function(plain, 4.0, rel_tol=1e-8), rel=1e-9
        )


class TestSigmaValidation:
    def test_p_below_one_rejected(self):
        pair = DecaySequencePair(GeometricSequence(q=0.25), GeometricSequence(q=0.5))
        with pytest.raises(DomainError):
            sigma_function(pair, 0.5)

    def test_rel_tol_range(self):
        pair = DecaySequencePair(GeometricSequence(q=0.25), GeometricSequence(q=0.5))
        with pytest.raises(DomainError):
            sigma_function(pair, 1.0, rel_tol=0.0)
        with pytest.raises(DomainError):
            sigma_function(pair, 1.0, rel_tol=1.5)


class TestSigmaInterval:
    def test_geometric_always_from_one(self):
        pair = DecaySequencePair(GeometricSequence(q=0.25), GeometricSequence(q=0.5))
        iv = sigma_interval(pair)
        assert iv.lower == 1.0 and not iv.lower_open and iv.upper == math.inf

    def test_power_pair_opens_at_reciprocal_rate(self):
        pair = DecaySequencePair(PowerLogSequence(rate=1.0), PowerLogSequence(rate=0.5))
        iv = sigma_interval(pair)
        assert iv.lower == 2.0 and iv.lower_open

    def test_fast_power_decay_covers_everything(self):
        pair = DecaySequencePair(PowerLogSequence(rate=3.0), PowerLogSequence(rate=0.5))
        iv = sigma_interval(pair)
        assert iv.lower == 1.0 and not iv.lower_open


class TestGeneralized:
    def test_bound_is_product(self):
        pair = DecaySequencePair(GeometricSequence(q=0.25), GeometricSequence(q=0.5))
        psi = PowerRoot(m=2.0)
        p = 3.0
        expect = evaluate(psi, p) * sigma_function(pair, p)
        assert generalized_bound(psi, pair, p) == pytest.approx(expect, rel=1e-12)

    def test_generating_matches_bound_on_grid(self):
        pair = DecaySequencePair(GeometricSequence(q=0.25), GeometricSequence(q=0.5))
        psi = PowerRoot(m=2.0)
        combined = generalized_generating(psi, pair)
        for p in (1.0, 2.0, 6.0):
            assert evaluate(combined, p) == pytest.approx(generalized_bound(psi, pair, p), rel=1e-9)


class TestTchebychev:
    def test_term_bound_is_probability(self):
        env = constant_envelope(1.0)
        for n in (1, 2, 10, 1000):
            b = tchebychev_term_bound(env, 0.5, 4.0, delta=0.5, n=n)
            assert 0.0 <= b <= 1.0

    def test_term_bound_decays_in_n(self):
        env = constant_envelope(1.0)
        bs = [tchebychev_term_bound(env, 0.5, 4.0, delta=0.5, n=n) for n in (10, 100, 1000)]
        assert bs[0] > bs[1] > bs[2]

    def test_term_bound_explicit_value(self):
        # (K(p) / delta)^p n^(-p eps) once below one
        env = constant_envelope(1.0)
        b = tchebychev_term_bound(env, 0.5, 4.0, delta=1.0, n=100)
        assert b == pytest.approx(1.0 * 100.0 ** (-2.0), rel=1e-9)

    def test_tail_sum_dominates_term(self):
        env = constant_envelope(1.0)
        tail = tchebychev_tail_sum_bound(env, 0.5, 4.0, delta=1.0, n_last=100)
        term = tchebychev_term_bound(env, 0.5, 4.0, delta=1.0, n=101)
        assert tail >= term

    def test_needs_integrable_exponent(self):
        env = constant_envelope(1.0)
        with pytest.raises(InvalidExponent):
            tchebychev_tail_sum_bound(env, 0.5, 2.0, delta=1.0, n_last=10)


class TestSequences:
    def test_power_log_values(self):
        seq = PowerLogSequence(rate=1.0, log_power=1.0)
        np.testing.assert_allclose(seq.values(np.asarray([1.0, 2.0])), [math.log(2.0), math.log(3.0) / 2.0])

    def test_power_log_start_index(self):
        with pytest.raises(DomainError):
            PowerLogSequence(rate=1.0).values(np.asarray([0.0]))

    def test_geometric_values_and_start(self):
        seq = GeometricSequence(q=0.5, scale=2.0)
        np.testing.assert_allclose(seq.values(np.asarray([0.0, 1.0, 3.0])), [2.0, 1.0, 0.25])

    def test_geometric_q_range(self):
        for bad in (0.0, 1.0, 1.5):
            with pytest.raises(DomainError):
                GeometricSequence(q=bad)

    def test_slowly_varying_extends_by_last_value(self):
        seq = SlowlyVaryingSequence(rate=1.0, table=(2.0, 3.0))
        np.testing.assert_allclose(seq.values(np.asarray([1.0, 2.0, 5.0])), [2.0, 1.5, 0.6])
        assert seq.tail_scale == 3.0

    def test_pair_requires_decaying_ratio(self):
        with pytest.raises(DomainError):
            DecaySequencePair(GeometricSequence(q=0.5), GeometricSequence(q=0.25))
        with pytest.raises(DomainError):
            DecaySequencePair(PowerLogSequence(rate=0.5), PowerLogSequence(rate=1.0))

    def test_pair_rejects_mixed_kinds(self):
        with pytest.raises(DomainError):
            DecaySequencePair(GeometricSequence(q=0.25), PowerLogSequence(rate=1.0))

    def test_ratio_values(self):
        pair = DecaySequencePair(PowerLogSequence(rate=1.5), PowerLogSequence(rate=0.5))
        n = np.asarray([1.0, 4.0, 9.0])
        np.testing.assert_allclose(pair.ratio_values(n), n**-1.0)

    def test_from_config_shapes(self):
        seq = sequence_from_config({"form": "power_log", "alpha": 1.0, "m": 2.0})
        assert seq.rate == 1.0 and seq.log_power == 2.0
        seq = sequence_from_config({"form": "power_log", "theta": 0.5, "nu": 1.0})
        assert seq.rate == 0.5 and seq.log_power == -1.0
        seq = sequence_from_config({"form": "geometric", "Q": 0.5, "scale": 2.0})
        assert seq.q == 0.5 and seq.scale == 2.0
        seq = sequence_from_config({"form": "slowly_varying", "alpha": 1.0, "table": [1.0, 2.0]})
        assert seq.table == (1.0, 2.0)

    def test_from_config_errors(self):
        with pytest.raises(ConfigError):
            sequence_from_config({"form": "nope"})
        with pytest.raises(ConfigError):
            sequence_from_config({"form": "power_log"})
        with pytest.raises(ConfigError):
            pair_from_config({"eps": {"form": "geometric", "q": 0.5}, "beta": {"form": "geometric", "Q": 0.25}})

    @given(st.floats(min_value=0.05, max_value=0.9), st.floats(min_value=1.0, max_value=8.0))
    @settings(max_examples=50, deadline=None)
    def test_geometric_sigma_between_one_and_cap(self, delta, p):
        pair = DecaySequencePair(GeometricSequence(q=0.5 * delta), GeometricSequence(q=0.5))
        value = sigma_function(pair, p)
        assert 1.0 <= value <= 1.0 / (1.0 - delta) + 1e-9
