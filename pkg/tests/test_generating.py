"""Generating-function domains, values, and constructors."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from glsreg.errors import ConfigError, DomainError, EmptyDomain, InvalidEpsilon, NoFiniteMoment
from glsreg.generating import (
    EDGE_INSET,
    UPPER_CAP,
    ExponentInterval,
    Extremal,
    FromCallable,
    PointDomain,
    PowerRoot,
    Product,
    RegulatorFactor,
    Tabulated,
    TwoSidedSingular,
    check_positive_infimum,
    evaluate,
    from_config,
    intersect_domains,
    natural_function,
    regulator_generating,
    scan_grid,
)
from glsreg.moments import constant_moments, std_exponential_moments


class TestExponentInterval:
    def test_contains_respects_open_sides(self):
        iv = ExponentInterval(1.0, 4.0, lower_open=True)
        assert not iv.contains(1.0)
        assert iv.contains(2.0)
        assert not iv.contains(4.0)

    def test_closed_lower_contains_endpoint(self):
        iv = ExponentInterval(1.0, math.inf)
        assert iv.contains(1.0)
        assert iv.contains(1e6)
        assert not iv.contains(math.inf)

    def test_lower_below_one_rejected(self):
        with pytest.raises(DomainError):
            ExponentInterval(0.5, 4.0)

    def test_empty_interval_rejected(self):
        with pytest.raises(DomainError):
            ExponentInterval(3.0, 3.0)

    def test_contains_array_matches_scalar(self):
        iv = ExponentInterval(1.0, 3.0, lower_open=True)
        ps = np.asarray([1.0, 1.5, 2.999, 3.0])
        np.testing.assert_array_equal(iv.contains_array(ps), [iv.contains(p) for p in ps])


class TestIntersect:
    def test_interval_overlap(self):
        out = intersect_domains(ExponentInterval(1.0, 5.0), ExponentInterval(2.0, 9.0, lower_open=True))
        assert out.lower == 2.0 and out.upper == 5.0 and out.lower_open

    def test_disjoint_raises(self):
        with pytest.raises(EmptyDomain):
            intersect_domains(ExponentInterval(1.0, 2.0), ExponentInterval(3.0, 4.0))

    def test_point_inside_interval(self):
        out = intersect_domains(PointDomain(2.0), ExponentInterval(1.0, 5.0))
        assert isinstance(out, PointDomain) and out.p == 2.0

    def test_point_outside_interval_raises(self):
        with pytest.raises(EmptyDomain):
            intersect_domains(PointDomain(9.0), ExponentInterval(1.0, 5.0))


class TestPowerRoot:
    def test_values(self):
        psi = PowerRoot(m=2.0)
        assert evaluate(psi, 4.0) == 2.0
        assert evaluate(psi, 1.0) == 1.0

    def test_identity_weight(self):
        assert evaluate(PowerRoot(m=1.0), 3.0) == 3.0

    def test_nonpositive_m_rejected(self):
        with pytest.raises(DomainError):
            PowerRoot(m=0.0)

    @given(st.floats(min_value=0.2, max_value=8.0), st.floats(min_value=1.0, max_value=50.0))
    def test_always_at_least_one(self, m, p):
        assert evaluate(PowerRoot(m=m), p) >= 1.0


class TestTwoSidedSingular:
    def test_blows_up_at_both_ends(self):
        psi = TwoSidedSingular(b=4.0, alpha=0.5, beta=1.0)
        mid = evaluate(psi, 2.0)
        assert mid == pytest.approx((2.0 - 1.0) ** -0.5 * (4.0 - 2.0) ** -1.0)
        assert evaluate(psi, 1.0 + 1e-12) > mid
        assert evaluate(psi, 4.0 - 1e-12) > mid

    def test_domain_is_open(self):
        psi = TwoSidedSingular(b=4.0, alpha=0.5, beta=1.0)
        assert not psi.domain.contains(1.0)
        assert not psi.domain.contains(4.0)
        assert evaluate(psi, 1.0) == math.inf

    def test_needs_b_above_one(self):
        with pytest.raises(DomainError):
            TwoSidedSingular(b=1.0, alpha=0.5, beta=0.5)

    def test_negative_exponents_rejected(self):
        with pytest.raises(DomainError):
            TwoSidedSingular(b=4.0, alpha=-0.1, beta=0.5)


class TestExtremal:
    def test_point_domain(self):
        psi = Extremal(r=3.0)
        assert isinstance(psi.domain, PointDomain)
        assert evaluate(psi, 3.0) == 1.0
        assert evaluate(psi, 2.0) == math.inf

    def test_r_below_one_rejected(self):
        with pytest.raises(DomainError):
            Extremal(r=0.5)


class TestTabulated:
    def test_interpolates_geometrically(self):
        psi = Tabulated(points=((1.0, 1.0), (4.0, 4.0)))
        # log-log straight line through (1,1),(4,4) is the identity
        assert evaluate(psi, 2.0) == pytest.approx(2.0, rel=1e-12)

    def test_constant_table(self):
        psi = Tabulated(points=((1.0, 3.0), (100.0, 3.0)))
        assert evaluate(psi, 7.0) == pytest.approx(3.0)

    def test_outside_hull_is_infinite(self):
        psi = Tabulated(points=((2.0, 1.0), (3.0, 1.0)))
        assert evaluate(psi, 1.5) == math.inf
        assert evaluate(psi, 3.5) == math.inf

    def test_needs_two_increasing_knots(self):
        with pytest.raises(DomainError):
            Tabulated(points=((1.0, 1.0),))
        with pytest.raises(DomainError):
            Tabulated(points=((2.0, 1.0), (2.0, 2.0)))

    def test_rejects_nonpositive_values(self):
        with pytest.raises(DomainError):
            Tabulated(points=((1.0, 1.0), (2.0, 0.0)))


class TestRegulatorFactor:
    def test_value(self):
        f = RegulatorFactor(eps=0.5)
        assert evaluate(f, 4.0) == pytest.approx((4.0 * 0.5 - 1.0) ** -0.25)

    def test_domain_opens_at_reciprocal_eps(self):
        f = RegulatorFactor(eps=0.25)
        assert f.domain.lower == 4.0 and f.domain.lower_open
        assert evaluate(f, 4.0) == math.inf

    def test_eps_validated(self):
        for bad in (0.0, 1.0, 1.5, -0.2):
            with pytest.raises(DomainError):
                RegulatorFactor(eps=bad)


class TestFromCallable:
    def test_wraps_callable(self):
        psi = FromCallable(lambda p: p + 1.0, ExponentInterval(1.0, 10.0))
        assert evaluate(psi, 3.0) == 4.0

    def test_positivity_check_rejects_vanishing(self):
        with pytest.raises(DomainError):
            FromCallable(lambda p: p - 1.0, ExponentInterval(1.0, 10.0))

    def test_check_can_be_skipped(self):
        psi = FromCallable(lambda p: p - 1.0, ExponentInterval(1.0, 10.0), check_positive=False)
        assert evaluate(psi, 1.0) == 0.0


class TestProduct:
    def test_multiplies_values_and_intersects_domains(self):
        prod = Product((PowerRoot(m=1.0), RegulatorFactor(eps=0.5)))
        assert evaluate(prod, 4.0) == pytest.approx(4.0 * (1.0) ** -0.25)
        assert prod.domain.lower == 2.0 and prod.domain.lower_open

    def test_disjoint_factors_raise(self):
        with pytest.raises(EmptyDomain):
            Product((Tabulated(points=((1.0, 1.0), (2.0, 1.0))), RegulatorFactor(eps=0.25)))


class TestScanGrid:
    def test_includes_closed_endpoints_exactly(self):
        grid = scan_grid(ExponentInterval(1.0, 8.0), 64)
        assert grid[0] == 1.0
        assert grid.max() < 8.0

    def test_insets_open_lower(self):
        grid = scan_grid(ExponentInterval(2.0, 8.0, lower_open=True), 64)
        # first point is the endpoint-adjacent sample, strictly inside
        assert 2.0 < grid[0] <= 2.0 * (1.0 + EDGE_INSET)

    def test_caps_infinite_upper(self):
        grid = scan_grid(ExponentInterval(1.0, math.inf), 64)
        assert grid.max() <= UPPER_CAP

    def test_point_domain(self):
        np.testing.assert_array_equal(scan_grid(PointDomain(3.0)), [3.0])

    def test_strictly_increasing(self):
        grid = scan_grid(ExponentInterval(1.0, 50.0, lower_open=True), 128)
        assert np.all(np.diff(grid) > 0)


class TestCheckPositiveInfimum:
    def test_accepts_bounded_below(self):
        assert check_positive_infimum(PowerRoot(m=2.0)) >= 1.0

    def test_rejects_zero_on_grid(self):
        psi = FromCallable(lambda p: np.maximum(p - 3.0, 0.0), ExponentInterval(1.0, 10.0), check_positive=False)
        with pytest.raises(DomainError):
            check_positive_infimum(psi)


class TestRegulatorGenerating:
    def test_composite_value(self):
        psi = regulator_generating(PowerRoot(m=1.0), alpha=1.0, eps=0.5)
        assert evaluate(psi, 4.0) == pytest.approx(4.0 * 1.0 ** -0.25)

    def test_eps_must_undershoot_alpha_and_one(self):
        with pytest.raises(InvalidEpsilon):
            regulator_generating(PowerRoot(m=1.0), alpha=0.3, eps=0.5)
        with pytest.raises(InvalidEpsilon):
            regulator_generating(PowerRoot(m=1.0), alpha=2.0, eps=1.0)

    def test_domain_must_reach_past_threshold(self):
        # psi lives on (1, 3) but the factor starts above 1/0.3 > 3
        with pytest.raises(EmptyDomain):
            regulator_generating(TwoSidedSingular(b=3.0, alpha=0.5, beta=0.5), alpha=1.0, eps=0.3)


class TestNaturalFunction:
    def test_follows_the_moment_curve(self):
        m = std_exponential_moments()
        theta = natural_function(m)
        ps = np.asarray([1.0, 2.0, 5.0, 20.0])
        np.testing.assert_allclose(theta.values(ps), m.values(ps), rtol=0)

    def test_constant_below_anchor(self):
        m = constant_moments(2.5)
        theta = natural_function(m)
        assert evaluate(theta, 1.0) == 2.5

    def test_rejects_vanishing_moment(self):
        with pytest.raises(NoFiniteMoment):
            natural_function(constant_moments(0.0))


class TestFromConfig:
    def test_power_root(self):
        psi = from_config({"form": "power_root", "m": 2.0})
        assert evaluate(psi, 16.0) == 4.0

    def test_two_sided(self):
        psi = from_config({"form": "two_sided", "b": 4.0, "alpha": 0.5, "beta": 1.0})
        assert evaluate(psi, 2.0) == pytest.approx(0.5)

    def test_extremal(self):
        assert evaluate(from_config({"form": "extremal", "r": 2.0}), 2.0) == 1.0

    def test_table(self):
        psi = from_config({"form": "table", "points": [[1.0, 1.0], [4.0, 4.0]]})
        assert evaluate(psi, 4.0) == 4.0

    def test_unknown_form(self):
        with pytest.raises(ConfigError):
            from_config({"form": "mystery"})

    def test_missing_field(self):
        with pytest.raises(ConfigError):
            from_config({"form": "power_root"})

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            from_config({"form": "power_root", "m": -1.0})
