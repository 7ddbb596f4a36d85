"""Orthant probability routes and rate bounds.

Reference values were frozen from an mpmath oracle (30 digits) that
integrates Phi^n(z sqrt(s)) phi(z) directly with mp.quad, independently of
the scipy-based implementation under test.
"""

import math

import numpy as np
import pytest

from simplex_orthant import orthant
from simplex_orthant.orthant import (
    OrthantEstimate,
    QuadratureSpec,
    best_estimate,
    bound_high_rho_lower,
    bound_high_rho_upper,
    bound_low_rho_lower,
    bound_low_rho_upper,
    closed_form,
    density_integral,
    low_rho_gate,
    monte_carlo,
    scaled_ratio,
    steck_quadrature,
    theorem_bounds,
    trivariate_closed_form,
)

# mpmath, dps=30: quad of ncdf(z sqrt(s))^n npdf(z) over split intervals
F_ORACLE = {
    (5, 0.3): 0.10453060115009154,
    (10, 0.75): 0.20016751061398332,
    (50, 0.6): 0.042201461310133498,
    (200, 0.9): 0.18213593356971047,
    (7, 0.25): 0.051756879427465094,
    (1000, 0.75): 0.033144760663489749,
}
SHEPPARD_08 = 0.39758361765043327  # 1/4 + arcsin(0.8)/(2 pi)
DAVID_09 = 0.3923252801534703  # 1/8 + 3 arcsin(0.9)/(4 pi)


class TestSpecs:
    def test_quadrature_spec_validation(self):
        QuadratureSpec(nodes=2, rel_tol=1e-14)
        with pytest.raises(ValueError):
            QuadratureSpec(nodes=1)
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=1e-15)
        with pytest.raises(ValueError):
            QuadratureSpec(method="simpson")

    def test_estimate_validation(self):
        with pytest.raises(ValueError):
            OrthantEstimate(value=1.2, std_error=0.0, method="x", count=0)
        with pytest.raises(ValueError):
            OrthantEstimate(value=0.5, std_error=-1.0, method="x", count=0)


class TestClosedForm:
    def test_known_values(self):
        assert closed_form(2, 0.5).value == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert closed_form(7, 0.5).value == pytest.approx(0.125, rel=1e-15)
        assert closed_form(5, 0.0).value == pytest.approx(1.0 / 32.0, rel=1e-15)
        assert closed_form(2, 0.8).value == pytest.approx(SHEPPARD_08, rel=1e-15)
        assert closed_form(1, 0.3).value == 0.5

    def test_no_closed_form(self):
        assert closed_form(4, 0.3) is None
        assert closed_form(10, 0.99) is None

    def test_deterministic_tagging(self):
        est = closed_form(3, 0.2)
        assert est.std_error == 0.0
        assert est.method == "closed_form"

    def test_domain(self):
        with pytest.raises(ValueError):
            closed_form(0, 0.5)
        with pytest.raises(ValueError):
            closed_form(3, 1.0)
        with pytest.raises(ValueError):
            closed_form(3, -0.6)

    def test_negative_rho_three(self):
        # David's formula still applies for admissible negative rho
        val = closed_form(3, -0.25).value
        assert val == pytest.approx(0.125 + 3 * math.asin(-0.25) / (4 * math.pi))


class TestTrivariate:
    def test_values(self):
        assert trivariate_closed_form(0.0, 0.0, 0.0) == pytest.approx(0.125, rel=1e-15)
        assert trivariate_closed_form(0.5, 0.5, 0.5) == pytest.approx(0.25, rel=1e-15)
        assert trivariate_closed_form(0.9, 0.9, 0.9) == pytest.approx(DAVID_09, rel=1e-15)

    def test_reduces_to_equal_rho(self):
        for rho in (0.1, 0.4, 0.8):
            assert trivariate_closed_form(rho, rho, rho) == pytest.approx(
                closed_form(3, rho).value, rel=1e-15
            )

    def test_rejects_non_psd(self):
        with pytest.raises(ValueError):
            trivariate_closed_form(0.9, 0.9, -0.9)


class TestSteckQuadrature:
    @pytest.mark.parametrize("n,rho", [(2, 0.5), (10, 0.5), (2, 0.8), (3, 0.9)])
    def test_matches_closed_forms(self, n, rho):
        assert steck_quadrature(n, rho).value == pytest.approx(
            closed_form(n, rho).value, abs=1e-9
        )

    @pytest.mark.parametrize("n,rho", sorted(F_ORACLE))
    def test_matches_oracle(self, n, rho):
        assert steck_quadrature(n, rho).value == pytest.approx(
            F_ORACLE[(n, rho)], rel=1e-10
        )

    def test_large_n_recentred(self):
        # mass far outside the fixed node span; recentring must keep accuracy
        est = steck_quadrature(100_000, 0.75)
        assert est.value == pytest.approx(
            scaled_ratio_inverse(100_000, 0.75, est.value), rel=1e-12
        )
        assert 0.0 < est.value < 1e-1

    def test_deterministic(self):
        a = steck_quadrature(37, 0.63)
        b = steck_quadrature(37, 0.63)
        assert a.value == b.value and a.std_error == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            steck_quadrature(5, 0.0)
        with pytest.raises(ValueError):
            steck_quadrature(5, -0.1)
        with pytest.raises(ValueError):
            steck_quadrature(5, 1.0)


def scaled_ratio_inverse(n, rho, f):
    """Identity helper: f recovered from its own scaled ratio."""
    return scaled_ratio(n, rho, f) * n ** (1.0 - 1.0 / rho)


class TestDensityIntegral:
    def test_closed_form_case(self):
        assert density_integral(2, 0.5).value == pytest.approx(1.0 / 3.0, rel=1e-10)

    @pytest.mark.parametrize("n,rho", sorted(F_ORACLE))
    def test_matches_oracle(self, n, rho):
        assert density_integral(n, rho).value == pytest.approx(
            F_ORACLE[(n, rho)], rel=1e-9
        )

    def test_representation_equivalence_grid(self):
        worst = 0.0
        for rho in np.arange(0.1, 0.95, 0.1):
            for n in (2, 5, 10, 50, 200):
                a = steck_quadrature(n, float(rho)).value
                b = density_integral(n, float(rho)).value
                worst = max(worst, abs(a - b) / a)
        assert worst <= 1e-8

    def test_endpoint_singularity_regime(self):
        # rho > 1/2 puts an algebraic singularity at x = 1; the substitution
        # branch must not lose accuracy there
        assert density_integral(3, 0.75).value == pytest.approx(
            steck_quadrature(3, 0.75).value, rel=1e-10
        )


class TestMonteCarlo:
    def test_known_values(self):
        est = monte_carlo(2, 0.5, 1_000_000, seed=2024)
        assert abs(est.value - 1.0 / 3.0) <= 0.0015
        assert monte_carlo(1, 0.3, 1_000_000, seed=5).value == pytest.approx(0.5, abs=0.0015)
        assert monte_carlo(3, 0.0, 1_000_000, seed=5).value == pytest.approx(0.125, abs=0.0011)

    def test_oracle_cross_check(self):
        est = monte_carlo(6, 0.25, 2_000_000, seed=77)
        exact = steck_quadrature(6, 0.25).value
        assert abs(est.value - exact) <= 3.5 * est.std_error

    def test_std_error_formula(self):
        est = monte_carlo(2, 0.3, 40_000, seed=1)
        assert est.std_error == pytest.approx(
            math.sqrt(est.value * (1.0 - est.value) / 40_000), rel=1e-12
        )

    def test_thread_invariance(self):
        one = monte_carlo(4, 0.6, 300_000, seed=9, threads=1)
        four = monte_carlo(4, 0.6, 300_000, seed=9, threads=4)
        assert one.value == four.value

    def test_domain(self):
        with pytest.raises(ValueError):
            monte_carlo(3, -0.1, 100, seed=0)
        with pytest.raises(ValueError):
            monte_carlo(3, 0.5, 0, seed=0)


class TestHighRhoBounds:
    def test_examples(self):
        f100 = steck_quadrature(100, 0.75).value
        assert 0.0 < bound_high_rho_lower(100, 0.75) <= f100
        assert bound_high_rho_upper(100, 0.75) >= f100
        assert 0.0 < bound_high_rho_lower(2, 0.9) <= closed_form(2, 0.9).value
        assert bound_high_rho_upper(2, 0.55) >= closed_form(2, 0.55).value

    def test_not_applicable(self):
        assert bound_high_rho_lower(10, 0.4) is None
        assert bound_high_rho_upper(10, 0.4) is None
        assert bound_high_rho_lower(1, 0.8) is None

    @pytest.mark.parametrize("rho", [0.6, 0.75, 0.9])
    @pytest.mark.parametrize("n", [2, 10, 100, 1000, 10_000])
    def test_sandwich(self, n, rho):
        f = steck_quadrature(n, rho).value
        assert bound_high_rho_lower(n, rho) <= f <= bound_high_rho_upper(n, rho)

    def test_upper_log_domain_near_one(self):
        # B(2, 1/rho - 1) diverges as rho -> 1; must stay finite, not overflow
        val = bound_high_rho_upper(10, 0.999999)
        assert math.isfinite(val) and val > 0.0


class TestLowRhoBounds:
    def test_gate(self):
        assert not low_rho_gate(3, 0.45) or bound_low_rho_lower(3, 0.45) is not None
        assert low_rho_gate(50, 0.25)
        assert not low_rho_gate(2, 0.05)

    def test_lower_examples(self):
        assert bound_low_rho_lower(50, 0.25) <= density_integral(50, 0.25).value
        assert bound_low_rho_lower(200, 0.4) <= steck_quadrature(200, 0.4).value

    def test_lower_not_applicable(self):
        assert bound_low_rho_lower(2, 0.05) is None
        assert bound_low_rho_lower(10, 0.6) is None

    def test_lower_may_be_negative_near_half(self):
        # Gamma(1/rho - 1) < 1 for rho close to 1/2: a valid but vacuous bound
        val = bound_low_rho_lower(1000, 0.45)
        assert val is not None and val < 0.0

    @pytest.mark.parametrize("rho", [0.2, 0.3, 0.4])
    @pytest.mark.parametrize("n", [10, 50, 200, 1000])
    def test_lower_sandwich(self, n, rho):
        lo = bound_low_rho_lower(n, rho)
        if lo is None:
            assert not low_rho_gate(n, rho)
        else:
            assert lo <= steck_quadrature(n, rho).value

    def test_upper_scaling(self):
        # formula homogeneity: the bracket enters to the power 1/rho - 2
        rho = 0.25
        a = bound_low_rho_upper(100, rho)
        expect = (
            100 ** (1.0 - 1.0 / rho)
            * math.sqrt((1.0 - rho) / rho)
            * ((1.0 / rho - 1.0) * math.log(100) ** 2) ** (1.0 / rho - 2.0)
        )
        assert a == pytest.approx(expect, rel=1e-12)

    def test_upper_empirical_threshold(self):
        # asymptotic bound with unspecified onset n0(rho); recorded smallest
        # n at which it held on a geometric grid to 1e6: n = 2 for each of
        # rho in {0.25, 0.3, 0.4}
        for rho in (0.25, 0.3, 0.4):
            for n in (2, 10, 100, 10_000):
                assert bound_low_rho_upper(n, rho) >= steck_quadrature(n, rho).value

    def test_upper_no_overflow_small_rho(self):
        assert math.isfinite(bound_low_rho_upper(100, 0.05))


class TestScaledRatio:
    def test_exact_value(self):
        assert scaled_ratio(7, 0.5, 0.125) == pytest.approx(7.0 / 8.0, rel=1e-14)

    def test_identity(self):
        f = steck_quadrature(100, 0.75).value
        r = scaled_ratio(100, 0.75, f)
        assert r * 100 ** (1.0 - 1.0 / 0.75) == pytest.approx(f, rel=1e-12)

    def test_in_theorem_band(self):
        f = steck_quadrature(100, 0.75).value
        r = scaled_ratio(100, 0.75, f)
        lo = bound_high_rho_lower(100, 0.75) / 100 ** (1.0 - 1.0 / 0.75)
        hi = bound_high_rho_upper(100, 0.75) / 100 ** (1.0 - 1.0 / 0.75)
        assert lo <= r <= hi

    def test_log_domain_survives_extremes(self):
        assert math.isfinite(scaled_ratio(10**9, 0.9, 1e-300))

    def test_domain(self):
        with pytest.raises(ValueError):
            scaled_ratio(10, 0.5, 0.0)
        with pytest.raises(ValueError):
            scaled_ratio(10, 0.5, 1.0)


class TestRateEnvelope:
    def test_ratio_band_bounded_up_to_logs(self):
        # f(n, rho)/n^(1-1/rho) decays like 1/sqrt(log n); multiplied back it
        # should stay within a fixed band over three decades of n
        for rho in (0.6, 0.75, 0.9):
            vals = []
            for n in np.unique(np.geomspace(100, 100_000, 10).astype(int)):
                f = steck_quadrature(int(n), rho).value
                vals.append(scaled_ratio(int(n), rho, f) * math.sqrt(math.log(n)))
            assert max(vals) / min(vals) <= 10.0


class TestTheoremBounds:
    def test_high_rho_report(self):
        rep = theorem_bounds(100, 0.75)
        assert rep.lower_applicable and rep.upper_applicable
        assert not rep.upper_asymptotic
        assert rep.lower <= rep.upper
        assert rep.scale == pytest.approx(100 ** (1.0 - 1.0 / 0.75))

    def test_low_rho_report(self):
        rep = theorem_bounds(50, 0.25)
        assert rep.lower_applicable
        assert not rep.upper_applicable and rep.upper_asymptotic

    def test_gated_low_rho(self):
        rep = theorem_bounds(2, 0.05)
        assert not rep.lower_applicable and rep.lower is None

    def test_nonpositive_rho(self):
        rep = theorem_bounds(5, 0.0)
        assert not (rep.lower_applicable or rep.upper_applicable)


class TestMonotonicity:
    @pytest.mark.parametrize("n", [2, 5, 20])
    def test_nondecreasing_in_rho(self, n):
        vals = [steck_quadrature(n, float(r)).value for r in np.arange(0.05, 1.0, 0.05)]
        assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("rho", [0.25, 0.5, 0.75])
    def test_nonincreasing_in_n(self, rho):
        vals = [steck_quadrature(n, rho).value for n in range(1, 30)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


class TestBestEstimate:
    def test_closed_form_priority(self):
        assert best_estimate(9, 0.5).method == "closed_form"
        assert best_estimate(9, 0.5).value == pytest.approx(0.1, rel=1e-15)
        assert best_estimate(2, 0.8).method == "closed_form"

    def test_quadrature_fallback(self):
        est = best_estimate(9, 0.3)
        assert est.method == "steck_quadrature"
        assert est.value == pytest.approx(steck_quadrature(9, 0.3).value)

    def test_rejects_uncovered_negative_rho(self):
        with pytest.raises(ValueError):
            best_estimate(9, -0.05)
