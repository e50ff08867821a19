"""Quadrature, stable erfc kernel and Bell polynomial unit tests."""

import math

import numpy as np
import pytest
from scipy.special import erfc

from mcvdlink.channel import MediumConfig, cir_fraction, hitting_rate
from mcvdlink.errors import AccuracyError, DomainError, RangeOverflowError, UnsupportedSizeError
from mcvdlink.numerics import (
    BellInput,
    QuadratureSpec,
    bell_log_partial_sums,
    bell_normalized,
    bell_partition_reference,
    exp_times_erfc,
    integrate_finite,
    integrate_semi_infinite,
    integrate_semi_infinite_vec,
)

# High-precision reference for erfcx(100), from a 40-digit evaluation of
# exp(10^4) * erfc(100).
ERFCX_100 = 0.005641613782989432903556457006951550718706


class TestIntegrateFinite:
    def test_polynomial(self):
        assert integrate_finite(lambda z: z * z, 0.0, 3.0) == pytest.approx(9.0, rel=1e-12)

    def test_exponential(self):
        expected = 1.0 - math.exp(-50.0)
        assert integrate_finite(math.exp, -50.0, 0.0) == pytest.approx(expected, rel=1e-12)

    def test_matches_cir_closed_form(self):
        # The degradation-weighted hitting-rate integral over one slot must
        # reproduce the closed-form channel fraction.
        medium = MediumConfig(D=74.9, mu=5.0)
        f = lambda tau: hitting_rate(tau, 8.0, medium, 4.0) * math.exp(-5.0 * tau)
        value = integrate_finite(f, 1e-12, 0.5)
        assert abs(value - cir_fraction(0.5, 8.0, medium, 4.0)) < 1e-8

    def test_rejects_bad_interval(self):
        with pytest.raises(DomainError):
            integrate_finite(math.exp, 1.0, 1.0)

    def test_accuracy_error_carries_estimate(self):
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=1)
        with pytest.raises(AccuracyError) as excinfo:
            integrate_finite(lambda z: math.sin(50.0 * z) ** 2, 0.0, 10.0, spec)
        assert excinfo.value.estimate is not None
        assert excinfo.value.error_bound is not None

    def test_deterministic(self):
        f = lambda z: math.exp(-z * z) * math.cos(3 * z)
        assert integrate_finite(f, 0.0, 5.0) == integrate_finite(f, 0.0, 5.0)


class TestIntegrateSemiInfinite:
    def test_exponential(self):
        assert integrate_semi_infinite(lambda z: math.exp(-z), 0.0) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_slot_limit_interference_kernel(self):
        # z^2 * (a/z) * exp(-sqrt(mu/D) (z-a)) from a integrates to
        # a * (D/mu + a * sqrt(D/mu)) by the closed-form antiderivative.
        a, d, mu = 4.0, 74.9, 5.0
        s = math.sqrt(mu / d)
        f = lambda z: z * z * (a / z) * math.exp(-s * (z - a))
        expected = a * (d / mu + a * math.sqrt(d / mu))
        assert integrate_semi_infinite(f, a) == pytest.approx(expected, rel=1e-10)

    def test_zero_function(self):
        assert integrate_semi_infinite(lambda z: 0.0, 0.0) == 0.0

    def test_vector_variant_matches_scalar(self):
        rates = np.array([0.5, 1.0, 2.0])
        vec = integrate_semi_infinite_vec(lambda z: np.exp(-rates * z), 0.0)
        for rate, got in zip(rates, vec):
            assert got == pytest.approx(1.0 / rate, rel=1e-9)


class TestQuadratureSpec:
    def test_rejects_nonpositive_tolerances(self):
        with pytest.raises(DomainError):
            QuadratureSpec(rel_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureSpec(abs_tol=-1e-10)
        with pytest.raises(DomainError):
            QuadratureSpec(max_subdivisions=0)


class TestExpTimesErfc:
    def test_unit_point(self):
        assert exp_times_erfc(0.0, 0.0) == 1.0

    def test_large_cancelling_exponents(self):
        assert exp_times_erfc(1e4, 100.0) == pytest.approx(ERFCX_100, rel=1e-12)

    def test_negative_argument_limit(self):
        # erfc(-c) -> 2 for large c.
        assert exp_times_erfc(0.0, -30.0) == pytest.approx(2.0, rel=1e-15)

    def test_matches_naive_in_safe_range(self):
        bs = np.linspace(-30.0, 30.0, 13)
        cs = np.linspace(-5.0, 5.0, 11)
        for b in bs:
            for c in cs:
                naive = math.exp(b) * erfc(c)
                assert exp_times_erfc(b, c) == pytest.approx(naive, rel=1e-12)

    def test_array_input(self):
        out = exp_times_erfc(np.array([0.0, 1e4]), np.array([0.0, 100.0]))
        assert out.shape == (2,)
        assert out[0] == pytest.approx(1.0)
        assert out[1] == pytest.approx(ERFCX_100, rel=1e-12)


class TestBellPolynomials:
    def test_first_order(self):
        assert bell_normalized(BellInput((5.0,)), 1) == [1.0, 5.0]

    def test_second_order(self):
        # B_2(x1, x2) = x1^2 + x2 = 7 for x = (2, 3); T_2 = 7/2!.
        t = bell_normalized(BellInput((2.0, 3.0)), 2)
        assert t[2] == pytest.approx(3.5, rel=1e-14)

    def test_third_order(self):
        # B_3(1,1,1) = 1 + 3 + 1 = 5; T_3 = 5/6.
        t = bell_normalized(BellInput((1.0, 1.0, 1.0)), 3)
        assert t[3] == pytest.approx(5.0 / 6.0, rel=1e-14)

    def test_pads_short_input(self):
        t = bell_normalized(BellInput((2.0,)), 3)
        # x2 = x3 = 0: B_n = x1^n, T_n = x1^n / n!.
        assert t[3] == pytest.approx(8.0 / 6.0, rel=1e-14)

    def test_zero_arguments(self):
        t = bell_normalized(BellInput(()), 5)
        assert t[0] == 1.0
        assert t[1:] == [0.0] * 5
        for n in range(1, 6):
            assert bell_partition_reference(BellInput(()), n) == 0.0
        assert bell_partition_reference(BellInput(()), 0) == 1.0

    def test_partition_reference_small_cases(self):
        assert bell_partition_reference(BellInput((2.0, 3.0)), 2) == pytest.approx(7.0)
        assert bell_partition_reference(BellInput((1.0, 1.0, 1.0)), 3) == pytest.approx(5.0)

    def test_partition_reference_size_cap(self):
        with pytest.raises(UnsupportedSizeError):
            bell_partition_reference(BellInput((1.0,) * 12), 11)

    def test_cross_check_against_recurrence(self):
        rng = np.random.default_rng(20240809)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            x = BellInput(tuple(rng.uniform(0.0, 3.0, n)))
            t = bell_normalized(x, n)
            expected = bell_partition_reference(x, n)
            assert t[n] * math.factorial(n) == pytest.approx(expected, rel=1e-10)

    def test_homogeneity(self):
        # Scaling x_v by c^v scales B_n by c^n.
        rng = np.random.default_rng(7)
        x = tuple(rng.uniform(0.1, 2.0, 6))
        c = 2.0
        scaled = tuple(c**v * xv for v, xv in enumerate(x, start=1))
        base = bell_normalized(BellInput(x), 6)
        up = bell_normalized(BellInput(scaled), 6)
        for n in range(7):
            assert up[n] == pytest.approx(c**n * base[n], rel=1e-12)

    def test_overflow_names_first_bad_index(self):
        with pytest.raises(RangeOverflowError) as excinfo:
            bell_normalized(BellInput((1e308, 1e308)), 2)
        assert excinfo.value.index == 2

    def test_log_partial_sums_match_direct(self):
        rng = np.random.default_rng(11)
        x = tuple(rng.uniform(0.0, 4.0, 12))
        t = bell_normalized(BellInput(x), 12)
        weights = [x[j - 1] / math.factorial(j) for j in range(1, 13)]
        logs = bell_log_partial_sums(weights)
        partial = np.cumsum(t)
        assert logs == pytest.approx(np.log(partial), rel=1e-12)

    def test_log_partial_sums_survive_huge_sums(self):
        # With only x1 nonzero the full sum is exp(w1); w1 = 700 pushes the
        # accumulator through several rescalings past the float64 range.
        weights = np.zeros(2000)
        weights[0] = 700.0
        logs = bell_log_partial_sums(weights)
        assert logs[-1] == pytest.approx(700.0, rel=1e-12)
        assert np.all(np.isfinite(logs))

    def test_log_partial_sums_reject_bad_weights(self):
        with pytest.raises(DomainError):
            bell_log_partial_sums([-1.0])
        with pytest.raises(DomainError):
            bell_log_partial_sums([math.nan])
