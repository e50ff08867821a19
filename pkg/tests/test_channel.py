"""Channel impulse response unit tests."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfc

from mcvdlink.channel import (
    MediumConfig,
    ReceiverConfig,
    cir_fraction,
    cir_fraction_infinite_time,
    half_life_to_rate,
    hitting_rate,
)
from mcvdlink.errors import DomainError

A = 4.0
D = 74.9


def cir_by_quadrature(t, r, medium, a):
    """Independent oracle: integrate the degradation-weighted hitting rate."""
    peak = max((r - a) ** 2 / (6.0 * medium.D), 1e-12)
    f = lambda tau: hitting_rate(tau, r, medium, a) * math.exp(-medium.mu * tau)
    pts = [p for p in (peak, 10 * peak, 100 * peak) if p < t]
    value, _ = quad(f, 0.0, t, points=pts or None, limit=300)
    return value


class TestHalfLife:
    def test_log_two(self):
        assert half_life_to_rate(math.log(2.0)) == pytest.approx(1.0, rel=1e-15)

    def test_infinite_half_life(self):
        assert half_life_to_rate(math.inf) == 0.0

    def test_paper_scale(self):
        assert half_life_to_rate(0.13863) == pytest.approx(math.log(2.0) / 0.13863, rel=1e-15)
        assert half_life_to_rate(0.13863) == pytest.approx(5.0, rel=1e-4)

    def test_rejects_nonpositive(self):
        for bad in (0.0, -1.0):
            with pytest.raises(DomainError):
                half_life_to_rate(bad)


class TestHittingRate:
    def test_zero_at_surface(self):
        medium = MediumConfig(D=D)
        assert hitting_rate(0.05, A, medium, A) == 0.0

    def test_vanishes_at_small_times(self):
        medium = MediumConfig(D=D)
        assert hitting_rate(1e-9, 8.0, medium, A) == 0.0

    def test_integrates_to_hitting_probability(self):
        # Without degradation the lifetime absorption probability is a/r.
        medium = MediumConfig(D=D, mu=0.0)
        f = lambda tau: hitting_rate(tau, 8.0, medium, A)
        total, _ = quad(f, 0.0, np.inf, limit=300)
        assert total == pytest.approx(0.5, abs=1e-8)

    def test_rejects_interior_transmitter(self):
        medium = MediumConfig(D=D)
        with pytest.raises(DomainError):
            hitting_rate(0.1, 3.0, medium, A)
        with pytest.raises(DomainError):
            hitting_rate(0.0, 8.0, medium, A)


class TestCirFraction:
    @pytest.mark.parametrize("mu", [0.0, 1.0, 5.0])
    @pytest.mark.parametrize("t", [0.01, 0.5, 5.0])
    def test_surface_is_one(self, mu, t):
        medium = MediumConfig(D=D, mu=mu)
        assert cir_fraction(t, A, medium, A) == pytest.approx(1.0, abs=1e-12)

    def test_no_degradation_long_time_limit(self):
        # Without degradation the approach to a/r is O(1/sqrt(D t)): at
        # t = 50 s the fraction is still ~0.4816, and ~2e10 s are needed for
        # 1e-6 absolute agreement.
        medium = MediumConfig(D=D, mu=0.0)
        assert cir_fraction(50.0, 8.0, medium, A) == pytest.approx(0.48157, abs=1e-4)
        assert cir_fraction(2e10, 8.0, medium, A) == pytest.approx(0.5, abs=1e-6)
        assert cir_fraction_infinite_time(8.0, medium, A) == 0.5

    @pytest.mark.parametrize("mu", [0.0, 1.0, 5.0])
    @pytest.mark.parametrize("gap", [0.1, 4.0, 20.0])
    def test_matches_quadrature(self, mu, gap):
        medium = MediumConfig(D=D, mu=mu)
        for t in (0.01, 0.5, 5.0):
            closed = cir_fraction(t, A + gap, medium, A)
            oracle = cir_by_quadrature(t, A + gap, medium, A)
            assert abs(closed - oracle) < 1e-8

    def test_bounds(self):
        medium = MediumConfig(D=D, mu=5.0)
        for r in (A, 5.0, 10.0, 50.0, 200.0):
            for t in (0.01, 0.5, 5.0):
                h = cir_fraction(t, r, medium, A)
                assert 0.0 <= h <= A / r + 1e-15

    def test_monotone_in_time(self):
        medium = MediumConfig(D=D, mu=5.0)
        ts = np.linspace(0.01, 5.0, 40)
        h = cir_fraction(ts, 8.0, medium, A)
        assert np.all(np.diff(h) >= 0)

    def test_monotone_in_distance(self):
        medium = MediumConfig(D=D, mu=5.0)
        rs = np.linspace(A, 60.0, 60)
        h = cir_fraction(0.5, rs, medium, A)
        assert np.all(np.diff(h) <= 0)

    def test_monotone_in_degradation(self):
        last = None
        for mu in (0.0, 1.0, 2.0, 5.0, 10.0):
            h = cir_fraction(0.5, 8.0, MediumConfig(D=D, mu=mu), A)
            if last is not None:
                assert h <= last
            last = h

    def test_long_time_reaches_infinite_limit(self):
        medium = MediumConfig(D=D, mu=5.0)
        for r in (A, 6.0, 8.0, 20.0):
            limit = cir_fraction_infinite_time(r, medium, A)
            assert abs(cir_fraction(50.0, r, medium, A) - limit) <= 1e-9

    def test_stable_form_equals_literal_form(self):
        # Literal arrangement of the closed form, usable while
        # exp(+sqrt(mu/D)(r-a)) stays in range.
        medium = MediumConfig(D=D, mu=5.0)
        s = math.sqrt(medium.mu / D)
        for r in (A + 0.5, 6.0, 10.0, 30.0, 80.0):
            for t in (0.05, 0.5, 2.0):
                u = (r - A) / math.sqrt(4.0 * D * t)
                v = math.sqrt(medium.mu * t)
                literal = (A / (2.0 * r)) * (
                    math.exp(-s * (r - A)) * erfc(u - v) + math.exp(s * (r - A)) * erfc(u + v)
                )
                assert cir_fraction(t, r, medium, A) == pytest.approx(literal, rel=1e-12)

    def test_overflow_free_far_field(self):
        # The literal form overflows around r - a ~ 1400 um here; the stable
        # form must simply underflow toward zero.
        medium = MediumConfig(D=D, mu=5.0)
        h = cir_fraction(0.5, 5000.0, medium, A)
        assert 0.0 <= h < 1e-300

    def test_rejects_bad_arguments(self):
        medium = MediumConfig(D=D, mu=5.0)
        with pytest.raises(DomainError):
            cir_fraction(0.5, 3.9, medium, A)
        with pytest.raises(DomainError):
            cir_fraction(0.0, 8.0, medium, A)
        with pytest.raises(DomainError):
            cir_fraction(-1.0, 8.0, medium, A)


class TestInfiniteTimeLimit:
    def test_surface(self):
        assert cir_fraction_infinite_time(A, MediumConfig(D=D, mu=5.0), A) == 1.0

    def test_no_degradation(self):
        assert cir_fraction_infinite_time(10.0, MediumConfig(D=D, mu=0.0), A) == pytest.approx(
            0.4, rel=1e-15
        )

    def test_with_degradation(self):
        medium = MediumConfig(D=D, mu=5.0)
        expected = 0.5 * math.exp(-math.sqrt(5.0 / D) * 4.0)
        got = cir_fraction_infinite_time(8.0, medium, A)
        assert got == pytest.approx(expected, rel=1e-15)
        assert got == pytest.approx(0.1779, abs=5e-5)

    def test_rejects_interior(self):
        with pytest.raises(DomainError):
            cir_fraction_infinite_time(1.0, MediumConfig(D=D), A)


class TestConfigValidation:
    def test_medium(self):
        with pytest.raises(DomainError):
            MediumConfig(D=0.0)
        with pytest.raises(DomainError):
            MediumConfig(D=1.0, mu=-1.0)

    def test_receiver(self):
        with pytest.raises(DomainError):
            ReceiverConfig(a=0.0)
        with pytest.raises(DomainError):
            ReceiverConfig(a=1.0, eta=0)
