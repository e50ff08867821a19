"""Expected-count expression tests."""

import math
from dataclasses import replace

import pytest

from mcvdlink.channel import MediumConfig, ReceiverConfig, cir_fraction
from mcvdlink.errors import DivergenceError, DomainError, UnsupportedModeError
from mcvdlink.expectations import (
    FixedTagged,
    LinkConfig,
    NearestTagged,
    expected_interference,
    expected_interference_infinite_slot,
    expected_signal,
    expected_total,
)


def reference_config(**overrides):
    base = dict(
        medium=MediumConfig(D=74.9, mu=5.0),
        receiver=ReceiverConfig(a=4.0, eta=10),
        N=100,
        p1=0.5,
        Ts=0.5,
        lam=1e-5,
        tagged=FixedTagged(8.0),
    )
    base.update(overrides)
    return LinkConfig(**base)


class TestExpectedSignal:
    def test_at_surface(self):
        cfg = reference_config(tagged=FixedTagged(4.0))
        assert expected_signal(cfg) == pytest.approx(50.0, rel=1e-12)

    def test_zero_prior(self):
        assert expected_signal(reference_config(p1=0.0)) == 0.0

    def test_uses_channel_fraction(self):
        cfg = reference_config()
        h = cir_fraction(0.5, 8.0, cfg.medium, 4.0)
        assert expected_signal(cfg) == pytest.approx(50.0 * h, rel=1e-14)

    def test_nearest_mode_rejected(self):
        with pytest.raises(UnsupportedModeError):
            expected_signal(reference_config(tagged=NearestTagged()))

    def test_independent_of_intensity(self):
        assert expected_signal(reference_config(lam=0.0)) == expected_signal(
            reference_config(lam=1e-3)
        )


class TestExpectedInterference:
    def test_zero_intensity(self):
        assert expected_interference(reference_config(lam=0.0)) == 0.0

    def test_long_slot_approaches_closed_form(self):
        cfg = reference_config(Ts=10.0)
        closed = expected_interference_infinite_slot(cfg)
        assert abs(expected_interference(cfg) - closed) / closed < 1e-3

    def test_finite_slot_below_infinite_slot(self):
        cfg = reference_config()
        em = expected_interference(cfg)
        assert 0.0 < em < expected_interference_infinite_slot(cfg)

    def test_independent_of_tagged_distance(self):
        a = expected_interference(reference_config(tagged=FixedTagged(6.0)))
        b = expected_interference(reference_config(tagged=FixedTagged(40.0)))
        c = expected_interference(reference_config(tagged=NearestTagged()))
        assert a == b == c


class TestInfiniteSlotClosedForm:
    def test_paper_parameters(self):
        # Direct arithmetic of 4 pi lam p1 N a (D/mu + a sqrt(D/mu)).
        cfg = reference_config()
        expected = 4.0 * math.pi * 1e-5 * 0.5 * 100 * 4.0 * (14.98 + 4.0 * math.sqrt(14.98))
        got = expected_interference_infinite_slot(cfg)
        assert got == pytest.approx(expected, rel=1e-14)
        assert got == pytest.approx(0.765584, abs=5e-7)

    def test_zero_intensity(self):
        assert expected_interference_infinite_slot(reference_config(lam=0.0)) == 0.0

    def test_linear_in_intensity(self):
        one = expected_interference_infinite_slot(reference_config())
        two = expected_interference_infinite_slot(reference_config(lam=2e-5))
        assert two == pytest.approx(2.0 * one, rel=1e-14)

    def test_no_degradation_diverges(self):
        cfg = reference_config(medium=MediumConfig(D=74.9, mu=0.0))
        with pytest.raises(DivergenceError):
            expected_interference_infinite_slot(cfg)


class TestExpectedTotal:
    def test_additivity(self):
        cfg = reference_config()
        total = expected_total(cfg)
        assert total == pytest.approx(
            expected_signal(cfg) + expected_interference(cfg), abs=1e-12
        )

    def test_zero_intensity_reduces_to_signal(self):
        cfg = reference_config(lam=0.0)
        assert expected_total(cfg) == expected_signal(cfg)

    def test_zero_prior(self):
        assert expected_total(reference_config(p1=0.0)) == 0.0


class TestMonotonicities:
    def test_interference_monotone_in_scalars(self):
        base = reference_config()
        em = expected_interference(base)
        assert expected_interference(replace(base, Ts=1.0)) > em
        assert expected_interference(replace(base, lam=2e-5)) > em
        assert expected_interference(replace(base, p1=0.8)) > em
        assert expected_interference(replace(base, N=200)) > em

    def test_interference_monotone_in_medium(self):
        base = reference_config()
        em = expected_interference(base)
        bigger_a = replace(
            base, receiver=ReceiverConfig(a=6.0, eta=10), tagged=FixedTagged(8.0)
        )
        assert expected_interference(bigger_a) > em
        faster = replace(base, medium=MediumConfig(D=120.0, mu=5.0))
        assert expected_interference(faster) > em
        decaying = replace(base, medium=MediumConfig(D=74.9, mu=10.0))
        assert expected_interference(decaying) < em


class TestLinkConfigValidation:
    def test_rejects_bad_fields(self):
        with pytest.raises(DomainError):
            reference_config(N=-1)
        with pytest.raises(DomainError):
            reference_config(p1=1.5)
        with pytest.raises(DomainError):
            reference_config(Ts=0.0)
        with pytest.raises(DomainError):
            reference_config(lam=-1e-5)
        with pytest.raises(DomainError):
            reference_config(tagged=FixedTagged(3.0))
        with pytest.raises(DomainError):
            reference_config(r_max=2.0)

    def test_accepts_degenerate_emission(self):
        assert expected_signal(reference_config(N=0)) == 0.0
