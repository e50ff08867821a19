"""Expected absorbed-molecule counts for one time slot.

With on-off keying, the tagged transmitter contributes ``p1 N h_Ts(r_d)``
molecules on average; the Poisson field of interferers contributes

    E_M = 4 pi lam p1 N * integral_a^inf h_Ts(z) z^2 dz

by the Campbell-Mecke theorem (the Bernoulli marks fold into the factor
``p1 N``, the mean mark). For degrading molecules the slot-length limit has
the closed form

    E_M(Ts -> inf) = 4 pi lam p1 N a (D/mu + a sqrt(D/mu)),

which diverges as ``mu -> 0``: without degradation an infinitely long slot
accumulates unbounded interference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .channel import MediumConfig, ReceiverConfig, cir_fraction
from .errors import DivergenceError, DomainError, UnsupportedModeError
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate_semi_infinite

__all__ = [
    "FixedTagged",
    "NearestTagged",
    "LinkConfig",
    "expected_signal",
    "expected_interference",
    "expected_total",
    "expected_interference_infinite_slot",
]


@dataclass(frozen=True)
class FixedTagged:
    """Tagged transmitter pinned at radial distance ``r_d`` (um)."""

    r_d: float


@dataclass(frozen=True)
class NearestTagged:
    """Tagged transmitter is the nearest point of the interferer law."""


@dataclass(frozen=True)
class LinkConfig:
    """Complete scenario record for one link analysis.

    ``N`` molecules are emitted for a 1-bit (prior ``p1``) during a slot of
    ``Ts`` seconds; interferers have intensity ``lam`` (per um^3). ``r_max``
    is the Monte Carlo truncation radius; the analytic integrals never
    truncate. ``N = 0`` is admitted as a degenerate diagnostic (nothing is
    ever emitted).
    """

    medium: MediumConfig
    receiver: ReceiverConfig
    N: int
    p1: float
    Ts: float
    lam: float
    tagged: FixedTagged | NearestTagged = field(default_factory=NearestTagged)
    r_max: float = 150.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 0:
            raise DomainError(f"emission count must be a non-negative integer, got {self.N}")
        if not 0.0 <= self.p1 <= 1.0:
            raise DomainError(f"p1 must be a probability, got {self.p1}")
        if not self.Ts > 0:
            raise DomainError(f"slot duration must be positive, got {self.Ts}")
        if self.lam < 0:
            raise DomainError(f"intensity must be non-negative, got {self.lam}")
        if not self.r_max > self.receiver.a:
            raise DomainError("truncation radius must exceed the receiver radius")
        if isinstance(self.tagged, FixedTagged) and self.tagged.r_d < self.receiver.a:
            raise DomainError("fixed tagged distance must satisfy r_d >= a")

    @property
    def p0(self) -> float:
        return 1.0 - self.p1

    @property
    def is_fixed(self) -> bool:
        return isinstance(self.tagged, FixedTagged)

    def fixed_distance(self) -> float:
        if not self.is_fixed:
            raise UnsupportedModeError("operation requires the fixed-distance tagged mode")
        return self.tagged.r_d

    def h_slot(self, r):
        """Slot-length channel fraction ``h_Ts(r)``."""
        return cir_fraction(self.Ts, r, self.medium, self.receiver.a)

    def with_tagged(self, tagged) -> "LinkConfig":
        return replace(self, tagged=tagged)


def expected_signal(cfg: LinkConfig) -> float:
    """Mean desired-molecule count ``p1 N h_Ts(r_d)`` (fixed mode only)."""
    r_d = cfg.fixed_distance()
    return cfg.p1 * cfg.N * cfg.h_slot(r_d)


def expected_interference(cfg: LinkConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Mean interference count; independent of the tagged distance."""
    if cfg.lam == 0.0:
        return 0.0
    a = cfg.receiver.a
    integral = integrate_semi_infinite(lambda z: cfg.h_slot(z) * z * z, a, spec)
    return 4.0 * math.pi * cfg.lam * cfg.p1 * cfg.N * integral


def expected_total(cfg: LinkConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Mean total count: signal plus interference (fixed mode only)."""
    return expected_signal(cfg) + expected_interference(cfg, spec)


def expected_interference_infinite_slot(cfg: LinkConfig) -> float:
    """Closed-form ``E_M`` for an infinitely long slot; requires ``mu > 0``."""
    if cfg.lam == 0.0:
        return 0.0
    if cfg.medium.mu == 0.0:
        raise DivergenceError(
            "interference count diverges for an infinite slot without degradation"
        )
    a = cfg.receiver.a
    d_over_mu = cfg.medium.D / cfg.medium.mu
    return 4.0 * math.pi * cfg.lam * cfg.p1 * cfg.N * a * (d_over_mu + a * math.sqrt(d_over_mu))
