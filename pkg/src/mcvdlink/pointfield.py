"""Marked Poisson field of interfering transmitters.

Transmitters form a homogeneous Poisson point process outside the receiver
sphere, each carrying an independent Bernoulli transmit bit as its mark. The
channel depends on position only through the radial distance, so only radii
are ever materialized: the number of points in the shell ``(r_min, r_max]`` is
Poisson with mean ``lam * 4/3 pi (r_max^3 - r_min^3)`` and each radius has
density proportional to ``r^2`` there (inverse transform on the cubed radius).

The nearest-transmitter distance of the untruncated process has density

    f(r) = 4 pi lam r^2 exp(-4/3 pi lam (r^3 - a^3)),   r >= a,

which is sampled exactly by inverting its CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "FieldConfig",
    "MarkedPoint",
    "shell_volume",
    "sample_field",
    "sample_field_batch",
    "nearest_distance_pdf",
    "nearest_distance_cdf",
    "sample_nearest_distance",
]


@dataclass(frozen=True)
class FieldConfig:
    """Interferer intensity (per um^3) and the sampled radial shell (um)."""

    lam: float
    r_min: float
    r_max: float

    def __post_init__(self):
        if self.lam < 0:
            raise DomainError(f"intensity must be non-negative, got {self.lam}")
        if not self.r_min > 0:
            raise DomainError(f"r_min must be positive, got {self.r_min}")
        if not self.r_max > self.r_min:
            raise DomainError(f"need r_max > r_min, got [{self.r_min}, {self.r_max}]")


@dataclass(frozen=True)
class MarkedPoint:
    """One interferer: radial distance from the receiver center and its bit."""

    r: float
    bit: int


def shell_volume(r_min: float, r_max: float) -> float:
    """Volume of the spherical shell ``r_min < r <= r_max``."""
    return (4.0 / 3.0) * math.pi * (r_max**3 - r_min**3)


def _sample_radii(cfg: FieldConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(n)
    return np.cbrt(cfg.r_min**3 + u * (cfg.r_max**3 - cfg.r_min**3))


def sample_field_batch(cfg: FieldConfig, p1: float, rng: np.random.Generator, n_fields: int):
    """Sample ``n_fields`` independent fields at once.

    Returns ``(counts, radii, bits)`` where ``counts`` has one entry per
    field and ``radii``/``bits`` hold the concatenated points (field ``i``
    owns the slice starting at ``counts[:i].sum()``). Same distribution as
    repeated :func:`sample_field` calls, but vectorized.
    """
    if not 0.0 <= p1 <= 1.0:
        raise DomainError(f"p1 must be a probability, got {p1}")
    mean_count = cfg.lam * shell_volume(cfg.r_min, cfg.r_max)
    counts = rng.poisson(mean_count, n_fields)
    total = int(counts.sum())
    radii = _sample_radii(cfg, total, rng)
    bits = rng.random(total) < p1
    return counts, radii, bits


def sample_field(cfg: FieldConfig, p1: float, rng: np.random.Generator) -> list:
    """One realization of the marked field as a list of :class:`MarkedPoint`."""
    counts, radii, bits = sample_field_batch(cfg, p1, rng, 1)
    return [MarkedPoint(float(r), int(b)) for r, b in zip(radii, bits)]


def nearest_distance_pdf(r, lam: float, a: float):
    """Density of the nearest-transmitter distance at ``r >= a``."""
    if not lam > 0:
        raise DomainError(f"intensity must be positive, got {lam}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < a):
        raise DomainError(f"nearest distance is supported on r >= a={a}")
    with np.errstate(under="ignore"):
        out = 4.0 * math.pi * lam * r_arr**2 * np.exp(
            -(4.0 / 3.0) * math.pi * lam * (r_arr**3 - a**3)
        )
    if out.ndim == 0:
        return float(out)
    return out


def nearest_distance_cdf(r, lam: float, a: float):
    """CDF matching :func:`nearest_distance_pdf`."""
    if not lam > 0:
        raise DomainError(f"intensity must be positive, got {lam}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < a):
        raise DomainError(f"nearest distance is supported on r >= a={a}")
    out = -np.expm1(-(4.0 / 3.0) * math.pi * lam * (r_arr**3 - a**3))
    if out.ndim == 0:
        return float(out)
    return out


def sample_nearest_distance(lam: float, a: float, rng: np.random.Generator, size=None):
    """Exact inverse-transform sample(s) of the nearest-transmitter distance.

    ``r = (a^3 - 3 ln(1-U) / (4 pi lam))^(1/3)`` with ``U`` uniform on [0, 1).
    """
    if not lam > 0:
        raise DomainError(f"intensity must be positive, got {lam}")
    u = rng.random(size)
    r = np.cbrt(a**3 - 3.0 * np.log1p(-u) / (4.0 * math.pi * lam))
    if size is None:
        return float(r)
    return r
