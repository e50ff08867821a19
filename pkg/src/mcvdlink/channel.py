"""Diffusion channel of a point transmitter and a fully-absorbing sphere.

A point source at distance ``r`` from the center of an absorbing sphere of
radius ``a`` emits molecules that diffuse (coefficient ``D``) and degrade at a
first-order rate ``mu``. The fraction of emitted molecules captured within
time ``t`` is

    h_t(r) = (a/2r) * [ exp(-s(r-a)) erfc(u - v) + exp(+s(r-a)) erfc(u + v) ]

with ``u = (r-a)/sqrt(4Dt)``, ``v = sqrt(mu t)`` and ``s = sqrt(mu/D)``, so
that ``s(r-a) = 2uv``. The literal form overflows for large ``r`` (a huge
``exp(+2uv)`` times a vanishing ``erfc``); everything here is evaluated in the
equivalent ``erfcx`` arrangement, which is overflow-free:

    h_t(r) = (a/2r) * exp(-(u^2+v^2)) * [ erfcx(u - v) + erfcx(u + v) ]

(with the ``u < v`` branch of the first term computed directly, where it is
already safe). All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcx

from .errors import DomainError

__all__ = [
    "MediumConfig",
    "ReceiverConfig",
    "half_life_to_rate",
    "hitting_rate",
    "cir_fraction",
    "cir_fraction_infinite_time",
]


@dataclass(frozen=True)
class MediumConfig:
    """Fluid/molecule pair: diffusion coefficient (um^2/s), degradation rate (1/s)."""

    D: float
    mu: float = 0.0

    def __post_init__(self):
        if not self.D > 0:
            raise DomainError(f"diffusion coefficient must be positive, got {self.D}")
        if self.mu < 0:
            raise DomainError(f"degradation rate must be non-negative, got {self.mu}")


@dataclass(frozen=True)
class ReceiverConfig:
    """Absorbing sphere radius (um) and decision threshold (molecule count)."""

    a: float
    eta: int = 1

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"receiver radius must be positive, got {self.a}")
        if int(self.eta) != self.eta or self.eta < 1:
            raise DomainError(f"threshold must be a positive integer, got {self.eta}")


def half_life_to_rate(half_life: float) -> float:
    """Degradation rate ``ln(2) / half_life``; ``inf`` maps to 0 (no decay)."""
    if half_life == math.inf:
        return 0.0
    if not half_life > 0:
        raise DomainError(f"half-life must be positive, got {half_life}")
    return math.log(2.0) / half_life


def _check_geometry(r, a):
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < a):
        raise DomainError(f"transmitter distance must satisfy r >= a={a}")
    return r_arr


def hitting_rate(tau, r, medium: MediumConfig, a: float):
    """Absorption rate (1/s) at lag ``tau`` for an emission from distance ``r``.

    kappa(tau, r) = (a/r) (r-a)/sqrt(4 pi D tau^3) exp(-(r-a)^2 / (4 D tau))
    """
    r_arr = _check_geometry(r, a)
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr <= 0):
        raise DomainError("tau must be positive")
    gap = r_arr - a
    with np.errstate(under="ignore"):
        out = (a / r_arr) * gap / np.sqrt(4.0 * math.pi * medium.D * tau_arr**3) * np.exp(
            -(gap**2) / (4.0 * medium.D * tau_arr)
        )
    if out.ndim == 0:
        return float(out)
    return out


def cir_fraction(t, r, medium: MediumConfig, a: float):
    """Fraction of molecules absorbed within ``t`` seconds from distance ``r``.

    Lies in ``[0, a/r]``; equals 1 at ``r = a`` for every ``t > 0``.
    """
    r_arr = _check_geometry(r, a)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise DomainError("t must be positive")
    u = (r_arr - a) / np.sqrt(4.0 * medium.D * t_arr)
    if medium.mu == 0.0:
        # Exact special case: h = (a/r) erfc(u).
        out = (a / r_arr) * erfc(u)
    else:
        v = np.sqrt(medium.mu * t_arr)
        u, v = np.broadcast_arrays(u, v)
        diff = u - v
        term1 = np.empty(diff.shape)
        safe = diff >= 0
        with np.errstate(under="ignore"):
            gauss = np.exp(-(u**2 + v**2))
            term1[safe] = erfcx(diff[safe]) * gauss[safe]
            # u < v: exp(-2uv) <= 1 and erfc in (1, 2]; direct product is safe.
            term1[~safe] = np.exp(-2.0 * u[~safe] * v[~safe]) * erfc(diff[~safe])
            term2 = erfcx(u + v) * gauss
            out = (a / (2.0 * r_arr)) * (term1 + term2)
    if out.ndim == 0:
        return float(out)
    return out


def cir_fraction_infinite_time(r, medium: MediumConfig, a: float):
    """Limit of :func:`cir_fraction` as t -> inf: ``(a/r) exp(-sqrt(mu/D)(r-a))``.

    With ``mu = 0`` this is the classical hitting probability ``a/r``.
    """
    r_arr = _check_geometry(r, a)
    with np.errstate(under="ignore"):
        out = (a / r_arr) * np.exp(-math.sqrt(medium.mu / medium.D) * (r_arr - a))
    if out.ndim == 0:
        return float(out)
    return out
