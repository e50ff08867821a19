"""Exact bit-error probabilities of the threshold detector.

Conditioned on the interferer field, the slot count is Poisson, so the error
probabilities are expectations of Poisson tails over the field. Evaluating the
Laplace functional of the conditional mean and differentiating it n times
(Faa di Bruno) turns those expectations into complete Bell polynomials of the
interference functionals

    alpha_0 = 4 pi lam p1 * int_a^inf (1 - exp(-N h(z))) z^2 dz
    alpha_i = 4 pi lam p1 * int_a^inf exp(-N h(z)) (N h(z))^i z^2 dz

giving, with T_n = B_n / n!,

    Pe|0 = 1 - exp(-alpha_0) * [1 + sum_{n=1}^{eta-1} T_n(alpha)]
    Pe|1 = exp(-alpha_0 - N h(r_d)) * [1 + sum T_n(beta)]

where beta differs from alpha only in beta_1 = alpha_1 + N h(r_d). When the
tagged transmitter is the nearest point of the field law, Pe|1 is additionally
averaged over the nearest-distance density.

Everything is computed in the normalized parametrization w_i = alpha_i / i!
(a Poisson-weight integral, bounded for any threshold) with log-space partial
sums, so no intermediate quantity overflows even for thresholds of several
hundred; the raw alpha_i are reconstructed for reporting and may round to
``inf`` once i! alone leaves the float64 range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import AccuracyError, DomainError, UnsupportedModeError
from .expectations import LinkConfig, NearestTagged
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    bell_log_partial_sums,
    integrate_semi_infinite,
    integrate_semi_infinite_vec,
)

__all__ = [
    "AlphaVector",
    "BerBreakdown",
    "alpha_vector",
    "pe_given_0",
    "pe_given_1_fixed",
    "pe_given_1_nearest",
    "pe_total",
    "pe_curves",
    "optimal_threshold",
]

# Slack allowed before declaring a computed probability out of [0, 1]; pure
# rounding noise sits many orders of magnitude below this.
_PROB_SLACK = 1e-9


@dataclass(frozen=True)
class AlphaVector:
    """Interference functionals feeding the Bell sums for one threshold.

    ``weights[i-1]`` stores the normalized ``alpha_i / i!`` actually used in
    all computations; ``alphas`` are the raw values (``inf`` when out of
    float64 range, which happens only for thresholds of ~170+).
    """

    alpha0: float
    alphas: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.alphas) != len(self.weights):
            raise DomainError("alphas and weights must have equal length")
        if not math.isfinite(self.alpha0) or self.alpha0 < 0:
            raise DomainError("alpha0 must be finite and non-negative")
        if any(not math.isfinite(w) or w < 0 for w in self.weights):
            raise DomainError("normalized alpha weights must be finite and non-negative")

    @property
    def eta(self) -> int:
        return len(self.weights) + 1


@dataclass(frozen=True)
class BerBreakdown:
    """Conditional and total error probabilities at one threshold."""

    pe0: float
    pe1: float
    pe: float
    eta: int


def _check_eta(eta: int) -> int:
    if int(eta) != eta or eta < 1:
        raise DomainError(f"threshold must be a positive integer, got {eta}")
    return int(eta)


def _pois_weight_integrand(cfg: LinkConfig, i: int):
    """z^2-weighted Poisson pmf integrand for alpha_i / i!, overflow-free."""
    lgam = math.lgamma(i + 1)

    def f(z: float) -> float:
        nh = cfg.N * cfg.h_slot(z)
        if nh <= 0.0:
            return 0.0
        return math.exp(i * math.log(nh) - nh - lgam) * z * z

    return f


def alpha_vector(
    cfg: LinkConfig, eta: int, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> AlphaVector:
    """Compute ``alpha_0`` and ``alpha_1 .. alpha_{eta-1}`` for ``cfg``."""
    eta = _check_eta(eta)
    m = eta - 1
    if cfg.lam == 0.0 or cfg.N == 0:
        return AlphaVector(0.0, (0.0,) * m, (0.0,) * m)
    a = cfg.receiver.a
    scale = 4.0 * math.pi * cfg.lam * cfg.p1

    def f0(z: float) -> float:
        return -math.expm1(-cfg.N * cfg.h_slot(z)) * z * z

    alpha0 = scale * integrate_semi_infinite(f0, a, spec)
    weights = []
    for i in range(1, m + 1):
        try:
            integral = integrate_semi_infinite(_pois_weight_integrand(cfg, i), a, spec)
        except AccuracyError as err:
            raise AccuracyError(
                f"alpha_{i} integral failed: {err}",
                estimate=err.estimate,
                error_bound=err.error_bound,
            ) from err
        weights.append(scale * integral)
    alphas = []
    for i, w in enumerate(weights, start=1):
        if w == 0.0:
            alphas.append(0.0)
        else:
            with np.errstate(over="ignore"):
                alphas.append(float(np.exp(math.log(w) + math.lgamma(i + 1))))
    return AlphaVector(alpha0, tuple(alphas), tuple(weights))


def _assert_probability(p: float, label: str) -> float:
    if p < -_PROB_SLACK or p > 1.0 + _PROB_SLACK:
        raise AssertionError(f"{label} = {p} falls outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def _pe0_from_alpha(av: AlphaVector) -> float:
    log_s = bell_log_partial_sums(np.asarray(av.weights))
    # The full sum equals exp(alpha0); partial sums never exceed it.
    exponent = min(log_s[-1] - av.alpha0, 0.0)
    return _assert_probability(-math.expm1(exponent), "Pe|0")


def _pe1_fixed_from_alpha(av: AlphaVector, nh: float) -> float:
    weights = np.asarray(av.weights)
    if weights.size:
        weights = weights.copy()
        weights[0] += nh
    log_s = bell_log_partial_sums(weights)
    exponent = min(log_s[-1] - av.alpha0 - nh, 0.0)
    return _assert_probability(math.exp(exponent), "Pe|1")


def pe_given_0(cfg: LinkConfig, eta: int, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Probability of decoding 1 when the tagged transmitter sent 0.

    Identical in the fixed-distance and nearest-transmitter models: bit 0
    emits nothing, so only interference reaches the receiver.
    """
    return _pe0_from_alpha(alpha_vector(cfg, eta, spec))


def pe_given_1_fixed(
    cfg: LinkConfig, eta: int, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Probability of decoding 0 when bit 1 was sent from fixed ``r_d``."""
    nh = cfg.N * cfg.h_slot(cfg.fixed_distance())
    return _pe1_fixed_from_alpha(alpha_vector(cfg, eta, spec), nh)


def _nearest_prefactors(cfg: LinkConfig):
    if not isinstance(cfg.tagged, NearestTagged):
        raise UnsupportedModeError("operation requires the nearest-transmitter tagged mode")
    if not cfg.lam > 0:
        raise DomainError("nearest-transmitter mode requires a positive intensity")
    ball = (4.0 / 3.0) * math.pi * cfg.lam
    return cfg.receiver.a, ball


def _relative_only(spec: QuadratureSpec) -> QuadratureSpec:
    """Quadrature spec with a vanishing absolute floor.

    The nearest-mode integrand carries the factored exponent, so its absolute
    scale can be arbitrarily small; only the relative tolerance is meaningful
    there. A finite abs_tol would let the integrator accept a coarse panel
    that missed a narrow peak entirely.
    """
    return replace(spec, abs_tol=min(spec.abs_tol, 1e-300))


def pe_given_1_nearest(
    cfg: LinkConfig, eta: int, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Probability of decoding 0 when bit 1 was sent by the nearest transmitter.

    Averages the fixed-distance expression over the nearest-distance density;
    only beta_1 varies with r, so the r-independent functionals are computed
    once and the Bell sum is rebuilt per quadrature node.
    """
    eta = _check_eta(eta)
    a, ball = _nearest_prefactors(cfg)
    av = alpha_vector(cfg, eta, spec)
    base = np.asarray(av.weights)

    def integrand(r: float) -> float:
        nh = cfg.N * cfg.h_slot(r)
        weights = base.copy()
        if weights.size:
            weights[0] += nh
        log_s = bell_log_partial_sums(weights)[-1]
        exponent = log_s - av.alpha0 - nh + ball * (a**3 - r**3)
        return math.exp(exponent) * r * r

    integral = integrate_semi_infinite(integrand, a, _relative_only(spec))
    return _assert_probability(4.0 * math.pi * cfg.lam * integral, "Pe|1")


def pe_total(cfg: LinkConfig, eta: int, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> BerBreakdown:
    """Total error probability ``p0 Pe|0 + p1 Pe|1`` for the configured mode."""
    eta = _check_eta(eta)
    av = alpha_vector(cfg, eta, spec)
    pe0 = _pe0_from_alpha(av)
    if cfg.is_fixed:
        nh = cfg.N * cfg.h_slot(cfg.fixed_distance())
        pe1 = _pe1_fixed_from_alpha(av, nh)
    else:
        pe1 = pe_given_1_nearest(cfg, eta, spec)
    pe = cfg.p0 * pe0 + cfg.p1 * pe1
    return BerBreakdown(pe0, pe1, pe, eta)


def pe_curves(cfg: LinkConfig, etas, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Vectorized ``(pe0, pe1, pe)`` arrays over a whole threshold sweep.

    Equivalent to calling :func:`pe_total` per threshold but shares one alpha
    vector and, in nearest mode, one vector-valued quadrature across all
    thresholds (the Bell partial sums at each node yield every threshold at
    once).
    """
    etas = [_check_eta(e) for e in etas]
    if not etas:
        raise DomainError("at least one threshold is required")
    eta_max = max(etas)
    av = alpha_vector(cfg, eta_max, spec)
    base = np.asarray(av.weights)
    idx = np.asarray(etas) - 1

    log_s_alpha = bell_log_partial_sums(base)
    pe0 = -np.expm1(np.minimum(log_s_alpha[idx] - av.alpha0, 0.0))

    if cfg.is_fixed:
        nh = cfg.N * cfg.h_slot(cfg.fixed_distance())
        weights = base.copy()
        if weights.size:
            weights[0] += nh
        log_s_beta = bell_log_partial_sums(weights)
        pe1 = np.exp(np.minimum(log_s_beta[idx] - av.alpha0 - nh, 0.0))
    else:
        a, ball = _nearest_prefactors(cfg)

        def integrand(r: float) -> np.ndarray:
            nh = cfg.N * cfg.h_slot(r)
            weights = base.copy()
            if weights.size:
                weights[0] += nh
            log_s = bell_log_partial_sums(weights)[idx]
            return np.exp(log_s - av.alpha0 - nh + ball * (a**3 - r**3)) * r * r

        integral = integrate_semi_infinite_vec(integrand, a, _relative_only(spec))
        pe1 = 4.0 * math.pi * cfg.lam * integral

    pe0 = np.asarray([_assert_probability(float(p), "Pe|0") for p in pe0])
    pe1 = np.asarray([_assert_probability(float(p), "Pe|1") for p in pe1])
    pe = cfg.p0 * pe0 + cfg.p1 * pe1
    return pe0, pe1, pe


def optimal_threshold(
    cfg: LinkConfig, eta_max: int = 200, spec: QuadratureSpec = DEFAULT_QUADRATURE
):
    """Exhaustive threshold search over ``1 .. eta_max``.

    Returns ``(eta_star, pe_star)``; ties break toward the smaller threshold.
    """
    eta_max = _check_eta(eta_max)
    etas = range(1, eta_max + 1)
    _, _, pe = pe_curves(cfg, etas, spec)
    best = int(np.argmin(pe))
    return best + 1, float(pe[best])
