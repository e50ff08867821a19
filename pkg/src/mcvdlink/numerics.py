"""Shared numerical machinery.

Three ingredients the analytic layer is built on:

* adaptive quadrature on finite intervals and on ``[lo, inf)`` via
  geometrically doubled windows,
* an overflow-safe ``exp(b) * erfc(c)`` kernel based on the scaled
  complementary error function ``erfcx``,
* complete exponential Bell polynomials, evaluated through the
  factorial-normalized recurrence ``T_n = B_n / n!`` (the only form the
  error-probability sums ever need), with a brute-force partition-sum
  reference kept around as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, quad_vec
from scipy.special import erfc, erfcx

from .errors import AccuracyError, DomainError, RangeOverflowError, UnsupportedSizeError

__all__ = [
    "QuadratureSpec",
    "BellInput",
    "DEFAULT_QUADRATURE",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_semi_infinite_vec",
    "exp_times_erfc",
    "bell_normalized",
    "bell_partition_reference",
    "bell_log_partial_sums",
]

# Width of the first window used for semi-infinite integrals, in the caller's
# length unit (micrometers throughout this package). Subsequent windows double.
INITIAL_WINDOW_WIDTH = 50.0

# Hard cap on window doublings; 60 doublings of 50 um exceed any physical scale.
MAX_WINDOWS = 60

# Rescale threshold for the Bell partial-sum accumulator.
_BELL_RESCALE = 1e250


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the adaptive quadrature routines.

    ``rel_tol``/``abs_tol`` control each finite panel; ``tail_rel_tol`` is the
    truncation criterion for semi-infinite integrals: integration stops once a
    doubled window contributes less than ``tail_rel_tol`` of the running total.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200
    tail_rel_tol: float = 1e-12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.tail_rel_tol > 0):
            raise DomainError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class BellInput:
    """Argument vector ``[x1, ..., xn]`` of a complete Bell polynomial."""

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(float(x) for x in self.terms))

    def padded(self, n: int) -> tuple:
        """Terms extended with zeros up to length ``n``."""
        if len(self.terms) >= n:
            return self.terms[:n]
        return self.terms + (0.0,) * (n - len(self.terms))


def integrate_finite(
    f: Callable[[float], float], lo: float, hi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Integrate ``f`` over ``[lo, hi]`` to the requested tolerance.

    Deterministic (QUADPACK adaptive Gauss-Kronrod). Raises
    :class:`AccuracyError` carrying the best estimate if the subdivision
    budget is exhausted before the tolerance is met.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    result = quad(
        f,
        lo,
        hi,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    if len(result) > 3:
        value, bound = result[0], result[1]
        raise AccuracyError(
            f"quadrature on [{lo}, {hi}] did not converge: {result[3]}",
            estimate=value,
            error_bound=bound,
        )
    return result[0]


def _windows(lo: float):
    width = INITIAL_WINDOW_WIDTH
    cur = lo
    for _ in range(MAX_WINDOWS):
        yield cur, cur + width
        cur += width
        width *= 2


def integrate_semi_infinite(
    f: Callable[[float], float], lo: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Integrate an eventually-decaying ``f`` over ``[lo, inf)``.

    Sums integrals over windows of geometrically doubling width starting at
    ``INITIAL_WINDOW_WIDTH``, stopping once the last window contributes less
    than ``tail_rel_tol`` of the running total (two consecutive empty windows
    terminate the all-zero case).
    """
    total = 0.0
    zero_streak = 0
    for a, b in _windows(lo):
        part = integrate_finite(f, a, b, spec)
        total += part
        if part == 0.0 and total == 0.0:
            zero_streak += 1
            if zero_streak >= 2:
                return 0.0
            continue
        if abs(part) <= spec.tail_rel_tol * abs(total):
            return total
    raise AccuracyError(
        f"tail criterion not met after {MAX_WINDOWS} windows from {lo}",
        estimate=total,
        error_bound=abs(part),
    )


def integrate_semi_infinite_vec(
    f: Callable[[float], np.ndarray], lo: float, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> np.ndarray:
    """Vector-valued analogue of :func:`integrate_semi_infinite`.

    ``f`` maps a scalar to a 1-D array; all components are integrated in one
    adaptive pass per window (max-norm tail criterion). Used for evaluating a
    whole threshold sweep with a single quadrature.
    """
    total = None
    zero_streak = 0
    for a, b in _windows(lo):
        part, _err, info = quad_vec(
            f,
            a,
            b,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            norm="max",
            full_output=True,
        )
        if not info.success:
            raise AccuracyError(
                f"vector quadrature on [{a}, {b}] did not converge",
                estimate=part,
                error_bound=_err,
            )
        total = part if total is None else total + part
        pnorm = float(np.max(np.abs(part)))
        tnorm = float(np.max(np.abs(total)))
        if pnorm == 0.0 and tnorm == 0.0:
            zero_streak += 1
            if zero_streak >= 2:
                return total
            continue
        if pnorm <= spec.tail_rel_tol * tnorm:
            return total
    raise AccuracyError(
        f"vector tail criterion not met after {MAX_WINDOWS} windows from {lo}",
        estimate=total,
        error_bound=pnorm,
    )


def exp_times_erfc(b, c):
    """``exp(b) * erfc(c)`` without spurious intermediate overflow.

    For ``c >= 0`` uses ``erfcx(c) * exp(b - c^2)``; for ``c < 0``, where
    ``erfc(c)`` is between 1 and 2, the direct product is already safe.
    Accepts scalars or arrays. A result too large for float64 is returned as
    ``inf`` (the true value really is that large); underflow to 0 is likewise
    legitimate.
    """
    b_arr = np.asarray(b, dtype=float)
    c_arr = np.asarray(c, dtype=float)
    b_arr, c_arr = np.broadcast_arrays(b_arr, c_arr)
    out = np.empty(b_arr.shape, dtype=float)
    neg = c_arr < 0
    if np.any(neg):
        with np.errstate(over="ignore"):
            out[neg] = np.exp(b_arr[neg]) * erfc(c_arr[neg])
    pos = ~neg
    if np.any(pos):
        with np.errstate(over="ignore"):
            out[pos] = erfcx(c_arr[pos]) * np.exp(b_arr[pos] - c_arr[pos] ** 2)
    if out.ndim == 0:
        return float(out)
    return out


def _term_over_factorial(x: float, j: int) -> float:
    """``x / (j-1)!`` evaluated safely for any j >= 1."""
    if x == 0.0:
        return 0.0
    if j <= 171:
        return x / math.factorial(j - 1)
    # (j-1)! overflows float64; go through logs.
    return math.copysign(math.exp(math.log(abs(x)) - math.lgamma(j)), x)


def bell_normalized(input: BellInput, n_max: int) -> list:
    """Normalized complete Bell polynomials ``T_n = B_n(x_1..x_n) / n!``.

    Returns ``[T_0, ..., T_{n_max}]`` via the recurrence

        T_{n+1} = 1/(n+1) * sum_{i=0}^{n} T_{n-i} * x_{i+1} / i!

    with ``T_0 = 1``. Raises :class:`RangeOverflowError` naming the first n
    whose term leaves the float64 range.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    x = input.padded(n_max)
    t = [1.0]
    coeff = [_term_over_factorial(x[j - 1], j) for j in range(1, n_max + 1)]
    for n in range(1, n_max + 1):
        acc = 0.0
        for j in range(1, n + 1):
            acc += t[n - j] * coeff[j - 1]
        t_n = acc / n
        if not math.isfinite(t_n):
            raise RangeOverflowError(f"normalized Bell term overflowed at n={n}", index=n)
        t.append(t_n)
    return t


def _partition_vectors(length: int, parts: int, total: int):
    """All non-negative ``(j_1..j_length)`` with sum(j)=parts, sum(v*j_v)=total."""
    if length == 0:
        if parts == 0 and total == 0:
            yield ()
        return
    v = length
    j_max = min(parts, total // v)
    for j_v in range(j_max + 1):
        for rest in _partition_vectors(length - 1, parts - j_v, total - v * j_v):
            yield rest + (j_v,)


def bell_partition_reference(input: BellInput, n: int) -> float:
    """Complete Bell polynomial ``B_n`` by direct partition enumeration.

    Reference oracle only (factorial cost); capped at ``n <= 10``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if n > 10:
        raise UnsupportedSizeError(f"partition reference capped at n=10, got {n}")
    if n == 0:
        return 1.0
    x = input.padded(n)
    total = 0.0
    for w in range(1, n + 1):
        length = n - w + 1
        for j_vec in _partition_vectors(length, w, n):
            coeff = math.factorial(n)
            term = 1.0
            for v, j_v in enumerate(j_vec, start=1):
                coeff //= math.factorial(j_v)
                term *= (x[v - 1] / math.factorial(v)) ** j_v
            total += coeff * term
    return total


def bell_log_partial_sums(weights: Sequence[float]) -> np.ndarray:
    """Logs of the partial sums ``S_k = sum_{n=0}^{k} T_n`` for k = 0..m.

    ``weights[j-1]`` must hold the *normalized* argument ``x_j / j!`` (all
    non-negative); this is the overflow-free parametrization of the same
    recurrence used by :func:`bell_normalized`. The accumulator is rescaled
    whenever it grows past 1e250, so the returned logs are exact for partial
    sums far beyond the float64 range.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1:
        raise DomainError("weights must be one-dimensional")
    if w.size and (np.any(w < 0) or not np.all(np.isfinite(w))):
        raise DomainError("weights must be finite and non-negative")
    m = w.size
    out = np.empty(m + 1)
    out[0] = 0.0
    if m == 0:
        return out
    jw = w * np.arange(1, m + 1)
    t = np.empty(m + 1)
    t[0] = 1.0
    running = 1.0
    log_scale = 0.0
    for n in range(1, m + 1):
        t[n] = np.dot(jw[:n], t[n - 1 :: -1]) / n
        running += t[n]
        out[n] = math.log(running) + log_scale
        if running > _BELL_RESCALE:
            t[: n + 1] /= running
            log_scale += math.log(running)
            running = 1.0
    return out
