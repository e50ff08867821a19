"""Ground-truth link simulator.

Each trial draws a fresh interferer field, forms the conditional mean count

    V = b * N * h_Ts(r_d) + sum_points bit * N * h_Ts(r),

draws the slot count ``y ~ Poisson(V)`` (the same Poisson observation model
the analysis uses) and decodes ``1`` iff ``y >= eta``. Error rates are
estimated by conditioning on the transmitted bit rather than randomizing it:
same estimand, lower variance.

Trials are processed in fixed-size chunks with sub-streams spawned from a
single seed, accumulating in chunk order, so an estimate is bit-identical for
a given seed regardless of chunk scheduling. Counts are histogrammed, which
makes a whole threshold sweep free once the counts are drawn; sweeps over
``eta`` therefore share trials across thresholds (common random numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .expectations import LinkConfig
from .pointfield import FieldConfig, sample_field, sample_field_batch, sample_nearest_distance

__all__ = [
    "TrialOutcome",
    "BerEstimate",
    "CountEstimate",
    "simulate_trial",
    "simulate_fixed",
    "simulate_nearest",
    "simulate_fixed_sweep",
    "simulate_nearest_sweep",
    "estimate_expected_counts",
]

_CHUNK = 20_000


@dataclass(frozen=True)
class TrialOutcome:
    """One simulated slot: forced bit, conditional mean, count, decision."""

    tagged_bit: int
    conditional_mean: float
    observed: int
    decoded: int


@dataclass(frozen=True)
class BerEstimate:
    """Empirical error rates with binomial standard errors.

    The conditional estimates use independent trials, so the standard error
    of ``pe_hat`` is ``hypot(p0 * se0, p1 * se1)`` for priors ``(p0, p1)``.
    """

    pe0_hat: float
    pe1_hat: float
    pe_hat: float
    se0: float
    se1: float
    trials_per_bit: int
    seed: int | None

    def pe_se(self, p1: float) -> float:
        return math.hypot((1.0 - p1) * self.se0, p1 * self.se1)


@dataclass(frozen=True)
class CountEstimate:
    """Empirical counterparts of the expected signal/interference counts."""

    e_s_hat: float
    e_m_hat: float
    e_t_hat: float
    se_s: float
    se_m: float
    se_t: float
    trials: int
    seed: int | None


def _resolve_seed_sequence(rng):
    """Normalize a seed-or-generator argument to (spawnable source, seed label)."""
    if rng is None:
        ss = np.random.SeedSequence()
        return ss, int(ss.entropy)
    if isinstance(rng, (int, np.integer)):
        if rng < 0:
            raise DomainError(f"seed must be non-negative, got {rng}")
        return np.random.SeedSequence(int(rng)), int(rng)
    if isinstance(rng, np.random.SeedSequence):
        return rng, (int(rng.entropy) if isinstance(rng.entropy, int) else None)
    if isinstance(rng, np.random.Generator):
        return rng, None
    raise DomainError(f"cannot interpret {rng!r} as a random stream or seed")


def _spawn(source, n: int):
    if isinstance(source, np.random.SeedSequence):
        return [np.random.default_rng(child) for child in source.spawn(n)]
    return source.spawn(n)


def _chunk_sizes(trials: int):
    sizes = [_CHUNK] * (trials // _CHUNK)
    if trials % _CHUNK:
        sizes.append(trials % _CHUNK)
    return sizes


def _field_config(cfg: LinkConfig) -> FieldConfig:
    return FieldConfig(cfg.lam, cfg.receiver.a, cfg.r_max)


def _interference_sums(cfg: LinkConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """Per-trial conditional interference means over ``n`` fresh fields."""
    if cfg.lam == 0.0:
        return np.zeros(n)
    counts, radii, bits = sample_field_batch(_field_config(cfg), cfg.p1, rng, n)
    trial_idx = np.repeat(np.arange(n), counts)
    active = bits
    contrib = cfg.N * cfg.h_slot(radii[active]) if np.any(active) else np.empty(0)
    return np.bincount(trial_idx[active], weights=contrib, minlength=n)


def simulate_trial(cfg: LinkConfig, tagged_bit: int, eta: int, rng) -> TrialOutcome:
    """Run a single slot, materializing the field through :func:`sample_field`."""
    if tagged_bit not in (0, 1):
        raise DomainError(f"tagged bit must be 0 or 1, got {tagged_bit}")
    source, _ = _resolve_seed_sequence(rng)
    gen = _spawn(source, 1)[0]
    if cfg.is_fixed:
        r_d = cfg.fixed_distance()
    else:
        r_d = sample_nearest_distance(cfg.lam, cfg.receiver.a, gen)
    mean = float(tagged_bit) * cfg.N * cfg.h_slot(r_d)
    if cfg.lam > 0.0:
        for point in sample_field(_field_config(cfg), cfg.p1, gen):
            if point.bit:
                mean += cfg.N * cfg.h_slot(point.r)
    observed = int(gen.poisson(mean))
    return TrialOutcome(tagged_bit, mean, observed, int(observed >= eta))


def _count_histograms(cfg: LinkConfig, etas, trials: int, rng, nearest: bool):
    """Tail counts of the slot histogram per conditioned bit, shared across etas."""
    if not etas:
        raise DomainError("at least one threshold is required")
    eta_max = max(etas)
    source, seed = _resolve_seed_sequence(rng)
    sizes = _chunk_sizes(trials)
    gens = _spawn(source, len(sizes))
    hist0 = np.zeros(eta_max + 2, dtype=np.int64)
    hist1 = np.zeros(eta_max + 2, dtype=np.int64)
    a = cfg.receiver.a
    for n, gen in zip(sizes, gens):
        v0 = _interference_sums(cfg, n, gen)
        y0 = gen.poisson(v0)
        if nearest:
            r_d = sample_nearest_distance(cfg.lam, a, gen, size=n)
            nh = cfg.N * cfg.h_slot(r_d)
        else:
            nh = cfg.N * cfg.h_slot(cfg.fixed_distance())
        v1 = _interference_sums(cfg, n, gen) + nh
        y1 = gen.poisson(v1)
        hist0 += np.bincount(np.minimum(y0, eta_max + 1), minlength=eta_max + 2)
        hist1 += np.bincount(np.minimum(y1, eta_max + 1), minlength=eta_max + 2)
    tail0 = hist0[::-1].cumsum()[::-1]
    tail1 = hist1[::-1].cumsum()[::-1]
    return tail0, tail1, seed


def _estimates_from_tails(cfg, etas, trials, tail0, tail1, seed):
    out = []
    for eta in etas:
        errors0 = int(tail0[eta])
        errors1 = trials - int(tail1[eta])
        pe0 = errors0 / trials
        pe1 = errors1 / trials
        out.append(
            BerEstimate(
                pe0_hat=pe0,
                pe1_hat=pe1,
                pe_hat=cfg.p0 * pe0 + cfg.p1 * pe1,
                se0=math.sqrt(pe0 * (1.0 - pe0) / trials),
                se1=math.sqrt(pe1 * (1.0 - pe1) / trials),
                trials_per_bit=trials,
                seed=seed,
            )
        )
    return out


def _validate_trials(trials: int):
    if int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials}")
    return int(trials)


def simulate_fixed_sweep(cfg: LinkConfig, etas, trials: int, rng) -> list:
    """One :class:`BerEstimate` per threshold, fixed tagged distance.

    All thresholds are decoded from the same drawn counts.
    """
    trials = _validate_trials(trials)
    cfg.fixed_distance()
    etas = [int(e) for e in etas]
    if any(e < 1 for e in etas):
        raise DomainError("thresholds must be positive integers")
    tail0, tail1, seed = _count_histograms(cfg, etas, trials, rng, nearest=False)
    return _estimates_from_tails(cfg, etas, trials, tail0, tail1, seed)


def simulate_nearest_sweep(cfg: LinkConfig, etas, trials: int, rng) -> list:
    """One :class:`BerEstimate` per threshold, nearest-transmitter mode."""
    trials = _validate_trials(trials)
    if not cfg.lam > 0:
        raise DomainError("nearest-transmitter mode requires a positive intensity")
    etas = [int(e) for e in etas]
    if any(e < 1 for e in etas):
        raise DomainError("thresholds must be positive integers")
    tail0, tail1, seed = _count_histograms(cfg, etas, trials, rng, nearest=True)
    return _estimates_from_tails(cfg, etas, trials, tail0, tail1, seed)


def simulate_fixed(cfg: LinkConfig, eta: int, trials: int, rng) -> BerEstimate:
    """Estimate ``Pe|0``/``Pe|1`` at one threshold, fixed tagged distance."""
    return simulate_fixed_sweep(cfg, [eta], trials, rng)[0]


def simulate_nearest(cfg: LinkConfig, eta: int, trials: int, rng) -> BerEstimate:
    """Estimate ``Pe|0``/``Pe|1`` at one threshold, nearest-transmitter mode."""
    return simulate_nearest_sweep(cfg, [eta], trials, rng)[0]


def estimate_expected_counts(cfg: LinkConfig, trials: int, rng) -> CountEstimate:
    """Sample means of the signal/interference/total molecule counts.

    The tagged bit is Bernoulli(p1) per trial here (the estimand marginalizes
    over it); interference uses fresh fields.
    """
    trials = _validate_trials(trials)
    nh = cfg.N * cfg.h_slot(cfg.fixed_distance())
    source, seed = _resolve_seed_sequence(rng)
    sizes = _chunk_sizes(trials)
    gens = _spawn(source, len(sizes))
    sums = np.zeros(3)
    sumsq = np.zeros(3)
    for n, gen in zip(sizes, gens):
        b = gen.random(n) < cfg.p1
        s_vals = np.where(b, nh, 0.0)
        m_vals = _interference_sums(cfg, n, gen)
        t_vals = s_vals + m_vals
        for k, vals in enumerate((s_vals, m_vals, t_vals)):
            sums[k] += vals.sum()
            sumsq[k] += (vals * vals).sum()
    means = sums / trials
    if trials > 1:
        variances = np.maximum(sumsq - trials * means**2, 0.0) / (trials - 1)
    else:
        variances = np.zeros(3)
    ses = np.sqrt(variances / trials)
    return CountEstimate(
        e_s_hat=float(means[0]),
        e_m_hat=float(means[1]),
        e_t_hat=float(means[2]),
        se_s=float(ses[0]),
        se_m=float(ses[1]),
        se_t=float(ses[2]),
        trials=trials,
        seed=seed,
    )
