"""Sweep, validation and threshold-search drivers behind the CLI.

A sweep walks one axis (threshold, tagged distance, intensity, slot length or
degradation rate), evaluates the requested analytic quantities per point and
optionally attaches Monte Carlo estimates with standard errors. Results are
plain rows ready for CSV serialization; floats are written with 17 significant
digits so a rerun with the same flags and seed is byte-identical. Cells whose
computation raises a semantic error are spelled ``ERR:<code>`` instead of
aborting the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import ber_analytic, montecarlo
from .channel import MediumConfig, ReceiverConfig, cir_fraction, cir_fraction_infinite_time
from .errors import DomainError, McvdLinkError
from .expectations import (
    FixedTagged,
    LinkConfig,
    NearestTagged,
    expected_interference,
    expected_interference_infinite_slot,
    expected_signal,
    expected_total,
)

__all__ = [
    "DEFAULTS",
    "CONFIG_KEYS",
    "SweepSpec",
    "ValidationRow",
    "ValidationReport",
    "ThresholdReport",
    "parse_config_file",
    "build_link_config",
    "run_sweep",
    "run_cir_table",
    "validate",
    "find_threshold",
    "format_cell",
    "write_csv",
]

# Built-in defaults: the reference scenario used throughout (units um, s).
DEFAULTS = {
    "D": 74.9,
    "mu": 5.0,
    "a": 4.0,
    "N": 100,
    "p1": 0.5,
    "Ts": 0.5,
    "lambda": 1e-5,
    "r_max": 150.0,
    "eta": 10,
    "tagged_mode": "fixed",
    "r_d": 8.0,
}

CONFIG_KEYS = tuple(DEFAULTS)

AXES = ("eta", "r_d", "lambda", "Ts", "mu")

OUTPUT_KEYS = ("E_S", "E_M", "E_T", "E_M_inf", "pe0", "pe1", "pe", "pe_mc", "se", "counts_mc")

# Column expansion per output key, in fixed order.
_OUTPUT_COLUMNS = {
    "E_S": ("E_S",),
    "E_M": ("E_M",),
    "E_T": ("E_T",),
    "E_M_inf": ("E_M_inf",),
    "pe0": ("pe0",),
    "pe1": ("pe1",),
    "pe": ("pe",),
    "pe_mc": ("pe0_mc", "pe1_mc", "pe_mc"),
    "se": ("se0", "se1", "se"),
    "counts_mc": ("E_S_mc", "E_M_mc", "E_T_mc", "se_S", "se_M", "se_T"),
}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: base scenario, axis, points, requested outputs, MC budget."""

    base: LinkConfig
    axis: str
    values: tuple
    outputs: tuple
    mc_trials: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise DomainError("sweep needs at least one axis value")
        vals = tuple(self.values)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("axis values must be strictly increasing")
        if self.axis == "eta" and any(int(v) != v or v < 1 for v in vals):
            raise DomainError("eta values must be positive integers")
        unknown = [k for k in self.outputs if k not in OUTPUT_KEYS]
        if unknown:
            raise DomainError(f"unknown output keys {unknown}; valid: {OUTPUT_KEYS}")
        if self.mc_trials < 0:
            raise DomainError("mc_trials must be non-negative")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")


def parse_config_file(path: str) -> dict:
    """Read a flat ``key=value`` file; ``#`` starts a comment; keys are checked."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, text = line.partition("=")
            key = key.strip()
            text = text.strip()
            if key not in CONFIG_KEYS:
                raise DomainError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = text
    return values


def build_link_config(values: dict) -> tuple:
    """Merge raw settings over the defaults into ``(LinkConfig, eta)``."""
    merged = dict(DEFAULTS)
    merged.update(values)
    mode = str(merged["tagged_mode"]).strip().lower()
    if mode not in ("fixed", "nearest"):
        raise DomainError(f"tagged_mode must be 'fixed' or 'nearest', got {mode!r}")
    try:
        tagged = FixedTagged(float(merged["r_d"])) if mode == "fixed" else NearestTagged()
        eta = int(merged["eta"])
        cfg = LinkConfig(
            medium=MediumConfig(D=float(merged["D"]), mu=float(merged["mu"])),
            receiver=ReceiverConfig(a=float(merged["a"]), eta=eta),
            N=int(merged["N"]),
            p1=float(merged["p1"]),
            Ts=float(merged["Ts"]),
            lam=float(merged["lambda"]),
            tagged=tagged,
            r_max=float(merged["r_max"]),
        )
    except (TypeError, ValueError) as err:
        if isinstance(err, DomainError):
            raise
        raise DomainError(f"bad setting value: {err}") from err
    return cfg, eta


def _cfg_at(base: LinkConfig, axis: str, value) -> LinkConfig:
    if axis == "eta":
        return base
    if axis == "r_d":
        return base.with_tagged(FixedTagged(float(value)))
    if axis == "lambda":
        return replace(base, lam=float(value))
    if axis == "Ts":
        return replace(base, Ts=float(value))
    if axis == "mu":
        return replace(base, medium=MediumConfig(D=base.medium.D, mu=float(value)))
    raise DomainError(f"unknown axis {axis!r}")


def _guard(fn):
    try:
        return fn()
    except McvdLinkError as err:
        return f"ERR:{err.code}"


def _mc_sweep(cfg: LinkConfig, etas, trials: int, seed):
    if cfg.is_fixed:
        return montecarlo.simulate_fixed_sweep(cfg, etas, trials, seed)
    return montecarlo.simulate_nearest_sweep(cfg, etas, trials, seed)


def sweep_header(spec: SweepSpec) -> list:
    header = [spec.axis]
    for key in spec.outputs:
        header.extend(_OUTPUT_COLUMNS[key])
    return header


def run_sweep(spec: SweepSpec) -> tuple:
    """Evaluate the sweep; returns ``(header, rows)`` with one row per value."""
    header = sweep_header(spec)
    want_mc = spec.mc_trials > 0 and ("pe_mc" in spec.outputs or "se" in spec.outputs)
    want_counts = spec.mc_trials > 0 and "counts_mc" in spec.outputs
    pe_keys = [k for k in ("pe0", "pe1", "pe") if k in spec.outputs]

    analytic_pe = {}
    mc_by_value = {}
    mc_errors = {}
    count_by_value = {}
    count_errors = {}
    if spec.axis == "eta":
        if pe_keys:
            try:
                pe0, pe1, pe = ber_analytic.pe_curves(spec.base, [int(v) for v in spec.values])
                analytic_pe = {
                    v: {"pe0": pe0[i], "pe1": pe1[i], "pe": pe[i]}
                    for i, v in enumerate(spec.values)
                }
            except McvdLinkError as err:
                analytic_pe = {
                    v: {k: f"ERR:{err.code}" for k in ("pe0", "pe1", "pe")}
                    for v in spec.values
                }
        if want_mc:
            try:
                estimates = _mc_sweep(
                    spec.base, [int(v) for v in spec.values], spec.mc_trials, spec.seed
                )
                mc_by_value = dict(zip(spec.values, estimates))
            except McvdLinkError as err:
                mc_errors = {v: err.code for v in spec.values}
    elif want_mc:
        children = np.random.SeedSequence(spec.seed).spawn(len(spec.values))
        for value, child in zip(spec.values, children):
            cfg_v = _cfg_at(spec.base, spec.axis, value)
            try:
                mc_by_value[value] = _mc_sweep(
                    cfg_v, [cfg_v.receiver.eta], spec.mc_trials, child
                )[0]
            except McvdLinkError as err:
                mc_errors[value] = err.code

    if want_counts:
        # Separate sub-stream family from the error-rate runs, so requesting
        # both never correlates the two estimators.
        children = np.random.SeedSequence((spec.seed, 1)).spawn(len(spec.values))
        shared = None
        for value, child in zip(spec.values, children):
            cfg_v = _cfg_at(spec.base, spec.axis, value)
            try:
                if spec.axis == "eta":
                    # Counts do not depend on the threshold.
                    if shared is None:
                        shared = montecarlo.estimate_expected_counts(
                            cfg_v, spec.mc_trials, children[0]
                        )
                    count_by_value[value] = shared
                else:
                    count_by_value[value] = montecarlo.estimate_expected_counts(
                        cfg_v, spec.mc_trials, child
                    )
            except McvdLinkError as err:
                count_errors[value] = err.code

    rows = []
    for value in spec.values:
        cfg_v = _cfg_at(spec.base, spec.axis, value)
        eta_v = int(value) if spec.axis == "eta" else cfg_v.receiver.eta
        row = [value]
        breakdown = None
        for key in spec.outputs:
            if key == "E_S":
                row.append(_guard(lambda: expected_signal(cfg_v)))
            elif key == "E_M":
                row.append(_guard(lambda: expected_interference(cfg_v)))
            elif key == "E_T":
                row.append(_guard(lambda: expected_total(cfg_v)))
            elif key == "E_M_inf":
                row.append(_guard(lambda: expected_interference_infinite_slot(cfg_v)))
            elif key in ("pe0", "pe1", "pe"):
                if spec.axis == "eta":
                    row.append(analytic_pe[value][key])
                else:
                    if breakdown is None:
                        breakdown = _guard(lambda: ber_analytic.pe_total(cfg_v, eta_v))
                    if isinstance(breakdown, str):
                        row.append(breakdown)
                    else:
                        row.append(getattr(breakdown, key))
            elif key in ("pe_mc", "se"):
                est = mc_by_value.get(value)
                if est is None:
                    code = mc_errors.get(value)
                    row.extend([f"ERR:{code}" if code else ""] * 3)
                elif key == "pe_mc":
                    row.extend([est.pe0_hat, est.pe1_hat, est.pe_hat])
                else:
                    row.extend([est.se0, est.se1, est.pe_se(cfg_v.p1)])
            elif key == "counts_mc":
                est = count_by_value.get(value)
                if est is None:
                    code = count_errors.get(value)
                    row.extend([f"ERR:{code}" if code else ""] * 6)
                else:
                    row.extend(
                        [est.e_s_hat, est.e_m_hat, est.e_t_hat, est.se_s, est.se_m, est.se_t]
                    )
        rows.append(row)
    return header, rows


def run_cir_table(cfg: LinkConfig, axis: str, values) -> tuple:
    """Channel-fraction table: over distance (at t = Ts) or over time (at r_d)."""
    if axis == "r_d":
        header = ["r_d", "h", "h_inf"]
        rows = [
            [
                v,
                cir_fraction(cfg.Ts, float(v), cfg.medium, cfg.receiver.a),
                cir_fraction_infinite_time(float(v), cfg.medium, cfg.receiver.a),
            ]
            for v in values
        ]
    elif axis == "t":
        r_d = cfg.fixed_distance()
        header = ["t", "h"]
        rows = [[v, cir_fraction(float(v), r_d, cfg.medium, cfg.receiver.a)] for v in values]
    else:
        raise DomainError(f"cir axis must be 'r_d' or 't', got {axis!r}")
    return header, rows


@dataclass(frozen=True)
class ValidationRow:
    eta: int
    pe0: float
    pe0_mc: float
    z0: float
    pe1: float
    pe1_mc: float
    z1: float
    pe: float
    pe_mc: float
    z: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple
    trials: int
    seed: int
    all_pass: bool

    def to_table(self) -> tuple:
        header = [
            "eta",
            "pe0",
            "pe0_mc",
            "z0",
            "pe1",
            "pe1_mc",
            "z1",
            "pe",
            "pe_mc",
            "z",
            "status",
        ]
        rows = [
            [
                r.eta,
                r.pe0,
                r.pe0_mc,
                r.z0,
                r.pe1,
                r.pe1_mc,
                r.z1,
                r.pe,
                r.pe_mc,
                r.z,
                "PASS" if r.passed else "FAIL",
            ]
            for r in self.rows
        ]
        return header, rows


def _z_score(analytic: float, estimate: float, se_hat: float, trials: int) -> float:
    """|analytic - estimate| in units of a defensible standard error.

    Uses the larger of the empirical binomial SE and the SE implied by the
    analytic probability, so a zero-count estimate of a tiny probability is
    judged against the correct null scale instead of dividing by zero.
    """
    se_null = math.sqrt(max(analytic, 0.0) * max(1.0 - analytic, 0.0) / trials)
    se = max(se_hat, se_null)
    delta = abs(analytic - estimate)
    if delta == 0.0:
        return 0.0
    if se == 0.0:
        return math.inf
    return delta / se


def validate(cfg: LinkConfig, eta_range, trials: int, seed) -> ValidationReport:
    """Compare the analytic error probabilities against the simulator per threshold.

    A row passes when every one of Pe|0, Pe|1 and Pe agrees within 3 standard
    errors; the report's ``all_pass`` drives the CLI exit status.
    """
    if trials < 1000:
        raise DomainError("validation needs at least 1000 trials per bit")
    etas = [int(e) for e in eta_range]
    pe0, pe1, pe = ber_analytic.pe_curves(cfg, etas)
    estimates = _mc_sweep(cfg, etas, trials, seed)
    rows = []
    for i, (eta, est) in enumerate(zip(etas, estimates)):
        z0 = _z_score(float(pe0[i]), est.pe0_hat, est.se0, trials)
        z1 = _z_score(float(pe1[i]), est.pe1_hat, est.se1, trials)
        z = _z_score(float(pe[i]), est.pe_hat, est.pe_se(cfg.p1), trials)
        rows.append(
            ValidationRow(
                eta=eta,
                pe0=float(pe0[i]),
                pe0_mc=est.pe0_hat,
                z0=z0,
                pe1=float(pe1[i]),
                pe1_mc=est.pe1_hat,
                z1=z1,
                pe=float(pe[i]),
                pe_mc=est.pe_hat,
                z=z,
                passed=max(z0, z1, z) <= 3.0,
            )
        )
    seed_label = estimates[0].seed if estimates else None
    return ValidationReport(
        rows=tuple(rows),
        trials=trials,
        seed=seed_label if seed_label is not None else -1,
        all_pass=all(r.passed for r in rows),
    )


@dataclass(frozen=True)
class ThresholdReport:
    eta_star: int
    pe_star: float
    etas: tuple
    pe0: tuple
    pe1: tuple
    pe: tuple

    def to_table(self) -> tuple:
        header = ["eta", "pe0", "pe1", "pe"]
        rows = [
            [e, p0, p1, p]
            for e, p0, p1, p in zip(self.etas, self.pe0, self.pe1, self.pe)
        ]
        return header, rows


def find_threshold(cfg: LinkConfig, eta_max: int = 200) -> ThresholdReport:
    """Exhaustive threshold search with the full curve attached."""
    etas = list(range(1, int(eta_max) + 1))
    pe0, pe1, pe = ber_analytic.pe_curves(cfg, etas)
    best = int(np.argmin(pe))
    return ThresholdReport(
        eta_star=etas[best],
        pe_star=float(pe[best]),
        etas=tuple(etas),
        pe0=tuple(float(x) for x in pe0),
        pe1=tuple(float(x) for x in pe1),
        pe=tuple(float(x) for x in pe),
    )


def format_cell(value) -> str:
    """Serialize one CSV cell; floats use 17 significant digits."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    raise DomainError(f"cannot serialize cell {value!r}")


def write_csv(stream, header, rows) -> None:
    """Write the table with a header row, UTF-8 text, LF line endings."""
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(format_cell(cell) for cell in row) + "\n")
