"""Command-line front end.

Subcommands::

    mcvdlink cir                --axis r_d --values 6,8,12,20
    mcvdlink expectations       --axis r_d --values 6:40
    mcvdlink ber-sweep          --axis eta --values 1:30 --trials 100000
    mcvdlink validate           --values 1:30 --trials 100000
    mcvdlink optimal-threshold  --eta-max 200

Settings come from built-in defaults, overridden by ``--config`` (flat
``key=value`` file), overridden by command-line flags. All tables are CSV with
a header row; pass ``--out`` to write a file instead of stdout. Identical
flags and seed reproduce identical bytes.
"""

from __future__ import annotations

import argparse
import sys

from .errors import DomainError, McvdLinkError
from .experiments import (
    SweepSpec,
    build_link_config,
    find_threshold,
    parse_config_file,
    run_cir_table,
    run_sweep,
    validate,
    write_csv,
)


def parse_values(text: str):
    """Axis points: ``a,b,c`` or an inclusive integer range ``lo:hi[:step]``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise DomainError(f"bad range {text!r}; expected lo:hi or lo:hi:step")
            lo, hi = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) == 3 else 1
            if step < 1 or hi < lo:
                raise DomainError(f"bad range {text!r}")
            return tuple(range(lo, hi + 1, step))
        values = tuple(float(v) for v in text.split(","))
    except ValueError as err:
        raise DomainError(f"bad --values {text!r}: {err}") from err
    if all(v == int(v) for v in values):
        return tuple(int(v) for v in values)
    return values


def parse_tagged(text: str) -> dict:
    """``fixed:<r_d>`` or ``nearest`` into config-key overrides."""
    text = text.strip()
    if text == "nearest":
        return {"tagged_mode": "nearest"}
    if text.startswith("fixed:"):
        try:
            return {"tagged_mode": "fixed", "r_d": float(text.split(":", 1)[1])}
        except ValueError as err:
            raise DomainError(f"bad --tagged distance in {text!r}") from err
    raise DomainError(f"--tagged must be 'fixed:<r_d>' or 'nearest', got {text!r}")


def _add_common(sub):
    sub.add_argument("--config", help="flat key=value settings file")
    sub.add_argument("--out", help="output CSV path (default: stdout)")
    sub.add_argument("--seed", type=int, default=0, help="base RNG seed")
    sub.add_argument("--tagged", help="tagged mode: fixed:<r_d> or nearest")
    sub.add_argument("--eta", type=int, help="decision threshold override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcvdlink",
        description="Link-level analysis of diffusive molecular communication "
        "with Poisson-field interference.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("cir", help="channel fraction over distance or time")
    _add_common(p)
    p.add_argument("--axis", choices=("r_d", "t"), default="r_d")
    p.add_argument("--values", required=True)

    p = subs.add_parser("expectations", help="expected molecule counts along an axis")
    _add_common(p)
    p.add_argument("--axis", choices=("r_d", "lambda", "Ts", "mu"), default="r_d")
    p.add_argument("--values", required=True)
    p.add_argument(
        "--outputs",
        default="E_S,E_M,E_T",
        help="comma-separated output keys (default E_S,E_M,E_T; E_M_inf available)",
    )
    p.add_argument(
        "--trials",
        type=int,
        default=0,
        help="attach Monte Carlo count estimates over this many trials (0 = analytic only)",
    )

    p = subs.add_parser("ber-sweep", help="analytic (and optional MC) error rates")
    _add_common(p)
    p.add_argument("--axis", choices=("eta", "r_d", "lambda", "Ts", "mu"), default="eta")
    p.add_argument("--values", required=True)
    p.add_argument("--trials", type=int, default=0, help="MC trials per bit (0 = analytic only)")

    p = subs.add_parser("validate", help="3-sigma agreement report, analytic vs MC")
    _add_common(p)
    p.add_argument("--values", default="1:30", help="threshold range (default 1:30)")
    p.add_argument("--trials", type=int, default=10_000, help="MC trials per bit")

    p = subs.add_parser("optimal-threshold", help="exhaustive threshold search")
    _add_common(p)
    p.add_argument("--eta-max", type=int, default=200)

    return parser


def _settings_from(args) -> dict:
    settings = {}
    if args.config:
        settings.update(parse_config_file(args.config))
    if args.tagged:
        settings.update(parse_tagged(args.tagged))
    if args.eta is not None:
        settings["eta"] = args.eta
    return settings


def _emit(args, header, rows) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, header, rows)
    else:
        write_csv(sys.stdout, header, rows)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, eta = build_link_config(_settings_from(args))

        if args.command == "cir":
            header, rows = run_cir_table(cfg, args.axis, parse_values(args.values))
            _emit(args, header, rows)
            return 0

        if args.command == "expectations":
            outputs = tuple(k.strip() for k in args.outputs.split(",") if k.strip())
            if args.trials > 0 and "counts_mc" not in outputs:
                outputs += ("counts_mc",)
            spec = SweepSpec(
                base=cfg,
                axis=args.axis,
                values=parse_values(args.values),
                outputs=outputs,
                mc_trials=args.trials,
                seed=args.seed,
            )
            header, rows = run_sweep(spec)
            _emit(args, header, rows)
            return 0

        if args.command == "ber-sweep":
            outputs = ("pe0", "pe1", "pe")
            if args.trials > 0:
                outputs += ("pe_mc", "se")
            spec = SweepSpec(
                base=cfg,
                axis=args.axis,
                values=parse_values(args.values),
                outputs=outputs,
                mc_trials=args.trials,
                seed=args.seed,
            )
            header, rows = run_sweep(spec)
            _emit(args, header, rows)
            return 0

        if args.command == "validate":
            report = validate(cfg, parse_values(args.values), args.trials, args.seed)
            header, rows = report.to_table()
            _emit(args, header, rows)
            if not report.all_pass:
                print("validation FAILED", file=sys.stderr)
                return 1
            return 0

        if args.command == "optimal-threshold":
            report = find_threshold(cfg, args.eta_max)
            header, rows = report.to_table()
            _emit(args, header, rows)
            print(
                f"eta_star={report.eta_star} pe_star={report.pe_star:.17g}",
                file=sys.stderr,
            )
            return 0
    except McvdLinkError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
