"""Command-line entry point: ``thermal-oqw {walk,ode,reference,sweep,validate}``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigParseError, ConfigValidationError, parse_config
from .ode import IntegrationError
from .runner import run_ode, run_reference, run_sweep, run_validate, run_walk
from .thermal import MODES, ParameterError
from .walk import WalkError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PARAMS = 3
EXIT_RUNTIME = 4
EXIT_VALIDATE = 5


def _nth_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermal-oqw", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("walk", "discrete-time walk"),
        ("ode", "continuous-time block master equation"),
        ("reference", "full atom-cavity master equation"),
        ("sweep", "walks over a list of thermal occupations"),
        ("validate", "normalisation and consistency checks"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--out", help="output directory (overrides out_dir)")
        p.add_argument("--mode", choices=MODES, help="operator mode (overrides the config)")
        p.add_argument("--centered", action="store_true", help="speeds use mu - mu(0)")
        if name == "sweep":
            p.add_argument("--nth", type=_nth_list, required=True, help="comma-separated n_th values")
        if name == "reference":
            p.add_argument("--fock-cutoff", type=int, default=40, help="Fock cutoff n_max (default 40)")
        if name in ("ode", "reference"):
            p.add_argument("--dt-ode", type=float, help="RK4 step (default: dt/10, tighter for reference)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cfg = parse_config(text)
        if args.mode:
            cfg = cfg.with_changes(mode=args.mode)
    except ConfigParseError as exc:
        print(f"config parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigValidationError, ParameterError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS

    try:
        if args.command == "walk":
            result = run_walk(cfg, args.out, args.centered)
        elif args.command == "ode":
            result = run_ode(cfg, args.out, args.centered, args.dt_ode)
        elif args.command == "reference":
            result = run_reference(cfg, args.fock_cutoff, args.out, args.centered, args.dt_ode)
        elif args.command == "sweep":
            run_sweep(cfg, args.nth, args.out, args.centered)
            print(f"wrote sweep.csv to {args.out or cfg.out_dir}")
            return EXIT_OK
        else:
            return EXIT_OK if run_validate(cfg) else EXIT_VALIDATE
    except (ConfigValidationError, ParameterError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (WalkError, IntegrationError) as exc:
        print(f"runtime invariant breach: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    last = result.records[-1]
    print(f"{args.command}: step {last.step}, mu = {last.mu:.6f}, sigma2 = {last.sigma2:.6f} -> {result.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
