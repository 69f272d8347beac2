"""Command-line batch runner: ``macroprob <scenario> [--config PATH] [flags]``.

Flags override fields of the JSON config and carry the same names.
Exit codes: 0 success, 1 internal error, 2 config error, 3 impossible
post-selection in a single-point run.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import SCENARIOS, load_config, parse_sweep, validate_config
from .errors import ConfigError
from .runner import format_records, run

log = logging.getLogger("macroprob")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_IMPOSSIBLE = 0, 1, 2, 3


def _selection(text: str):
    out = []
    for item in text.split(","):
        item = item.strip()
        out.append(item if item in ("modal", "max", "min") else int(item))
    return out


def _floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macroprob", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS + ("run",):
        p = sub.add_parser(name, help="scenario taken from --config" if name == "run" else f"{name} scenario")
        p.add_argument("--config", type=Path)
        p.add_argument("--n", help="comma list or start:factor:count")
        p.add_argument("--epsilon", help="comma list or start:factor:count")
        p.add_argument("--width", type=float, help="fixed pointer width when no epsilon is given")
        p.add_argument("--c-plus-sq", type=float)
        p.add_argument("--theta", type=float)
        p.add_argument("--phi", type=float)
        p.add_argument("--n-plus", type=_selection, help="comma list of counts or modal/max/min")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--orders", type=int)
        p.add_argument("--levels", type=_floats)
        p.add_argument("--probs", type=_floats)
        p.add_argument("--random-states", type=int)
        p.add_argument("--pairs", type=int)
        p.add_argument("--convention", choices=("rotation", "minimum_uncertainty"))
        p.add_argument("--dense-cap", type=int)
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", type=Path)
        p.add_argument("--timing", action="store_true", default=None, help="fill the wall_ms column")
    return parser


_FIELDS = (
    "width", "c_plus_sq", "theta", "phi", "n_plus", "trials", "seed", "orders", "levels",
    "probs", "random_states", "pairs", "convention", "dense_cap", "format", "timing",
)


def config_from_args(args: argparse.Namespace) -> dict:
    data = load_config(args.config) if args.config else {}
    if args.scenario != "run":
        if "scenario" in data and data["scenario"] != args.scenario:
            raise ConfigError("scenario", f"config says {data['scenario']!r} but subcommand is {args.scenario!r}")
        data["scenario"] = args.scenario
    elif "scenario" not in data:
        raise ConfigError("scenario", "the run subcommand needs a config with a scenario")
    if args.n is not None:
        data["n"] = parse_sweep(args.n, int)
    if args.epsilon is not None:
        data["epsilon"] = parse_sweep(args.epsilon, float)
    for name in _FIELDS:
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if args.out is not None:
        data["out"] = str(args.out)
    return data


def _single_point(cfg) -> bool:
    eps = cfg.epsilon_values() or [None]
    return len(cfg.n_values()) == 1 and len(eps) == 1 and len(cfg.n_plus or ()) == 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = validate_config(config_from_args(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        log.info("running %s", cfg.scenario)
        records = run(cfg)
        text = format_records(records, cfg.format)
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
    except Exception as exc:  # noqa: BLE001 - reported through the exit code
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    errors = [r for r in records if r.is_error]
    if errors and cfg.scenario == "postselect" and _single_point(cfg):
        print(f"impossible post-selection: {errors[0].metric}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
