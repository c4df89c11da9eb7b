"""
Command line: ``permlab VERB --seed S [options]``.

A ``--config`` file holds flat ``key = value`` lines using the long option
names (dashes or underscores); options given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import sys

from permlab.lab.harness import EXIT_USAGE, EXPERIMENTS, ExperimentConfig, UsageError, run

_INT_KEYS = ("seed", "n", "m", "steps", "grid_size", "samples")
_STR_KEYS = ("kind", "a", "b", "format", "output_dir")


def read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "out":
                key = "output_dir"
            if key.startswith("tol_"):
                values.setdefault("tolerances", {})[key[4:]] = float(value)
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _STR_KEYS:
                values[key] = value
            else:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permlab", description="Permutation process experiments.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--seed", type=int, help="random seed (required, here or in the config file)")
    parser.add_argument("--out", dest="output_dir", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--config", help="flat key = value file; flags override it")
    parser.add_argument("--n", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--grid-size", dest="grid_size", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--kind", choices=("identity", "reverse", "lebesgue", "archimedean"))
    parser.add_argument("--a", help="first permutation: id, rev or random")
    parser.add_argument("--b", help="second permutation: id, rev or random")
    parser.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a tolerance")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in _INT_KEYS + _STR_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    for item in args.tol:
        if "=" not in item:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        values.setdefault("tolerances", {})[name] = float(value)
    if values.get("seed") is None:
        raise UsageError("--seed is required")
    return ExperimentConfig(experiment=args.experiment, **values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        config = config_from_args(args)
        code = run(config)
    except (UsageError, OSError) as exc:
        print(f"permlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if code:
        with open(f"{config.output_dir}/diagnostic.json") as fh:
            print(json.dumps(json.load(fh)["failures"]), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
