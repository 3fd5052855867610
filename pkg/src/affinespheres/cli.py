"""Command-line front end.

Subcommands mirror the run-config tasks; every one accepts --config plus
the common overrides, and a few take convenience flags so quick runs do
not need a config file:

    affinespheres catalog --name helicoidal-g3 --set c=1 --set m=2 --set a=1
    affinespheres cauchy --a "s^2/2" --b "0" --out results
    affinespheres classify --name helicoidal-g3 --set a=1 --set c=1 --set m=2

Exit codes: 0 all gates pass, 2 configuration error, 3 numeric gate failed.
"""

from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional

from .errors import AffineSphereError, ConfigError
from .workbench import TASKS, load_config, parse_grid, run


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", "-c", help="TOML run configuration")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--format", choices=("obj", "csv"), help="mesh format")
    p.add_argument("--grid", help="grid size NSxNT, e.g. 41x41")
    p.add_argument("--tol", type=float, help="quadrature absolute tolerance")
    p.add_argument("--seed", type=int, help="seed for sweep sampling")


def _kv_pairs(items: Optional[List[str]]) -> Dict[str, float]:
    out: Dict[str, float] = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            out[k.strip()] = v.strip()  # expressions (e.g. ruled g)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinespheres",
        description="Indefinite improper affine spheres: construct, classify, verify.",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run the {task} task")
        _common_flags(p)
        if task in ("catalog", "classify"):
            p.add_argument("--name", help="catalog entry name")
            p.add_argument("--set", action="append", dest="set_params", metavar="K=V")
        if task == "cauchy":
            p.add_argument("--a", help="initial values a(x)")
            p.add_argument("--b", help="initial y-derivative b(x)")
            p.add_argument("--x0", type=float, help="anchor point")
        if task == "sweep":
            p.add_argument("--count", type=int, help="number of sampled specs")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "out": args.out,
        "format": args.format,
        "grid": parse_grid(args.grid) if args.grid else None,
        "tol": args.tol,
        "seed": args.seed,
    }
    try:
        cfg = load_config(args.config, task=args.task, overrides=overrides)
        if getattr(args, "name", None) or getattr(args, "set_params", None):
            sec = cfg.sections.setdefault("catalog", {})
            if args.name:
                sec["name"] = args.name
            params = sec.setdefault("params", {})
            params.update(_kv_pairs(args.set_params))
        if cfg.task == "cauchy":
            sec = cfg.sections.setdefault("cauchy", {})
            for key in ("a", "b", "x0"):
                val = getattr(args, key, None)
                if val is not None:
                    sec[key] = val
        if cfg.task == "sweep" and getattr(args, "count", None) is not None:
            cfg.sections.setdefault("sweep", {})["count"] = args.count
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AffineSphereError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
