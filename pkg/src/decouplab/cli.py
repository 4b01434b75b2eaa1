"""``decouplab`` command line: one subcommand per check plus the config-driven suite."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .model import ModelError
from .problab import ResourceCapError
from .suite import (
    EXIT_USAGE,
    CheckResult,
    ConfigError,
    default_config_text,
    exit_status,
    parse_config,
    run_check,
    run_suite,
)


def _float_list(text, allow_zero=False):
    try:
        vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals or any(v < 0 or (v == 0 and not allow_zero) for v in vals):
        raise argparse.ArgumentTypeError("grid values must be positive" + (" or zero" if allow_zero else ""))
    return vals


def _t_list(text):
    return _float_list(text, allow_zero=True)


def _json_or_name(text):
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise argparse.ArgumentTypeError(f"invalid JSON: {exc.msg}") from exc
    return text


def _common(p, kernel=True):
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--replicates", type=int, default=10**5)
    g.add_argument("--engine", choices=("exact", "mc"), default="exact")
    g.add_argument("--t-grid", type=_t_list, default=None, help="comma-separated thresholds")
    g.add_argument("--confidence", type=float, default=0.95)
    g.add_argument("--out", choices=("json", "csv"), default="json")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--norm", default="absolute", help="abs, l2, sup or p=<value>")
    g.add_argument("--cap", type=int, default=None, help="outcome cap for exact enumeration")
    if kernel:
        g.add_argument("--kernel", type=_json_or_name, default="xy",
                       help="xy, distance, zero, one, antisymmetric, or a kernel JSON object")
        g.add_argument("--dist", type=_json_or_name, default="rademacher",
                       help="rademacher, two_atom, point, or a distribution JSON object")
        g.add_argument("--n", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decouplab",
                                     description="Exact and Monte Carlo checks of decoupling inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", help="four-term sign identities on a random integer corpus")
    p.add_argument("--instances", type=int, default=1000)
    _common(p, kernel=False)

    p = sub.add_parser("lemma1", help="three-copy tail bound, exact")
    p.add_argument("--family", type=int, default=None, help="sweep this many small finite laws instead of --dist")
    _common(p)

    p = sub.add_parser("falsify-symmetrization", help="counterexamples to a universal symmetrization bound")
    p.add_argument("--c-values", type=_float_list, default=None)
    _common(p, kernel=False)

    p = sub.add_parser("prop1", help="anti-concentration bound kappa/4, exact")
    p.add_argument("--a", type=_float_list, default=None, help="shift vector; omit to run the random corpus")
    p.add_argument("--instances", type=int, default=500)
    _common(p)

    for name, help_text in (("lemma2", "chaos lower bound P(|chaos| >= |x|)"),
                            ("chaos-moments", "hypercontractivity ratios of chaos forms")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--form", type=_json_or_name, default=None, help='JSON {"x":..,"a":[..],"b":[[..]]}')
        p.add_argument("--instances", type=int, default=1000)
        p.add_argument("--n-max", type=int, default=12)
        _common(p, kernel=False)

    p = sub.add_parser("decompose", help="tail decompositions of the k=2 proof, exact")
    p.add_argument("--which", choices=("4", "symmetric", "5", "6", "all"), default="all")
    p.add_argument("--instances", type=int, default=None, help="run on a random kernel corpus")
    _common(p)

    p = sub.add_parser("tails", help="tail curve of a statistic")
    p.add_argument("--statistic", default="coupled",
                   choices=("coupled", "decoupled", "T_n", "mixed"))
    _common(p)

    p = sub.add_parser("find-constant", help="smallest grid constant for either direction")
    p.add_argument("--direction", choices=("1", "2", "decoupling", "reverse"), default="1")
    p.add_argument("--c-grid", type=_float_list, default=None)
    p.add_argument("--instances", type=int, default=None)
    _common(p)

    p = sub.add_parser("graph-demo", help="D1 versus D2 for a random point cloud")
    p.add_argument("--N", type=int, default=3, help="ambient dimension")
    p.add_argument("--points", type=int, default=30, help="number of points n")
    p.add_argument("--atoms", type=_json_or_name, default=None,
                   help="JSON list of atoms for a finite law (default: uniform cube)")
    p.add_argument("--c-grid", type=_float_list, default=None)
    _common(p, kernel=False)

    p = sub.add_parser("suite", help="run a JSON config and write a report bundle")
    p.add_argument("config", nargs="?", help="config path (default: the shipped config)")
    p.add_argument("--bundle", default="decouplab-report", help="output directory")
    p.add_argument("--print-default", action="store_true", help="print the shipped config and exit")
    p.add_argument("--quiet", action="store_true")
    return parser


def _settings(args) -> dict:
    s = {"seed": args.seed, "replicates": args.replicates, "engine": args.engine,
         "confidence": args.confidence, "workers": args.workers, "norm": args.norm}
    if args.cap is not None:
        s["cap"] = args.cap
    if args.t_grid is not None:
        s.setdefault("grids", {})["t"] = args.t_grid
    if getattr(args, "c_grid", None) is not None:
        s.setdefault("grids", {})["C"] = args.c_grid
    for key in ("kernel", "n", "instances", "family", "form", "statistic", "direction"):
        v = getattr(args, key, None)
        if v is not None:
            s[key] = v
    if getattr(args, "dist", None) is not None:
        s["distribution"] = args.dist
    if getattr(args, "n_max", None) is not None:
        s["n_max"] = args.n_max
    if getattr(args, "a", None) is not None:
        s["a"] = args.a
    if getattr(args, "c_values", None) is not None:
        s["c_values"] = args.c_values
    return s


def _plan(args):
    s = _settings(args)
    cmd = args.command
    if cmd == "decompose":
        names = {"4": ["decomposition4"], "symmetric": ["symmetric_reverse"], "5": ["inequality5"],
                 "6": ["inequality6"]}.get(args.which,
                                           ["decomposition4", "symmetric_reverse", "inequality5", "inequality6"])
        return [(name, s) for name in names]
    if cmd == "graph-demo":
        cloud = {"n": args.points, "N": args.N}
        if args.atoms is not None:
            cloud["atoms"] = args.atoms
        s["cloud"] = cloud
        return [("graph_demo", s)]
    name = {"falsify-symmetrization": "falsify_symmetrization", "chaos-moments": "chaos_moments",
            "find-constant": "find_constant"}.get(cmd, cmd)
    return [(name, s)]


def _validate(plan):
    doc = {"checks": [{"check": name, **settings} for name, settings in plan]}
    return parse_config(doc)


def result_csv(result: CheckResult) -> str:
    """Plot-ready CSV: tail curves as (t, p, ci_lo, ci_hi), row lists as tables."""
    d = result.to_dict()["payload"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "grid" in d and "values" in d:
        ci = d.get("ci") or [[None, None]] * len(d["grid"])
        w.writerow(["t", "p", "ci_lo", "ci_hi"])
        for t, p, (lo, hi) in zip(d["grid"], d["values"], ci):
            w.writerow([t, p, "" if lo is None else lo, "" if hi is None else hi])
        return buf.getvalue()
    rows = d.get("rows")
    if isinstance(rows, list) and rows and isinstance(rows[0], dict):
        cols = list(dict.fromkeys(k for r in rows for k in r))
        dw = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        dw.writeheader()
        for r in rows:
            dw.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()
    w.writerow(["check", "status", "detail"])
    w.writerow([result.check, result.status, result.detail])
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "suite":
        if args.print_default:
            sys.stdout.write(default_config_text())
            return 0
        config = args.config
        try:
            if config is None:
                result = run_suite(default_config_text(), args.bundle,
                                   echo=None if args.quiet else print)
            else:
                result = run_suite(config, args.bundle, echo=None if args.quiet else print)
        except (ConfigError, FileNotFoundError) as exc:
            print(f"decouplab: config error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if not args.quiet:
            print(f"bundle written to {result.bundle}; exit status {result.exit_code}")
        return result.exit_code
    try:
        plan = _validate(_plan(args))
    except (ConfigError, ModelError) as exc:
        print(f"decouplab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    results = []
    for name, settings in plan:
        try:
            results.append(run_check(name, settings))
        except ModelError as exc:
            print(f"decouplab: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ResourceCapError as exc:  # pragma: no cover - run_check converts these
            print(f"decouplab: {exc}", file=sys.stderr)
            return 3
    for r in results:
        if args.out == "json":
            print(json.dumps(r.to_dict(), sort_keys=True, indent=1))
        else:
            sys.stdout.write(result_csv(r))
    return exit_status(r.status for r in results)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
