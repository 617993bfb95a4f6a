"""Command-line front end.

Exit codes: 0 success, 1 invariant or assertion failure, 2 usage or config error.
"""

import argparse
import json
import sys

import jsonschema

from catvisc.config import (
    COUNTEREXAMPLE_SCHEMA,
    LEMMA_REPORT_SCHEMA,
    SUMMARY_SCHEMA,
    build_config,
    build_point,
    load_config,
)
from catvisc.errors import ConfigError, DivergenceError, GeometryError, InvariantError
from catvisc.glued import GluedSpace, n_property_witness
from catvisc.lemmas import SUITES, run_suites
from catvisc.projections import project_fixset
from catvisc.viscosity import run_halpern, run_viscosity, trace_summary

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(obj, schema, path):
    jsonschema.validate(obj, schema)
    text = _dump(obj)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_error(exc):
    where = f" at {exc.pointer}" if exc.pointer else ""
    tag = f" [{exc.hypothesis}]" if exc.hypothesis else ""
    print(f"config error{tag}{where}: {exc}", file=sys.stderr)
    return EXIT_USAGE


# -- subcommands -----------------------------------------------------------------

def cmd_iterate(args, halpern=False):
    try:
        doc = load_config(args.config)
        cfg = build_config(doc, seed=args.seed)
        explore = args.explore_no_N
        trace = run_halpern(cfg, explore=explore) if halpern else run_viscosity(cfg, explore=explore)
    except ConfigError as exc:
        return _config_error(exc)
    except InvariantError as exc:
        print(f"invariant violated at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DivergenceError as exc:
        print(f"oracle failed: {exc}", file=sys.stderr)
        return EXIT_FAIL

    out = doc.get("output", {})
    trace_path = args.trace or out.get("trace")
    if trace_path:
        trace.write_csv(trace_path)
    summary = trace_summary(trace)
    summary["q_residual"] = float(trace.hypotheses["q-residual"])
    if isinstance(cfg.space, GluedSpace):
        summary["exploratory"] = True
    _emit(summary, SUMMARY_SCHEMA, args.out or out.get("summary"))
    print(
        f"{summary['mode']}: {summary['iterations']} steps, final d_q = {summary['final']['d_q']:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK


def _round15(obj):
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    return obj


def _text_report(rep):
    lines = ["Glued complex: two flat triangles sharing the segment [C, D]", ""]
    for name, p in rep["points"].items():
        x, y, z = p["ambient"]
        lines.append(f"  {name} = ({x:.12g}, {y:.12g}, {z:.12g})   face {p['face']}")
    lines.append("")
    lines.append("Projections onto [C, E]:")
    for name, r in rep["projections"].items():
        x, y, z = r["point"]
        lines.append(
            f"  {name:<16} = ({x:.12g}, {y:.12g}, {z:.12g})   distance {r['distance']:.12g}"
        )
    lines.append("")
    for name, v in rep["distances"].items():
        lines.append(f"  {name} = {v:.15g}")
    lines.append("")
    for name, ok in rep["checks"].items():
        lines.append(f"  [{'ok' if ok else 'FAILED'}] {name}")
    lines.append("")
    lines.append(f"N-property: {rep['verdict']}")
    return "\n".join(lines) + "\n"


def cmd_counterexample(args):
    rep = n_property_witness()
    if args.format == "json":
        _emit(_round15(rep), COUNTEREXAMPLE_SCHEMA, args.out)
    else:
        text = _text_report(rep)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK if all(rep["checks"].values()) and rep["verdict"] == "VIOLATED" else EXIT_FAIL


def cmd_lemmas(args):
    reports = run_suites(args.suite, args.trials, args.seed, mutate=args.mutate)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{status} {r.name:<22} trials={r.trials} worst_margin={r.worst_margin:.3e} "
            f"tol={r.tolerance:.0e} failures={r.failure_count} ({r.elapsed:.2f}s)",
            file=sys.stderr,
        )
    passed = all(r.passed for r in reports)
    doc = {
        "seed": args.seed,
        "trials": args.trials,
        "passed": passed,
        "suites": [r.to_dict() for r in reports],
    }
    _emit(doc, LEMMA_REPORT_SCHEMA, args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_project(args):
    try:
        doc = load_config(args.config)
        cfg = build_config(doc, seed=args.seed)
        try:
            coords = json.loads(args.point)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--point is not JSON: {exc}", "point") from exc
        x = build_point(cfg.space, coords, "--point")
        fs = cfg.T.fix_set()
        p = project_fixset(fs, x)
    except ConfigError as exc:
        return _config_error(exc)
    except GeometryError as exc:
        print(f"projection failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sp = cfg.space
    out = {
        "fix_set": fs.kind,
        "point": [float(v) for v in sp.coords(p)],
        "distance": float(sp.dist(x, p)),
    }
    sys.stdout.write(_dump(out))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="catvisc",
        description="Two-step fixed-point scheme with a contraction on curved model spaces, plus inequality checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("iterate", "run the two-step viscosity iteration from a JSON config"),
        ("halpern", "run the same config with f replaced by the constant map onto u"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True)
        p.add_argument("--trace", help="CSV trace output path")
        p.add_argument("--out", help="JSON summary output path (default: stdout)")
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument(
            "--explore-no-N", dest="explore_no_N", action="store_true",
            help="allow the glued space, which fails the N-property (reported, never asserted)",
        )

    p = sub.add_parser("counterexample", help="reproduce the N-property failure witness")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("lemmas", help="run the randomized inequality suites")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--mutate", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("project", help="project a point onto Fix T of a config")
    p.add_argument("--config", required=True)
    p.add_argument("--point", required=True, help="JSON coordinates, e.g. '[0.3, 0.7]'")
    p.add_argument("--seed", type=_seed, default=0)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "iterate":
        return cmd_iterate(args)
    if args.command == "halpern":
        return cmd_iterate(args, halpern=True)
    if args.command == "counterexample":
        return cmd_counterexample(args)
    if args.command == "lemmas":
        return cmd_lemmas(args)
    return cmd_project(args)


if __name__ == "__main__":
    sys.exit(main())
