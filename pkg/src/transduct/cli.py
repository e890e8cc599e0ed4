"""Command-line entry point: ``transduct <subcommand> ...``.

Every subcommand prints a JSON report (or writes it with ``--out``) and
exits 0 only if every inequality the report asserts holds. ``--csv`` writes
the report's main table as CSV.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .apportion import verify_factor_two
from .experiments import (FAMILIES, CounterexampleSpec, agnostic_gap_search,
                          compactness_sweep, counterexample_family, gap_report,
                          generate_counterexample, pac_bridge_check, sample_complexity_curve)
from .matching import BipartiteGraph, deficiency, prune_degrees, r_matching
from .metric import LabelSpace, as_fraction, validate
from .minimax import AgnosticProblem, default_budget, solve
from .oig import BehaviorTable, build_problem, evaluate
from .properties import run_property_suite


def _read_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return json.loads(text)


def _load_table(path: str) -> BehaviorTable:
    doc = _read_json(path)
    base = None if path == "-" else Path(path).parent
    return BehaviorTable.from_dict(doc, base_dir=base)


def _meta(args, **extra) -> dict:
    meta = {"version": __version__,
            "budget": default_budget() if args.budget is None else args.budget}
    meta.update(extra)
    return meta


def cmd_validate(args) -> dict:
    doc = _read_json(args.file)
    if "edges" in doc:
        g = BipartiteGraph.from_dict(doc)
        return {"document": "graph", "ok": True, "left": g.left, "right": g.right}
    if "rows" in doc:
        table = BehaviorTable.from_dict(doc, base_dir=Path(args.file).parent)
        report = validate(table.space)
        return {"document": "table", "n": table.n, "rows": len(table.rows),
                "space": report.to_dict(), "ok": report.ok, "holds": report.ok}
    report = validate(LabelSpace.from_dict(doc))
    return {"document": "label-space", **report.to_dict(), "holds": report.ok}


def cmd_solve(args) -> dict:
    doc = _read_json(args.file)
    request = doc if "table" in doc else {"table": doc}
    table_doc = request["table"]
    if isinstance(table_doc, str):
        path = Path(table_doc)
        if not path.is_absolute() and args.file != "-":
            path = Path(args.file).parent / path
        table = BehaviorTable.from_dict(json.loads(path.read_text()), base_dir=path.parent)
    else:
        table = BehaviorTable.from_dict(table_doc, base_dir=Path(args.file).parent)
    mode = args.mode or request.get("mode", "realizable")
    solver = args.solver or request.get("solver", "auto")
    seed = args.seed if args.seed is not None else int(request.get("seed", 0))
    budget = args.budget if args.budget is not None else int(request.get("budget", default_budget()))
    args.budget = budget
    if mode == "agnostic":
        agn = AgnosticProblem.from_table(table)
        if len(table.space) ** table.n > budget:
            raise ValueError(f"agnostic system over {len(table.space)}^{table.n} rows exceeds budget")
        problem = agn.to_problem()
    elif mode == "realizable":
        problem = build_problem(table)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sol = solve(problem, solver=solver, seed=seed, budget=budget, restarts=args.restarts)
    ev = evaluate(problem, sol.learner)
    report = sol.to_dict(problem)
    report.update({
        "mode": mode, "seed": seed, "meta": _meta(args),
        "per_row": [{"row": [table.space.labels[y] for y in row], "error": str(e)}
                    for row, e in zip(problem.rows, ev.per_row)],
        "holds": ev.worst == sol.epsilon,
    })
    return report


def cmd_counterexample(args) -> dict:
    if args.gap:
        rep = gap_report(range(2, 6) if args.m is None else [args.m],
                         delta=as_fraction(args.delta))
        rep["meta"] = _meta(args)
        return rep
    spec = CounterexampleSpec(args.m or 3, args.cover, args.k)
    space, table = generate_counterexample(spec)
    sol = solve(build_problem(table), solver="brute", budget=args.budget)
    expected = Fraction(1) if spec.include_full_cover else Fraction(2)
    return {"experiment": "counterexample", "m": spec.m, "k": spec.k,
            "include_full_cover": spec.include_full_cover,
            "space": space.to_dict(), "table": table.to_dict(),
            "xi": str(sol.epsilon), "expected_xi": str(expected),
            "prediction": [space.labels[y] for y in sol.learner.choice][:8],
            "holds": sol.epsilon == expected, "meta": _meta(args)}


def cmd_sweep(args) -> dict:
    rep = compactness_sweep(_load_table(args.file), solver=args.solver, budget=args.budget)
    rep["meta"] = _meta(args)
    return rep


def cmd_pac_check(args) -> dict:
    table = _load_table(args.file)
    est = pac_bridge_check(table, args.n or table.n, args.trials, seed=args.seed,
                           budget=args.budget)
    rep = est.to_dict()
    rep["meta"] = _meta(args)
    return rep


def cmd_curve(args) -> dict:
    if args.family == "counterexample":
        family = counterexample_family(args.m, args.cover)
    else:
        family = FAMILIES[args.family]
    curve = sample_complexity_curve(family, [as_fraction(e) for e in args.eps],
                                    (args.n_min, args.n_max), solver=args.solver,
                                    budget=args.budget)
    rep = curve.to_dict()
    rep["family"] = args.family
    rep["meta"] = _meta(args)
    return rep


def cmd_factor_two(args) -> dict:
    problem = build_problem(_load_table(args.file))
    sol = solve(problem, budget=args.budget)
    epsilon = sol.epsilon if args.epsilon is None else as_fraction(args.epsilon)
    rep = verify_factor_two(problem, epsilon, as_fraction(args.delta), witness=sol.learner,
                            strict=False).to_dict()
    rep["witness_solver"] = sol.solver
    rep["meta"] = _meta(args)
    return rep


def cmd_hall(args) -> dict:
    g = BipartiteGraph.from_dict(_read_json(args.file))
    res = r_matching(g)
    value, witness = deficiency(g)
    rep = {"experiment": "hall", **res.to_dict(), "deficiency": value,
           "deficiency_witness": sorted(witness),
           "holds": res.matched or len(g.neighborhood(res.certificate)) < len(res.certificate)}
    if args.prune:
        rep["pruned"] = prune_degrees(g).to_dict() if res.matched else None
    return rep


def cmd_props(args) -> dict:
    results = run_property_suite(seed=args.seed, scale=args.scale)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  ({r.checked} checked, "
              f"{r.seconds:.2f}s) {r.detail}", file=sys.stderr)
    return {"experiment": "property-suite", "seed": args.seed,
            "results": [r.to_dict() for r in results],
            "holds": all(r.passed for r in results), "meta": _meta(args)}


def cmd_agnostic_gap(args) -> dict:
    rep = agnostic_gap_search(args.instances, seed=args.seed, budget=args.budget)
    rep["meta"] = _meta(args)
    return rep


def _csv_rows(report: dict) -> list[dict] | None:
    for key in ("entries", "per_columns", "per_row", "results"):
        rows = report.get(key)
        if isinstance(rows, list) and rows and isinstance(rows[0], dict):
            return rows
    return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transduct", description=__doc__.splitlines()[0])
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--csv", help="also write the report's main table as CSV")
    parser.add_argument("--budget", type=int, default=None,
                        help="exhaustive-search budget (default: $TRANSDUCT_BUDGET or 2e7)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a label-space, table or graph document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="optimal transductive error of a table")
    p.add_argument("file", help="table JSON or solve-request JSON ('-' for stdin)")
    p.add_argument("--mode", choices=["realizable", "agnostic"])
    p.add_argument("--solver", choices=["auto", "matching", "brute", "local"])
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int, default=20)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("counterexample", help="factor-2 gap instance")
    p.add_argument("--m", type=int)
    p.add_argument("--cover", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--gap", action="store_true", help="report the gap for m = 2..5")
    p.add_argument("--delta", default="1/100")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("sweep", help="solve every finite projection of a table")
    p.add_argument("file")
    p.add_argument("--solver", default="auto", choices=["auto", "matching", "brute"])
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pac-check", help="Monte Carlo leave-one-out check")
    p.add_argument("file")
    p.add_argument("--n", type=int, help="sample size (default: table columns)")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pac_check)

    p = sub.add_parser("curve", help="transductive sample complexity over a scanned range")
    p.add_argument("--family", default="star", choices=sorted(FAMILIES) + ["counterexample"])
    p.add_argument("--m", type=int, default=3, help="counterexample core size")
    p.add_argument("--cover", action=argparse.BooleanOptionalAction, default=False)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--eps", nargs="+", default=["1/2", "1/3", "1/4"])
    p.add_argument("--solver", default="auto")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("factor-two", help="verify the factor-2 learner on a metric table")
    p.add_argument("file")
    p.add_argument("--epsilon", help="defaults to the solver's optimum")
    p.add_argument("--delta", default="1/100")
    p.set_defaults(func=cmd_factor_two)

    p = sub.add_parser("hall", help="R-matching or Hall certificate for a bipartite graph")
    p.add_argument("file")
    p.add_argument("--prune", action="store_true")
    p.set_defaults(func=cmd_hall)

    p = sub.add_parser("props", help="run the seeded invariant corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("agnostic-gap", help="search random classes for agnostic/realizable ratios")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_agnostic_gap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (ValueError, RuntimeError, AssertionError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.csv:
        rows = _csv_rows(report)
        if rows:
            with open(args.csv, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
                writer.writeheader()
                for row in rows:
                    writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v
                                     for k, v in row.items()})
    return 0 if report.get("holds", True) is not False else 1


if __name__ == "__main__":
    sys.exit(main())
