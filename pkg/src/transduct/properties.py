"""Seeded invariant corpus, runnable headless through ``transduct props``."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .apportion import verify_factor_two
from .experiments import (CounterexampleSpec, compactness_sweep, generate_counterexample,
                          random_metric_instance, random_metric_space, random_table,
                          random_zero_one_table)
from .matching import BipartiteGraph, deficiency, optimal_zero_one, r_matching
from .metric import validate, zero_one_space
from .minimax import AgnosticProblem, agnostic_minimax, brute_force_minimax, local_search_minimax
from .oig import build_problem


@dataclass
class PropertyResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def random_graph(rng: random.Random, max_right: int = 8, max_left: int = 10) -> BipartiteGraph:
    right = rng.randint(1, max_right)
    left = rng.randint(0, max_left)
    p = rng.random()
    edges = tuple(tuple(r for r in range(right) if rng.random() < p) for _ in range(left))
    return BipartiteGraph(left, right, edges)


def _matching_vs_brute(rng, count):
    for _ in range(count):
        table = random_zero_one_table(rng, rng.randint(1, 3), rng.randint(2, 3), 5)
        problem = build_problem(table)
        a, b = optimal_zero_one(problem).epsilon, brute_force_minimax(problem).epsilon
        if a != b:
            return f"{table.labelled_rows()}: matching {a} vs brute {b}"
    return ""


def _row_deletion(rng, count):
    for t in range(count):
        if t % 2:
            table = random_zero_one_table(rng, rng.randint(1, 3), 2, 6)
        else:
            table = random_metric_instance(rng, max_n=3, max_labels=4, max_rows=5)
        full = brute_force_minimax(build_problem(table)).epsilon
        for drop in range(len(table.rows)):
            keep = [r for r in range(len(table.rows)) if r != drop]
            if not keep:
                continue
            sub = brute_force_minimax(build_problem(table.project(rows=keep))).epsilon
            if sub > full:
                return f"{table.labelled_rows()} minus row {drop}: {sub} > {full}"
    return ""


def _agnostic_geq_realizable(rng, count):
    for t in range(count):
        k = rng.randint(2, 3)
        n = rng.randint(1, 2)
        space = zero_one_space(range(k)) if t % 2 else random_metric_space(rng, k)
        table = random_table(rng, space, n, 4)
        real = brute_force_minimax(build_problem(table)).epsilon
        agn = agnostic_minimax(AgnosticProblem.from_table(table))[0].epsilon
        if agn < real:
            return f"{table.labelled_rows()}: agnostic {agn} < realizable {real}"
    return ""


def _local_geq_brute(rng, count):
    equal = 0
    for _ in range(count):
        table = random_metric_instance(rng, max_n=3, max_labels=4, max_rows=6)
        problem = build_problem(table)
        exact = brute_force_minimax(problem).epsilon
        approx = local_search_minimax(problem, restarts=10, seed=rng.randrange(2 ** 31)).epsilon
        if approx < exact:
            return f"{table.labelled_rows()}: local {approx} < brute {exact}"
        equal += approx == exact
    if equal < 0.95 * count:
        return f"local search matched the exact value on only {equal}/{count}"
    return ""


def _counterexample_metric(rng, count):
    for m in range(2, 6):
        for cover in (True, False):
            space, _ = generate_counterexample(CounterexampleSpec(m, cover))
            report = validate(space)
            if not report.ok:
                return f"m={m} cover={cover}: {report.message}"
    return ""


def _factor_two(rng, count):
    for _ in range(count):
        table = random_metric_instance(rng)
        problem = build_problem(table)
        sol = brute_force_minimax(problem)
        rep = verify_factor_two(problem, sol.epsilon, Fraction(1, 100), witness=sol.learner,
                                strict=False)
        if not rep.holds:
            return f"{table.labelled_rows()}: realized {rep.realized} > {rep.bound}"
    return ""


def _hall(rng, count):
    for _ in range(count):
        g = random_graph(rng)
        worst = max(size - len(g.neighborhood(c))
                    for size in range(0, g.right + 1)
                    for c in combinations(range(g.right), size))
        value, witness = deficiency(g)
        res = r_matching(g)
        if value != worst or res.matched != (worst == 0):
            return f"{g.to_dict()}: deficiency {value} vs exhaustive {worst}"
        if not res.matched and len(g.neighborhood(res.certificate)) >= len(res.certificate):
            return f"{g.to_dict()}: certificate {sorted(res.certificate)} is not a violator"
    return ""


def _compactness(rng, count):
    for _ in range(count):
        table = random_zero_one_table(rng, rng.randint(1, 3), 2, 5)
        rep = compactness_sweep(table)
        if not rep["holds"] or rep["ratio"] != "1":
            return f"{table.labelled_rows()}: ratio {rep['ratio']}"
    return ""


CHECKS = [
    ("matching-equals-brute-force", _matching_vs_brute, 100),
    ("row-deletion-monotone", _row_deletion, 60),
    ("agnostic-geq-realizable", _agnostic_geq_realizable, 40),
    ("local-search-geq-brute-force", _local_geq_brute, 60),
    ("counterexample-spaces-are-metric", _counterexample_metric, 8),
    ("factor-two-bound", _factor_two, 100),
    ("hall-deficiency-vs-exhaustive", _hall, 300),
    ("zero-one-compactness", _compactness, 20),
]


def run_property_suite(seed: int = 0, scale: float = 1.0) -> list[PropertyResult]:
    results = []
    for offset, (name, check, count) in enumerate(CHECKS):
        rng = random.Random(seed * 1000 + offset)
        n = max(1, int(count * scale))
        start = time.perf_counter()
        detail = check(rng, n)
        results.append(PropertyResult(name, not detail, n, detail, time.perf_counter() - start))
    return results
