"""The eight acceptance criteria, each timed against its runtime limit.

Every test prints one ``PASS``/``FAIL`` line straight to the terminal, so a
plain ``pytest tests/test_acceptance.py`` shows the summary.
"""
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations, product

from transduct.apportion import verify_factor_two
from transduct.cli import main
from transduct.experiments import (CounterexampleSpec, compactness_sweep, gap_report,
                                   generate_counterexample, pac_bridge_check,
                                   random_metric_instance, random_zero_one_table)
from transduct.matching import deficiency, optimal_zero_one, r_matching
from transduct.metric import zero_one_space
from transduct.minimax import brute_force_minimax, local_search_minimax
from transduct.oig import BehaviorTable, build_problem
from transduct.properties import random_graph

from oracles import hall_deficiency, naive_xi, one_hole_projections


@contextmanager
def criterion(capsys, number, title, limit):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
    except BaseException as exc:
        with capsys.disabled():
            print(f"\nFAIL  criterion {number}: {title} ({exc})")
        raise
    with capsys.disabled():
        print(f"\nPASS  criterion {number}: {title} ({elapsed:.2f}s < {limit}s)")


def test_1_counterexample_gap(capsys):
    with criterion(capsys, 1, "counterexample gap, m = 2..5", 5):
        report = gap_report(range(2, 6))
        assert [e["m"] for e in report["entries"]] == [2, 3, 4, 5]
        for entry in report["entries"]:
            assert Fraction(entry["xi_with_cover"]) == 1
            assert Fraction(entry["xi_without_cover"]) == 2


def test_2_factor_two(capsys):
    delta = Fraction(1, 100)
    with criterion(capsys, 2, "factor-2 bound on 200 random metric instances", 120):
        rng = random.Random(2024)
        for _ in range(200):
            table = random_metric_instance(rng, max_n=4, max_labels=5, max_rows=8)
            assert table.n <= 4 and len(table.space) <= 5 and len(table.rows) <= 8
            problem = build_problem(table)
            sol = brute_force_minimax(problem)
            rep = verify_factor_two(problem, sol.epsilon, delta, witness=sol.learner)
            assert rep.holds and rep.realized <= 2 * sol.epsilon + delta
        _, table = generate_counterexample(CounterexampleSpec(3, True))
        problem = build_problem(table)
        sol = brute_force_minimax(problem)
        rep = verify_factor_two(problem, sol.epsilon, delta, witness=sol.learner)
        assert rep.realized == 2 * sol.epsilon


def _all_zero_one_tables():
    space = zero_one_space([0, 1])
    for n in range(1, 4):
        universe = list(product(range(2), repeat=n))
        for size in range(1, 6):
            for rows in combinations(universe, size):
                yield BehaviorTable(space, n, rows)


def test_3_matching_equals_brute_force(capsys):
    with criterion(capsys, 3, "matching solver equals brute force", 180):
        count = 0
        for table in _all_zero_one_tables():
            problem = build_problem(table)
            assert optimal_zero_one(problem).epsilon == brute_force_minimax(problem).epsilon
            count += 1
        assert count == 3 + 15 + 218
        rng = random.Random(4)
        for _ in range(500):
            problem = build_problem(random_zero_one_table(rng, 4, 2, 5))
            assert optimal_zero_one(problem).epsilon == brute_force_minimax(problem).epsilon


def test_4_hall_certificates(capsys):
    with criterion(capsys, 4, "Hall certificates on 1000 graphs", 60):
        rng = random.Random(8)
        for _ in range(1000):
            g = random_graph(rng, max_right=8)
            worst, _ = hall_deficiency(g.edges, g.right)
            value, witness = deficiency(g)
            assert value == worst
            assert len(witness) - len(g.neighborhood(witness)) == worst
            res = r_matching(g)
            assert res.matched == (worst == 0)
            if not res.matched:
                assert len(g.neighborhood(res.certificate)) < len(res.certificate)
            else:
                assert sorted(res.matching.values()) == list(range(g.right))
                assert all(r in g.edges[l] for l, r in res.matching.items())


def test_5_zero_one_compactness(capsys):
    with criterion(capsys, 5, "compactness ratio 1 on 100 zero-one tables", 120):
        rng = random.Random(5)
        for _ in range(100):
            table = random_zero_one_table(rng, rng.randint(1, 3), 2, 5)
            report = compactness_sweep(table)
            assert report["ratio"] == "1" and report["holds"]


def test_6_three_row_example(capsys, three_row):
    with criterion(capsys, 6, "three-row instance", 1):
        problem = build_problem(three_row)
        assert len(problem.variables) == 7 and len(problem.dependence) == 3
        assert {v.values for v in problem.variables} == one_hole_projections(three_row.rows, 3)
        for row, deps in zip(problem.rows, problem.dependence):
            assert [problem.variables[v].hole for v in deps] == [0, 1, 2]
            assert all(problem.variables[v].values[j] == row[j]
                       for i, v in enumerate(deps) for j in range(3) if j != i)
        assert optimal_zero_one(problem).epsilon == Fraction(1, 3)
        assert brute_force_minimax(problem).epsilon == Fraction(1, 3)
        assert local_search_minimax(problem).epsilon == Fraction(1, 3)
        assert naive_xi(three_row.rows, 3, three_row.space.loss) == Fraction(1, 3)


def test_7_pac_bridge(capsys, three_row):
    with criterion(capsys, 7, "leave-one-out estimate within 1/3 + 3 sigma", 30):
        est = pac_bridge_check(three_row, 3, 10_000, seed=7)
        assert est.transductive_bound == Fraction(1, 3)
        assert float(est.mean_error) <= 1 / 3 + 3 * est.standard_error
        assert est.holds


def test_8_property_suite_cli(capsys):
    with criterion(capsys, 8, "property suite via `transduct props`", 120):
        assert main(["props"]) == 0
