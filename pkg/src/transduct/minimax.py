"""Minimax solvers for general losses, realizable and agnostic.

Errors are compared as integers: every loss entry and offset is scaled by a
common factor so that ``n * K * value`` is integral, and only converted back
to :class:`~fractions.Fraction` when reporting.
"""
from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .metric import LabelSpace
from .oig import AssignmentProblem, BehaviorTable, LearnerAssignment, build_problem, evaluate

DEFAULT_BUDGET = 20_000_000
BUDGET_ENV = "TRANSDUCT_BUDGET"


class BudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class Solution:
    epsilon: Fraction
    learner: LearnerAssignment
    solver: str
    exact: bool
    d_star: int | None = None
    certificates: tuple = ()

    def to_dict(self, problem: AssignmentProblem) -> dict:
        return {"epsilon": str(self.epsilon), "solver": self.solver, "exact": self.exact,
                "d_star": self.d_star, "learner": self.learner.to_dict(problem),
                "certificates": list(self.certificates)}


class _Scaled:
    """Integer view of a problem: row value = (sums[r] - off[r]) / (n * scale)."""

    def __init__(self, problem: AssignmentProblem):
        n = problem.n
        dens = [x.denominator for row in problem.space.loss for x in row]
        dens += [(o * n).denominator for o in problem.offsets]
        scale = math.lcm(*dens) if dens else 1
        self.scale = scale
        self.denom = n * scale
        self.loss = [[int(x * scale) for x in row] for row in problem.space.loss]
        self.off = [int(o * n * scale) for o in problem.offsets]
        # per variable: list of (row, truth label)
        self.touch = [[(r, problem.rows[r][problem.variables[v].hole]) for r, _ in nb]
                      for v, nb in enumerate(problem.neighbors)]
        self.k = len(problem.space)
        self.nrows = len(problem.rows)

    def value(self, scaled: int) -> Fraction:
        return Fraction(scaled, self.denom)

    def sums(self, choice: Sequence[int]) -> list[int]:
        s = [0] * self.nrows
        for v, y in enumerate(choice):
            for r, t in self.touch[v]:
                s[r] += self.loss[t][y]
        return s


def components(problem: AssignmentProblem) -> list[tuple[list[int], list[int]]]:
    """Connected components as (sorted variables, sorted rows)."""
    parent = list(range(len(problem.variables)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for deps in problem.dependence:
        root = find(deps[0])
        for v in deps[1:]:
            other = find(v)
            if other != root:
                parent[max(root, other)] = min(root, other)
                root = min(root, other)
    groups: dict[int, list[int]] = {}
    for v in range(len(problem.variables)):
        groups.setdefault(find(v), []).append(v)
    out = []
    for vs in groups.values():
        rows = sorted({r for v in vs for r, _ in problem.neighbors[v]})
        out.append((vs, rows))
    out.sort(key=lambda c: c[0][0])
    return out


def search_size(problem: AssignmentProblem, labels: int | None = None) -> int:
    k = len(problem.space) if labels is None else labels
    return sum(k ** len(vs) for vs, _ in components(problem))


def _candidates(problem: AssignmentProblem, table_labels_only: bool) -> list[list[int]]:
    k = len(problem.space)
    if not table_labels_only:
        return [list(range(k)) for _ in problem.variables]
    used = sorted({y for row in problem.rows for y in row})
    return [used for _ in problem.variables]


def brute_force_minimax(problem: AssignmentProblem, budget: int | None = None,
                        table_labels_only: bool = False) -> Solution:
    """Exact min over all total assignments of the worst-case row value.

    Independent components are solved separately (the worst case is their
    max). Within a component the search runs depth-first in lexicographic
    order of (variable index, label index) with pruning on the partial max,
    so the returned assignment is the lexicographically first optimum of
    each component.
    """
    budget = default_budget() if budget is None else budget
    cands = _candidates(problem, table_labels_only)
    size = sum(len(cands[vs[0]]) ** len(vs) for vs, _ in components(problem))
    if size > budget:
        raise BudgetExceeded(
            f"exhaustive search needs {size} evaluations (> budget {budget}); "
            f"use local_search_minimax or raise {BUDGET_ENV}")
    sc = _Scaled(problem)
    choice = [0] * len(problem.variables)
    worst = None
    for vs, rows in components(problem):
        # seed the incumbent with a heuristic value; +1 keeps ties reachable
        seed_choice = _descend(sc, _first_completion(problem), vs, rows, cands)
        seed_sums = sc.sums(seed_choice)
        incumbent = max(seed_sums[r] - sc.off[r] for r in rows) + 1
        best_val, best_assign = _branch_and_bound(sc, vs, rows, cands, incumbent)
        assert best_assign is not None
        for v, y in zip(vs, best_assign):
            choice[v] = y
        worst = best_val if worst is None else max(worst, best_val)
    learner = LearnerAssignment(tuple(choice))
    eps = sc.value(worst)
    assert evaluate(problem, learner).worst == eps
    return Solution(eps, learner, "brute", True)


def _branch_and_bound(sc: _Scaled, vs: list[int], rows: list[int], cands, incumbent: int):
    sums = [0] * sc.nrows
    off = sc.off
    loss = sc.loss
    touch = sc.touch
    start = max(-off[r] for r in rows)
    current = [0] * len(vs)
    best = [incumbent, None]
    depth_max = len(vs)

    def rec(depth: int, bound: int):
        if depth == depth_max:
            if bound < best[0]:
                best[0] = bound
                best[1] = list(current)
            return
        v = vs[depth]
        tv = touch[v]
        for y in cands[v]:
            b = bound
            for r, t in tv:
                sums[r] += loss[t][y]
                val = sums[r] - off[r]
                if val > b:
                    b = val
            if b < best[0]:
                current[depth] = y
                rec(depth + 1, b)
            for r, t in tv:
                sums[r] -= loss[t][y]

    rec(0, start)
    return best[0], best[1]


def _first_completion(problem: AssignmentProblem) -> list[int]:
    return [problem.rows[nb[0][0]][var.hole] if nb else 0
            for var, nb in zip(problem.variables, problem.neighbors)]


def _profile(sums, off, rows) -> list[int]:
    return sorted((sums[r] - off[r] for r in rows), reverse=True)


def _descend(sc: _Scaled, start: Sequence[int], vs: Sequence[int], rows: Sequence[int],
             cands) -> list[int]:
    """Coordinate descent on (max, sorted error profile) over variables ``vs``."""
    choice = list(start)
    sums = sc.sums(choice)
    off = sc.off
    current = _profile(sums, off, rows)
    improved = True
    while improved:
        improved = False
        for v in vs:
            y0 = choice[v]
            best_y, best_prof = y0, current
            for y in cands[v]:
                if y == y0:
                    continue
                for r, t in sc.touch[v]:
                    sums[r] += sc.loss[t][y] - sc.loss[t][y0]
                prof = _profile(sums, off, rows)
                if prof < best_prof:
                    best_y, best_prof = y, prof
                for r, t in sc.touch[v]:
                    sums[r] -= sc.loss[t][y] - sc.loss[t][y0]
            if best_y != y0:
                for r, t in sc.touch[v]:
                    sums[r] += sc.loss[t][best_y] - sc.loss[t][y0]
                choice[v] = best_y
                current = best_prof
                improved = True
    return choice


def local_search_minimax(problem: AssignmentProblem, restarts: int = 20, seed: int = 0,
                         table_labels_only: bool = False) -> Solution:
    """Upper bound by coordinate descent from several starts.

    Restart 0 starts from each variable's first completion; the others from
    uniformly random labels drawn with ``random.Random(seed)``.
    """
    sc = _Scaled(problem)
    cands = _candidates(problem, table_labels_only)
    rng = random.Random(seed)
    vs = list(range(len(problem.variables)))
    rows = list(range(len(problem.rows)))
    best_key, best_choice = None, None
    for restart in range(max(1, restarts)):
        if restart == 0:
            start = _first_completion(problem)
        else:
            start = [rng.choice(cands[v]) for v in vs]
        choice = _descend(sc, start, vs, rows, cands)
        key = _profile(sc.sums(choice), sc.off, rows)
        if best_key is None or key < best_key:
            best_key, best_choice = key, choice
    learner = LearnerAssignment(tuple(best_choice))
    return Solution(sc.value(best_key[0]), learner, "local", False)


@dataclass(frozen=True)
class AgnosticProblem:
    """Agnostic learning of ``class_rows`` at sample size ``n``: every
    sequence in ``labels ** n`` is a row, judged relative to its best fit
    in the class."""

    space: LabelSpace
    n: int
    class_rows: tuple[tuple[int, ...], ...]

    def offset(self, row: Sequence[int]) -> Fraction:
        d = self.space.loss
        return min(sum((Fraction(d[r][h]) for r, h in zip(row, hrow)), Fraction(0))
                   for hrow in self.class_rows) / self.n

    def rows(self):
        return product(range(len(self.space)), repeat=self.n)

    def to_problem(self) -> AssignmentProblem:
        rows = tuple(self.rows())
        table = BehaviorTable(self.space, self.n, rows)
        return build_problem(table, offsets=[self.offset(r) for r in table.rows])

    @classmethod
    def from_table(cls, table: BehaviorTable) -> "AgnosticProblem":
        return cls(table.space, table.n, table.rows)


def agnostic_minimax(agnostic: AgnosticProblem, exact: bool = True, budget: int | None = None,
                     restarts: int = 20, seed: int = 0) -> tuple[Solution, AssignmentProblem]:
    """Optimal agnostic error: min over learners of max over all label
    sequences of (raw error - best-in-class error)."""
    budget = default_budget() if budget is None else budget
    k = len(agnostic.space)
    nrows = k ** agnostic.n
    if nrows > budget:
        raise BudgetExceeded(f"agnostic system has {nrows} rows; over budget {budget}")
    problem = agnostic.to_problem()
    if exact:
        return brute_force_minimax(problem, budget=budget), problem
    return local_search_minimax(problem, restarts=restarts, seed=seed), problem


def solve(problem: AssignmentProblem, solver: str = "auto", seed: int = 0,
          budget: int | None = None, restarts: int = 20) -> Solution:
    """Dispatch: ``auto`` uses the matching solver for 0-1 loss, exhaustive
    search when it fits the budget, and local search otherwise."""
    from .matching import optimal_zero_one

    budget = default_budget() if budget is None else budget
    if solver == "auto":
        if problem.space.kind == "zero-one":
            solver = "matching"
        elif search_size(problem) <= budget:
            solver = "brute"
        else:
            solver = "local"
    if solver == "matching":
        sol = optimal_zero_one(problem)
        certs = () if sol.certificate is None else (sol.certificate,)
        return Solution(sol.epsilon, sol.learner, "matching", True, sol.d_star, certs)
    if solver == "brute":
        return brute_force_minimax(problem, budget=budget)
    if solver == "local":
        return local_search_minimax(problem, restarts=restarts, seed=seed)
    raise ValueError(f"unknown solver {solver!r}")


def xi(table: BehaviorTable, solver: str = "auto", budget: int | None = None) -> Fraction:
    """Optimal worst-case transductive error of a table (exact solvers only)."""
    sol = solve(build_problem(table), solver=solver, budget=budget)
    if not sol.exact:
        raise BudgetExceeded("table too large for an exact solve")
    return sol.epsilon
