"""Finite experiments behind the CLI and scripts, plus the random instance
generators the test-suite shares."""
from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Sequence

from .apportion import verify_factor_two
from .metric import LabelSpace, metric_space, require_valid, zero_one_space
from .minimax import (AgnosticProblem, BudgetExceeded, agnostic_minimax, default_budget,
                      solve)
from .oig import BehaviorTable, build_problem, one_hole

MAX_COUNTEREXAMPLE_M = 5


# --------------------------------------------------------------------------
# counterexample

@dataclass(frozen=True)
class CounterexampleSpec:
    """``m`` core labels pairwise at distance 2, plus one label per nonempty
    subset of the core (distance 1 to its members, 2 to other core labels, 1
    to every other subset label). ``include_full_cover`` keeps the label for
    the whole core; ``k`` is the number of free sample points."""

    m: int
    include_full_cover: bool = True
    k: int = 1


def core_label(j: int) -> str:
    return f"r{j + 1}"


def subset_label(subset: Sequence[int]) -> str:
    return "s{" + ",".join(str(j + 1) for j in subset) + "}"


def counterexample_space(m: int, include_full_cover: bool = True) -> LabelSpace:
    subsets = [c for size in range(1, m + 1) for c in combinations(range(m), size)]
    if not include_full_cover:
        subsets = subsets[:-1]
    labels = [core_label(j) for j in range(m)] + [subset_label(c) for c in subsets]
    kinds = [("core", j) for j in range(m)] + [("cover", frozenset(c)) for c in subsets]

    def dist(a, b):
        if a == b:
            return 0
        (ka, va), (kb, vb) = a, b
        if ka == kb == "core":
            return 2
        if ka == kb == "cover":
            return 1
        j, cover = (va, vb) if ka == "core" else (vb, va)
        return 1 if j in cover else 2

    return require_valid(metric_space(labels, [[dist(a, b) for b in kinds] for a in kinds]))


def generate_counterexample(spec: CounterexampleSpec) -> tuple[LabelSpace, BehaviorTable]:
    """Space and table for the factor-2 gap; rows are every assignment of
    core labels to the ``k`` free points (just the ``m`` core labels at k=1)."""
    if not 2 <= spec.m <= MAX_COUNTEREXAMPLE_M:
        raise ValueError(f"m must lie in [2, {MAX_COUNTEREXAMPLE_M}], got {spec.m}")
    if spec.k < 1:
        raise ValueError(f"k must be >= 1, got {spec.k}")
    space = counterexample_space(spec.m, spec.include_full_cover)
    rows = tuple(product(range(spec.m), repeat=spec.k))
    return space, BehaviorTable(space, spec.k, rows)


def gap_report(ms: Iterable[int] = range(2, MAX_COUNTEREXAMPLE_M + 1),
               delta: Fraction = Fraction(1, 100)) -> dict:
    """Optimal error with and without the full-cover label, per ``m``.

    The with-cover table stands in for a finite projection and the
    without-cover one for the full class; at finite scale this is a shadow
    of the infinite construction, not the construction itself.
    """
    entries = []
    for m in ms:
        cover_space, cover_table = generate_counterexample(CounterexampleSpec(m, True))
        bare_space, bare_table = generate_counterexample(CounterexampleSpec(m, False))
        cover_problem = build_problem(cover_table)
        with_cover = solve(cover_problem, solver="brute")
        without = solve(build_problem(bare_table), solver="brute")
        factor = verify_factor_two(cover_problem, with_cover.epsilon, delta,
                                   witness=with_cover.learner)
        entries.append({
            "m": m,
            "labels_with_cover": len(cover_space),
            "labels_without_cover": len(bare_space),
            "xi_with_cover": str(with_cover.epsilon),
            "xi_without_cover": str(without.epsilon),
            "ratio": str(without.epsilon / with_cover.epsilon),
            "cover_prediction": cover_space.labels[with_cover.learner.choice[0]],
            "factor_two_realized": str(factor.realized),
            "factor_two_tight": factor.realized == 2 * with_cover.epsilon,
        })
    holds = all(Fraction(e["ratio"]) == 2 for e in entries)
    return {"experiment": "counterexample-gap", "delta": str(delta),
            "note": "finite shadow: full-cover toggle models projection vs. full class",
            "entries": entries, "holds": holds}


# --------------------------------------------------------------------------
# projection sweep

def compactness_sweep(table: BehaviorTable, solver: str = "auto",
                      budget: int | None = None, max_projections: int = 200_000) -> dict:
    """Solve every (row subset, column subset) projection of ``table``.

    For each column subset the full row set must be the hardest row subset
    (deleting rows never helps the adversary); the headline ratio compares
    the full table against the max over all row subsets at the full column
    set, and ``proper_ratio`` against proper row subsets only.
    """
    nrows, n = len(table.rows), table.n
    count = (2 ** nrows - 1) * (2 ** n - 1)
    if count > max_projections:
        raise BudgetExceeded(f"{count} projections exceeds the cap of {max_projections}")
    cache: dict[tuple, Fraction] = {}

    def xi_of(sub: BehaviorTable) -> Fraction:
        key = (sub.n, frozenset(sub.rows))
        if key not in cache:
            sol = solve(build_problem(sub), solver=solver, budget=budget)
            if not sol.exact:
                raise BudgetExceeded("sweep needs exact solves")
            cache[key] = sol.epsilon
        return cache[key]

    row_subsets = [c for size in range(1, nrows + 1) for c in combinations(range(nrows), size)]
    per_columns = []
    holds = True
    xi_by_size: dict[int, Fraction] = {}
    full_xi = max_all = max_proper = None
    for size in range(1, n + 1):
        for cols in combinations(range(n), size):
            full = xi_of(table.project(columns=cols))
            values = [xi_of(table.project(rows=rs, columns=cols)) for rs in row_subsets]
            top = max(values)
            proper = [v for rs, v in zip(row_subsets, values) if len(rs) < nrows]
            ok = top == full
            holds &= ok
            per_columns.append({"columns": list(cols), "xi_full_rows": str(full),
                                "xi_max_projection": str(top), "agrees": ok})
            xi_by_size[size] = max(xi_by_size.get(size, full), full)
            if size == n:
                full_xi, max_all = full, top
                max_proper = max(proper) if proper else None

    def ratio(a, b):
        if b is None:
            return None
        if b == 0:
            return "1" if a == 0 else None
        return str(a / b)

    report = {
        "experiment": "compactness-sweep",
        "kind": table.space.kind,
        "rows": nrows, "n": n,
        "projections": count, "distinct_solves": len(cache),
        "xi_full": str(full_xi),
        "xi_max_projection": str(max_all),
        "xi_max_proper_projection": None if max_proper is None else str(max_proper),
        "ratio": ratio(full_xi, max_all),
        "proper_ratio": ratio(full_xi, max_proper),
        "xi_by_sample_size": {str(k): str(v) for k, v in sorted(xi_by_size.items())},
        "per_columns": per_columns,
        "holds": holds,
    }
    return report


# --------------------------------------------------------------------------
# leave-one-out PAC check

@dataclass(frozen=True)
class PacEstimate:
    trials: int
    mean_error: Fraction
    standard_error: float
    transductive_bound: Fraction
    worst_row: int
    per_row_mean: tuple[Fraction, ...]
    seed: int
    sample_size: int
    repeat_aware_bound: Fraction | None = None

    @property
    def holds(self) -> bool:
        return float(self.mean_error) <= float(self.transductive_bound) + 3 * self.standard_error

    @property
    def holds_repeat_aware(self) -> bool:
        bound = self.repeat_aware_bound
        return bound is None or float(self.mean_error) <= float(bound) + 3 * self.standard_error

    def to_dict(self) -> dict:
        return {"experiment": "pac-check", "trials": self.trials, "seed": self.seed,
                "sample_size": self.sample_size, "mean_error": str(self.mean_error),
                "mean_error_float": float(self.mean_error),
                "standard_error": self.standard_error,
                "transductive_bound": str(self.transductive_bound),
                "repeat_aware_bound": None if self.repeat_aware_bound is None
                else str(self.repeat_aware_bound),
                "holds_repeat_aware": self.holds_repeat_aware,
                "worst_row": self.worst_row,
                "per_row_mean": [str(x) for x in self.per_row_mean], "holds": self.holds}


def xi_at_sample_size(table: BehaviorTable, size: int, solver: str = "auto",
                      budget: int | None = None) -> Fraction:
    """Worst case over all ``size``-point samples drawn from the table's columns."""
    if not 1 <= size <= table.n:
        raise ValueError(f"sample size {size} outside [1, {table.n}]")
    return max(solve(build_problem(table.project(columns=cols)), solver=solver,
                     budget=budget).epsilon
               for cols in combinations(range(table.n), size))


def pac_bridge_check(table: BehaviorTable, n: int, trials: int, seed: int = 0,
                     solver: str = "auto", budget: int | None = None) -> PacEstimate:
    """Monte Carlo leave-one-out error of the optimal transductive learner.

    Per trial: draw ``n`` columns i.i.d. uniformly, hold one draw out, and
    predict it with the optimal learner of the table restricted to the
    distinct drawn columns. A held-out point that also appears among the
    other draws is answered from its visible label. Every row is tried as
    the target and the worst mean is reported.

    Drawing ``n`` points from ``n`` columns usually repeats some, and the
    distinct set can be harder per point than a fresh size-``n`` sample, so
    alongside ``xi(n)`` the estimate carries the bound
    ``max_k (k/n) xi(k)`` over distinct-set sizes ``k``, which the learner
    provably respects.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bound = xi_at_sample_size(table, n, solver=solver, budget=budget)
    repeat_bound = max(Fraction(k, n) * (bound if k == n else
                                         xi_at_sample_size(table, k, solver=solver, budget=budget))
                       for k in range(1, n + 1))
    d = table.space.loss
    learners: dict[tuple[int, ...], tuple[dict, tuple]] = {}

    def learner_for(cols: tuple[int, ...]):
        if cols not in learners:
            problem = build_problem(table.project(columns=cols))
            sol = solve(problem, solver=solver, budget=budget)
            lookup = {var.values: c for var, c in zip(problem.variables, sol.learner.choice)}
            learners[cols] = lookup
        return learners[cols]

    rng = random.Random(seed)
    per_row_mean = []
    per_row_se = []
    for row in table.rows:
        losses = []
        for _ in range(trials):
            draws = [rng.randrange(table.n) for _ in range(n)]
            i = rng.randrange(n)
            x = draws[i]
            if draws.count(x) > 1:
                losses.append(Fraction(0))
                continue
            cols = tuple(sorted(set(draws)))
            key = one_hole(tuple(row[c] for c in cols), cols.index(x))
            pred = learner_for(cols)[key]
            losses.append(Fraction(d[row[x]][pred]))
        mean = sum(losses, Fraction(0)) / trials
        se = statistics.pstdev(float(v) for v in losses) / math.sqrt(trials) if trials > 1 else 0.0
        per_row_mean.append(mean)
        per_row_se.append(se)
    worst = max(range(len(per_row_mean)), key=lambda r: (per_row_mean[r], -r))
    return PacEstimate(trials, per_row_mean[worst], per_row_se[worst], bound, worst,
                       tuple(per_row_mean), seed, n, repeat_bound)


# --------------------------------------------------------------------------
# sample complexity

@dataclass
class SampleComplexityCurve:
    entries: list[tuple[Fraction, int | None]]
    xi_by_n: dict[int, Fraction]
    n_range: tuple[int, int]
    provenance: dict[int, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"experiment": "sample-complexity-curve",
                "n_range": list(self.n_range),
                "xi_by_n": {str(k): str(v) for k, v in sorted(self.xi_by_n.items())},
                "provenance": {str(k): v for k, v in sorted(self.provenance.items())},
                "entries": [{"epsilon": str(e), "m": m,
                             "reachable": m is not None} for e, m in self.entries]}


def sample_complexity_curve(family: Callable[[int], BehaviorTable], epsilons: Sequence,
                            n_range: tuple[int, int], solver: str = "auto",
                            budget: int | None = None) -> SampleComplexityCurve:
    """Smallest scanned ``n`` with ``xi(n') <= eps`` for every scanned ``n' >= n``.

    Only the scanned range is examined; ``None`` marks an epsilon that is not
    reached inside it.
    """
    lo, hi = n_range
    xi_by_n, provenance = {}, {}
    for n in range(lo, hi + 1):
        sol = solve(build_problem(family(n)), solver=solver, budget=budget)
        xi_by_n[n] = sol.epsilon
        provenance[n] = sol.solver if sol.exact else f"{sol.solver} (upper bound)"
    entries = []
    for eps in sorted(Fraction(e) for e in epsilons):
        m = None
        for n in range(hi, lo - 1, -1):
            if xi_by_n[n] <= eps:
                m = n
            else:
                break
        entries.append((eps, m))
    return SampleComplexityCurve(entries, xi_by_n, (lo, hi), provenance)


def single_row_family(n: int) -> BehaviorTable:
    return BehaviorTable(zero_one_space([0, 1]), n, ((0,) * n,))


def star_family(n: int) -> BehaviorTable:
    """All-zeros plus every unit vector, 0-1 loss; optimal error is ``1/n``."""
    rows = [(0,) * n] + [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return BehaviorTable(zero_one_space([0, 1]), n, tuple(rows))


def counterexample_family(m: int, include_full_cover: bool) -> Callable[[int], BehaviorTable]:
    def family(n: int) -> BehaviorTable:
        return generate_counterexample(CounterexampleSpec(m, include_full_cover, n))[1]
    return family


FAMILIES = {
    "single-row": single_row_family,
    "star": star_family,
}


# --------------------------------------------------------------------------
# agnostic gap search

def agnostic_gap_search(instances: int, seed: int = 0, max_labels: int = 4,
                        budget: int | None = None) -> dict:
    """Ratio of agnostic to realizable optimal error on random metric classes
    at ``n = 1``. Exploratory only: no claim is attached to what it finds."""
    rng = random.Random(seed)
    best = None
    for t in range(instances):
        k = rng.randint(2, max_labels)
        space = random_metric_space(rng, k)
        rows = rng.sample(range(k), rng.randint(1, k))
        table = BehaviorTable(space, 1, tuple((r,) for r in rows))
        real = solve(build_problem(table), solver="brute", budget=budget).epsilon
        agn = agnostic_minimax(AgnosticProblem.from_table(table), exact=True,
                               budget=budget)[0].epsilon
        ratio = None if real == 0 else agn / real
        if ratio is not None and (best is None or ratio > best[0]):
            best = (ratio, t, table)
    out = {"experiment": "agnostic-gap-search", "instances": instances, "seed": seed}
    if best is not None:
        out.update({"max_ratio": str(best[0]), "instance": best[1], "table": best[2].to_dict()})
    return out


# --------------------------------------------------------------------------
# random instances

def random_metric_space(rng: random.Random, k: int, max_weight: int = 4) -> LabelSpace:
    """Random integer weights closed under shortest paths, so the triangle
    inequality holds by construction."""
    w = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            w[i][j] = w[j][i] = rng.randint(1, max_weight)
    for via in range(k):
        for i in range(k):
            for j in range(k):
                if w[i][via] + w[via][j] < w[i][j]:
                    w[i][j] = w[i][via] + w[via][j]
    return require_valid(metric_space([f"y{i}" for i in range(k)], w))


def random_table(rng: random.Random, space: LabelSpace, n: int, max_rows: int) -> BehaviorTable:
    universe = len(space) ** n
    count = rng.randint(1, min(max_rows, universe))
    picks = rng.sample(range(universe), count)
    k = len(space)

    def decode(code):
        row = []
        for _ in range(n):
            code, y = divmod(code, k)
            row.append(y)
        return tuple(row)

    return BehaviorTable(space, n, tuple(decode(c) for c in picks))


def random_zero_one_table(rng: random.Random, n: int, labels: int = 2,
                          max_rows: int = 5) -> BehaviorTable:
    return random_table(rng, zero_one_space(range(labels)), n, max_rows)


def random_metric_instance(rng: random.Random, max_n: int = 4, max_labels: int = 5,
                           max_rows: int = 8, budget: int | None = None) -> BehaviorTable:
    """Random metric table whose exhaustive search fits ``budget``; draws
    are repeated (from the same stream) until one fits."""
    from .minimax import search_size

    budget = default_budget() if budget is None else budget
    while True:
        space = random_metric_space(rng, rng.randint(2, max_labels))
        table = random_table(rng, space, rng.randint(1, max_n), max_rows)
        if search_size(build_problem(table)) <= budget:
            return table
