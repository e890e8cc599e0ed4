"""Apportionments and the factor-2 learner for metric losses.

An apportionment splits a row's error budget ``alpha`` over its ``n``
coordinates. Given apportionments that some assignment satisfies, each
variable copies the completion of the neighbouring row that spends the least
budget on it; the triangle inequality then caps every row at
``2 * alpha + delta / 3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .metric import as_fraction
from .oig import AssignmentProblem, LearnerAssignment, evaluate, evaluate_apportioned, raw_errors


class ApportionmentError(ValueError):
    pass


class FactorTwoViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Apportionment:
    total: Fraction
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(Fraction(x) for x in self.entries)
        if any(x < 0 for x in entries):
            raise ApportionmentError(f"negative entry in {entries}")
        if sum(entries, Fraction(0)) != self.total:
            raise ApportionmentError(f"entries sum to {sum(entries)}, not {self.total}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "total", Fraction(self.total))


def derive_apportionments(problem: AssignmentProblem, witness: LearnerAssignment,
                          alpha) -> list[Apportionment]:
    """Read apportionments off a witness, spreading leftover budget evenly."""
    alpha = as_fraction(alpha)
    n = problem.n
    d = problem.space.loss
    errors = raw_errors(problem, witness)
    out = []
    for r, (row, deps, err) in enumerate(zip(problem.rows, problem.dependence, errors)):
        if err > alpha:
            raise ApportionmentError(f"witness error {err} on row {r} exceeds alpha {alpha}")
        slack = (alpha - err) / n
        out.append(Apportionment(alpha, tuple(
            Fraction(d[row[i]][witness.choice[v]], n) + slack for i, v in enumerate(deps))))
    return out


def _budget(apportionments, r: int, i: int) -> Fraction:
    return getattr(apportionments[r], "entries", apportionments[r])[i]


def choose_rows(problem: AssignmentProblem, apportionments: Sequence,
                delta) -> list[int]:
    """For each variable, the dependent row whose budget on it is within
    ``delta/3`` (in loss units, i.e. ``n`` times the entry) of the smallest,
    lowest row index first."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise ApportionmentError("delta must be positive")
    if len(apportionments) != len(problem.rows):
        raise ApportionmentError(
            f"{len(apportionments)} apportionments for {len(problem.rows)} rows")
    n = problem.n
    chosen = []
    for v, nb in enumerate(problem.neighbors):
        if not nb:
            raise ApportionmentError(f"variable {v} has no dependent row")
        lam = [n * _budget(apportionments, r, i) for r, i in nb]
        floor = min(lam)
        k = next(j for j, x in enumerate(lam) if x - floor <= delta / 3)
        chosen.append(nb[k][0])
    return chosen


def two_factor_learner(problem: AssignmentProblem, apportionments: Sequence,
                       delta) -> LearnerAssignment:
    chosen = choose_rows(problem, apportionments, delta)
    return LearnerAssignment(tuple(problem.rows[r][var.hole]
                                   for var, r in zip(problem.variables, chosen)))


@dataclass(frozen=True)
class FactorTwoReport:
    epsilon: Fraction
    delta: Fraction
    realized: Fraction
    bound: Fraction
    holds: bool
    per_row: tuple[dict, ...]
    witness_error: Fraction

    def to_dict(self) -> dict:
        return {"epsilon": str(self.epsilon), "delta": str(self.delta),
                "realized": str(self.realized), "bound": str(self.bound),
                "holds": self.holds, "witness_error": str(self.witness_error),
                "per_row": list(self.per_row)}


def verify_factor_two(problem: AssignmentProblem, epsilon, delta,
                      witness: LearnerAssignment | None = None, solver: str = "auto",
                      strict: bool = True) -> FactorTwoReport:
    """Run the factor-2 learner and check ``worst <= 2 epsilon + delta`` exactly.

    ``witness`` must have worst-case error at most ``epsilon``; when omitted
    one is obtained from :func:`transduct.minimax.solve`.
    """
    from .minimax import solve

    if problem.space.kind not in ("metric", "zero-one"):
        raise ApportionmentError(f"factor-2 guarantee needs a metric, got kind={problem.space.kind}")
    if any(problem.offsets):
        raise ApportionmentError("factor-2 verification is for realizable problems")
    epsilon = as_fraction(epsilon)
    delta = as_fraction(delta)
    if witness is None:
        witness = solve(problem, solver=solver).learner
    witness_error = evaluate(problem, witness).worst
    if witness_error > epsilon:
        raise ApportionmentError(f"witness error {witness_error} exceeds epsilon {epsilon}")

    alpha = epsilon + delta / 3
    apps = derive_apportionments(problem, witness, alpha)
    assert evaluate_apportioned(problem, witness, apps).satisfied
    chosen = choose_rows(problem, apps, delta)
    learner = LearnerAssignment(tuple(problem.rows[r][var.hole]
                                      for var, r in zip(problem.variables, chosen)))
    errors = raw_errors(problem, learner)
    bound = 2 * epsilon + delta

    n = problem.n
    d = problem.space.loss
    per_row = []
    for r, (row, deps, err) in enumerate(zip(problem.rows, problem.dependence, errors)):
        tri_slack = None
        for i, v in enumerate(deps):
            label = learner.choice[v]
            nb = chosen[v]
            hole = problem.variables[v].hole
            # budget of the chosen row on this variable
            lam_chosen = n * apps[nb].entries[hole]
            s = lam_chosen + n * apps[r].entries[i] - d[row[i]][label]
            tri_slack = s if tri_slack is None else min(tri_slack, s)
        if tri_slack < 0:
            raise FactorTwoViolation(f"triangle step fails on row {r}: slack {tri_slack}")
        per_row.append({"row": r, "error": str(err), "triangle_slack": str(tri_slack),
                        "holds": err <= bound})
    realized = max(errors)
    holds = realized <= bound
    if strict and not holds:
        worst_row = errors.index(realized)
        raise FactorTwoViolation(
            f"row {worst_row} {problem.table.labelled_rows()[worst_row]} has error "
            f"{realized} > 2*{epsilon} + {delta}")
    return FactorTwoReport(epsilon, delta, realized, bound, holds, tuple(per_row), witness_error)
