"""One-inclusion variable-assignment system built from a finite behavior table.

Rows of the table are the functions; one-hole projections of rows are the
variables. A learner is a choice of label for every variable, and a row's
error is the average loss of its held-out coordinates against those choices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .metric import LabelSpace, SpaceError, as_fraction, fraction_str

HOLE = "?"


class TableError(ValueError):
    pass


class LearnerError(ValueError):
    pass


@dataclass(frozen=True)
class BehaviorTable:
    """The projection of a class onto ``n`` sample points.

    ``rows`` hold label *indices* into ``space``; duplicates are dropped on
    construction, keeping first occurrences in order.
    """

    space: LabelSpace
    n: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise TableError(f"n must be >= 1, got {self.n}")
        seen: dict[tuple[int, ...], None] = {}
        k = len(self.space)
        for row in self.rows:
            row = tuple(int(v) for v in row)
            if len(row) != self.n:
                raise TableError(f"row {row} has length {len(row)}, expected {self.n}")
            if any(not 0 <= v < k for v in row):
                raise TableError(f"row {row} uses a label index outside the space")
            seen.setdefault(row, None)
        if not seen:
            raise TableError("table needs at least one row")
        object.__setattr__(self, "rows", tuple(seen))

    @classmethod
    def from_labels(cls, space: LabelSpace, rows: Sequence[Sequence]) -> "BehaviorTable":
        rows = [tuple(space.index(str(v)) for v in row) for row in rows]
        if not rows:
            raise TableError("table needs at least one row")
        return cls(space, len(rows[0]), tuple(rows))

    def labelled_rows(self) -> list[list[str]]:
        return [[self.space.labels[v] for v in row] for row in self.rows]

    def project(self, rows: Sequence[int] | None = None,
                columns: Sequence[int] | None = None) -> "BehaviorTable":
        """Restrict to a subset of rows and columns (order of ``columns`` kept)."""
        rows = range(len(self.rows)) if rows is None else rows
        columns = range(self.n) if columns is None else columns
        columns = tuple(columns)
        return BehaviorTable(self.space, len(columns),
                             tuple(tuple(self.rows[r][c] for c in columns) for r in rows))

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "n": self.n, "rows": self.labelled_rows()}

    @classmethod
    def from_dict(cls, doc: dict, base_dir: str | Path | None = None) -> "BehaviorTable":
        space_doc = doc["space"]
        if isinstance(space_doc, str):
            path = Path(space_doc)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            space = LabelSpace.from_json(path.read_text())
        else:
            space = LabelSpace.from_dict(space_doc)
        table = cls.from_labels(space, doc["rows"])
        if "n" in doc and doc["n"] != table.n:
            raise TableError(f"declared n={doc['n']} but rows have length {table.n}")
        return table

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class PartialBehavior:
    values: tuple[int | None, ...]
    hole: int

    def render(self, space: LabelSpace) -> list[str]:
        return [HOLE if v is None else space.labels[v] for v in self.values]


@dataclass(frozen=True)
class AssignmentProblem:
    """Functions (rows) depending on ``n`` shared variables each.

    ``dependence[r][i]`` is the variable equal to row ``r`` with coordinate
    ``i`` holed. ``offsets[r]`` is subtracted from row ``r``'s raw error when
    evaluating (zero in the realizable case, best-in-class loss when agnostic).
    ``targets`` are per-row error targets for decision queries.
    """

    table: BehaviorTable
    variables: tuple[PartialBehavior, ...]
    dependence: tuple[tuple[int, ...], ...]
    targets: tuple[Fraction, ...]
    offsets: tuple[Fraction, ...] = ()
    neighbors: tuple[tuple[tuple[int, int], ...], ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not self.offsets:
            object.__setattr__(self, "offsets", tuple(Fraction(0) for _ in self.table.rows))
        if not self.neighbors:
            nbrs: list[list[tuple[int, int]]] = [[] for _ in self.variables]
            for r, deps in enumerate(self.dependence):
                for i, v in enumerate(deps):
                    nbrs[v].append((r, i))
            object.__setattr__(self, "neighbors", tuple(tuple(x) for x in nbrs))

    @property
    def space(self) -> LabelSpace:
        return self.table.space

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self.table.rows

    def completions(self, var: int) -> list[int]:
        """Labels that complete ``var`` to a row, in row order."""
        hole = self.variables[var].hole
        return [self.rows[r][hole] for r, _ in self.neighbors[var]]


def one_hole(row: Sequence[int], i: int) -> tuple[int | None, ...]:
    return tuple(None if j == i else v for j, v in enumerate(row))


def build_problem(table: BehaviorTable, target: Fraction | int | str = 0,
                  offsets: Sequence[Fraction] | None = None) -> AssignmentProblem:
    index: dict[tuple, int] = {}
    variables: list[PartialBehavior] = []
    dependence = []
    for row in table.rows:
        deps = []
        for i in range(table.n):
            key = one_hole(row, i)
            if key not in index:
                index[key] = len(variables)
                variables.append(PartialBehavior(key, i))
            deps.append(index[key])
        dependence.append(tuple(deps))
    eps = as_fraction(target)
    return AssignmentProblem(
        table=table,
        variables=tuple(variables),
        dependence=tuple(dependence),
        targets=tuple(eps for _ in table.rows),
        offsets=tuple(Fraction(o) for o in offsets) if offsets is not None else (),
    )


@dataclass(frozen=True)
class LearnerAssignment:
    """``choice[v]`` is the label index predicted for variable ``v``."""

    choice: tuple[int | None, ...]

    def to_dict(self, problem: AssignmentProblem) -> list[dict]:
        space = problem.space
        return [{"variable": var.render(space),
                 "label": None if c is None else space.labels[c]}
                for var, c in zip(problem.variables, self.choice)]

    @classmethod
    def from_dict(cls, problem: AssignmentProblem, doc: list[dict]) -> "LearnerAssignment":
        space = problem.space
        lookup = {tuple(v.render(space)): k for k, v in enumerate(problem.variables)}
        choice: list[int | None] = [None] * len(problem.variables)
        for item in doc:
            key = tuple(str(x) for x in item["variable"])
            if key not in lookup:
                raise LearnerError(f"variable {list(key)} is not part of the problem")
            label = item["label"]
            choice[lookup[key]] = None if label is None else space.index(label)
        return cls(tuple(choice))


@dataclass(frozen=True)
class Evaluation:
    per_row: tuple[Fraction, ...]
    worst: Fraction

    def argmax(self) -> int:
        return self.per_row.index(self.worst)


def _check_total(problem: AssignmentProblem, learner: LearnerAssignment) -> None:
    if len(learner.choice) != len(problem.variables):
        raise LearnerError(f"learner covers {len(learner.choice)} variables, "
                           f"problem has {len(problem.variables)}")
    k = len(problem.space)
    for v, c in enumerate(learner.choice):
        if c is None:
            raise LearnerError(
                f"variable {v} {problem.variables[v].render(problem.space)} is unassigned")
        if not 0 <= c < k:
            raise LearnerError(f"variable {v} assigned label index {c} outside the space")


def raw_errors(problem: AssignmentProblem, learner: LearnerAssignment) -> tuple[Fraction, ...]:
    _check_total(problem, learner)
    d = problem.space.loss
    n = problem.n
    out = []
    for row, deps in zip(problem.rows, problem.dependence):
        out.append(sum((d[row[i]][learner.choice[v]] for i, v in enumerate(deps)),
                       Fraction(0)) / n)
    return tuple(out)


def evaluate(problem: AssignmentProblem, learner: LearnerAssignment) -> Evaluation:
    """Per-row error (minus the row's offset) and the worst case over rows."""
    per_row = tuple(e - o for e, o in zip(raw_errors(problem, learner), problem.offsets))
    return Evaluation(per_row, max(per_row))


@dataclass(frozen=True)
class ApportionmentCheck:
    satisfied: bool
    violations: tuple[tuple[int, int, Fraction, Fraction], ...]

    def to_dict(self) -> dict:
        return {"satisfied": self.satisfied,
                "violations": [{"row": r, "coordinate": i, "contribution": fraction_str(c),
                                "budget": fraction_str(b)} for r, i, c, b in self.violations]}


def evaluate_apportioned(problem: AssignmentProblem, learner: LearnerAssignment,
                         apportionments: Sequence) -> ApportionmentCheck:
    """Check ``loss(row_i, choice(l_i)) / n <= x_i`` for every row and coordinate.

    ``apportionments`` holds one entry vector (or object with ``.entries``)
    per row.
    """
    _check_total(problem, learner)
    if len(apportionments) != len(problem.rows):
        raise ValueError(f"{len(apportionments)} apportionments for {len(problem.rows)} rows")
    d = problem.space.loss
    n = problem.n
    violations = []
    for r, (row, deps, app) in enumerate(zip(problem.rows, problem.dependence, apportionments)):
        entries = getattr(app, "entries", app)
        if len(entries) != n:
            raise ValueError(f"apportionment for row {r} has length {len(entries)}, expected {n}")
        for i, v in enumerate(deps):
            contribution = Fraction(d[row[i]][learner.choice[v]], n)
            if contribution > entries[i]:
                violations.append((r, i, contribution, Fraction(entries[i])))
    return ApportionmentCheck(not violations, tuple(violations))


def load_table(path: str | Path) -> BehaviorTable:
    path = Path(path)
    return BehaviorTable.from_dict(json.loads(path.read_text()), base_dir=path.parent)


__all__ = [
    "BehaviorTable", "PartialBehavior", "AssignmentProblem", "LearnerAssignment",
    "Evaluation", "ApportionmentCheck", "build_problem", "evaluate", "raw_errors",
    "evaluate_apportioned", "load_table", "TableError", "LearnerError", "SpaceError", "HOLE",
]
