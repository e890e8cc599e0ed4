"""Finite label spaces with exact rational losses.

A :class:`LabelSpace` is an ordered list of labels plus a dense loss matrix
of :class:`fractions.Fraction`. Downstream code works with label *indices*;
names only matter at the JSON boundary.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

KINDS = ("metric", "zero-one", "general")
DEFAULT_MAX_LABELS = 64


class SpaceError(ValueError):
    """Malformed label space or unknown label."""


def as_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string; floats are refused."""
    if isinstance(value, bool):
        raise SpaceError(f"boolean is not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SpaceError(f"not a rational string: {value!r}") from exc
    raise SpaceError(f"expected int or rational string, got {type(value).__name__}")


def fraction_str(x: Fraction) -> str:
    return str(Fraction(x))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    axiom: str | None = None
    indices: tuple[int, ...] = ()
    message: str = ""

    def to_dict(self) -> dict:
        return {"ok": self.ok, "axiom": self.axiom,
                "indices": list(self.indices), "message": self.message}


@dataclass(frozen=True, eq=True)
class LabelSpace:
    """Labels with a loss matrix; ``loss[i][j]`` is the cost of predicting
    label ``j`` when the truth is label ``i`` (symmetric unless ``general``)."""

    labels: tuple[str, ...]
    loss: tuple[tuple[Fraction, ...], ...]
    kind: str = "metric"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpaceError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        labels = tuple(str(x) for x in self.labels)
        if len(set(labels)) != len(labels):
            raise SpaceError("duplicate label identifiers")
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.loss)
        if len(rows) != len(labels) or any(len(r) != len(labels) for r in rows):
            raise SpaceError(
                f"dimension mismatch: {len(labels)} labels but loss matrix is "
                f"{len(rows)}x{[len(r) for r in rows]}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "loss", rows)
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise SpaceError(f"unknown label {label!r}") from None

    def __hash__(self):
        return hash((self.labels, self.loss, self.kind))

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "kind": self.kind,
            "loss": [[fraction_str(v) for v in row] for row in self.loss],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LabelSpace":
        try:
            return cls(tuple(doc["labels"]), tuple(tuple(r) for r in doc["loss"]),
                       doc.get("kind", "metric"))
        except KeyError as exc:
            raise SpaceError(f"label-space document missing key {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LabelSpace":
        return cls.from_dict(json.loads(text))


def zero_one_space(labels: Iterable) -> LabelSpace:
    labels = tuple(str(x) for x in labels)
    k = len(labels)
    return LabelSpace(labels, tuple(tuple(int(i != j) for j in range(k)) for i in range(k)),
                      "zero-one")


def metric_space(labels: Sequence, matrix: Sequence[Sequence], kind: str = "metric") -> LabelSpace:
    return LabelSpace(tuple(str(x) for x in labels), tuple(tuple(r) for r in matrix), kind)


def validate(space: LabelSpace, max_labels: int = DEFAULT_MAX_LABELS) -> ValidationReport:
    """Check the axioms of ``space.kind``; report the first violation found.

    Triples are scanned in lexicographic ``(i, j, k)`` order and the triangle
    witness means ``loss[i][k] > loss[i][j] + loss[j][k]``.
    """
    d = space.loss
    k = len(space)
    if k == 0:
        return ValidationReport(False, "nonempty", (), "label space has no labels")
    if k > max_labels:
        return ValidationReport(False, "size-cap", (k,),
                                f"{k} labels exceeds the cap of {max_labels}")
    for i, j in product(range(k), repeat=2):
        if d[i][j] < 0:
            return ValidationReport(False, "nonnegativity", (i, j),
                                    f"loss[{i}][{j}] = {d[i][j]} is negative")
    for i in range(k):
        if d[i][i] != 0:
            return ValidationReport(False, "identity", (i,),
                                    f"loss[{i}][{i}] = {d[i][i]} is not zero")
    if space.kind == "zero-one":
        for i, j in product(range(k), repeat=2):
            if i != j and d[i][j] != 1:
                return ValidationReport(False, "zero-one", (i, j),
                                        f"loss[{i}][{j}] = {d[i][j]} should be 1")
    elif space.kind == "metric":
        for i, j in product(range(k), repeat=2):
            if d[i][j] != d[j][i]:
                return ValidationReport(False, "symmetry", (i, j),
                                        f"loss[{i}][{j}] = {d[i][j]} != loss[{j}][{i}] = {d[j][i]}")
            if i != j and d[i][j] == 0:
                return ValidationReport(False, "positivity", (i, j),
                                        f"loss[{i}][{j}] = 0 for distinct labels")
        for i, j, m in product(range(k), repeat=3):
            if d[i][m] > d[i][j] + d[j][m]:
                return ValidationReport(
                    False, "triangle", (i, j, m),
                    f"loss[{i}][{m}] = {d[i][m]} > loss[{i}][{j}] + loss[{j}][{m}] = "
                    f"{d[i][j] + d[j][m]}")
    return ValidationReport(True)


def require_valid(space: LabelSpace, max_labels: int = DEFAULT_MAX_LABELS) -> LabelSpace:
    report = validate(space, max_labels)
    if not report.ok:
        raise SpaceError(f"{report.axiom} violated at {report.indices}: {report.message}")
    return space


def loss(space: LabelSpace, a, b) -> Fraction:
    """Loss between two labels given by name (or index, if an int)."""
    i = a if isinstance(a, int) else space.index(a)
    j = b if isinstance(b, int) else space.index(b)
    if not (0 <= i < len(space) and 0 <= j < len(space)):
        raise SpaceError(f"label index out of range: {(a, b)}")
    return space.loss[i][j]
