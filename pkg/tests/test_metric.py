import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from transduct.experiments import CounterexampleSpec, generate_counterexample, random_metric_space
from transduct.metric import (LabelSpace, SpaceError, as_fraction, loss, metric_space,
                              require_valid, validate, zero_one_space)

from oracles import triangle_ok


def test_zero_one_two_points_ok():
    space = LabelSpace(("a", "b"), ((0, 1), (1, 0)), "zero-one")
    assert validate(space).ok


def test_triangle_violation_witness():
    space = metric_space("pqr", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    report = validate(space)
    assert not report.ok
    assert report.axiom == "triangle"
    assert report.indices == (0, 1, 2)


@pytest.mark.parametrize("include_full_cover", [True, False])
def test_counterexample_space_is_metric(include_full_cover):
    space, _ = generate_counterexample(CounterexampleSpec(3, include_full_cover))
    assert validate(space).ok
    assert triangle_ok(space.loss)
    assert set(v for row in space.loss for v in row) == {0, 1, 2}


def test_dimension_mismatch():
    with pytest.raises(SpaceError, match="dimension"):
        LabelSpace(("a", "b"), ((0, 1),), "metric")


@pytest.mark.parametrize("matrix,axiom", [
    ([[0, -1], [-1, 0]], "nonnegativity"),
    ([[1, 1], [1, 0]], "identity"),
    ([[0, 1], [2, 0]], "symmetry"),
    ([[0, 0], [0, 0]], "positivity"),
])
def test_axiom_errors_name_axiom(matrix, axiom):
    assert validate(metric_space("ab", matrix)).axiom == axiom


def test_zero_one_kind_checks_entries():
    space = LabelSpace(("a", "b"), ((0, 2), (2, 0)), "zero-one")
    assert validate(space).axiom == "zero-one"


def test_general_kind_allows_asymmetry():
    space = metric_space("ab", [[0, 1], [3, 0]], kind="general")
    assert validate(space).ok


def test_size_cap():
    assert validate(zero_one_space(range(5)), max_labels=4).axiom == "size-cap"


def test_loss_values():
    z = zero_one_space("ab")
    assert loss(z, "a", "a") == 0
    assert loss(z, "a", "b") == 1
    space, _ = generate_counterexample(CounterexampleSpec(3, True))
    assert loss(space, "r1", "s{1}") == 1
    assert loss(space, "r1", "r2") == 2
    assert isinstance(loss(space, "r1", "r2"), Fraction)


def test_unknown_label():
    with pytest.raises(SpaceError, match="unknown label"):
        loss(zero_one_space("ab"), "a", "z")


def test_rational_parsing():
    assert as_fraction("3/6") == Fraction(1, 2)
    assert as_fraction(4) == 4
    with pytest.raises(SpaceError):
        as_fraction(0.5)


def test_json_round_trip_is_exact():
    space = metric_space("abc", [["0", "1/3", "2/3"], ["1/3", "0", "1/3"], ["2/3", "1/3", "0"]])
    doc = space.to_json()
    again = LabelSpace.from_json(doc)
    assert again == space
    assert again.to_json() == doc
    assert again.loss[0][1] == Fraction(1, 3)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(3, 6))
def test_fuzz_injected_triangle_violation(seed, k):
    rng = random.Random(seed)
    space = random_metric_space(rng, k)
    assert validate(space).ok
    d = [list(row) for row in space.loss]
    i, j = rng.sample(range(k), 2)
    via = next(x for x in range(k) if x not in (i, j))
    d[i][j] = d[j][i] = d[i][via] + d[via][j] + rng.randint(1, 3)
    report = validate(metric_space(space.labels, d))
    assert not report.ok and report.axiom == "triangle"
    a, b, c = report.indices
    assert d[a][c] > d[a][b] + d[b][c]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(2, 6))
def test_validated_metrics_satisfy_triangle_exactly(seed, k):
    space = require_valid(random_metric_space(random.Random(seed), k))
    labels = space.labels
    for a in labels:
        for b in labels:
            for c in labels:
                assert loss(space, a, b) + loss(space, b, c) - loss(space, a, c) >= 0
