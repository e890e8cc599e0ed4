import pytest

from transduct.metric import zero_one_space
from transduct.oig import BehaviorTable, build_problem


@pytest.fixture
def binary():
    return zero_one_space([0, 1])


@pytest.fixture
def three_row(binary):
    return BehaviorTable.from_labels(binary, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])


@pytest.fixture
def three_row_problem(three_row):
    return build_problem(three_row)
