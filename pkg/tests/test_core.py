import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from seqsim.core import (
    PHI, DistanceResult, SimTable, check_norm, dist, norm_distance, parse_norm,
    similarity_of, simvec,
)
from seqsim.errors import DataError, UsageError

unit = st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0])
norms = [1, 2, 3, 8, 16, 64, math.inf]


def test_norm_examples():
    assert norm_distance([0.5, 0.0], [1, 1], 1) == 0.75
    assert norm_distance([0.5, 0.0], [1, 1], math.inf) == 1.0
    assert norm_distance([0.3, 0.7], [0.3, 0.7], 5) == 0.0


def test_norm_k2_against_exact_arithmetic():
    exact = (Fraction(1, 4) + 1) / 2
    assert norm_distance([0.5, 0.0], [1, 1], 2) == pytest.approx(math.sqrt(exact), abs=1e-15)
    assert norm_distance([0.5, 0.0], [1, 1], 2) == pytest.approx(0.790569415042, abs=1e-12)


def test_norm_rejects_bad_input():
    with pytest.raises(UsageError):
        norm_distance([1.0], [1.0, 0.0], 1)
    with pytest.raises(UsageError):
        norm_distance([], [], 1)


@given(st.lists(unit, min_size=1, max_size=8))
def test_norm_nondecreasing_in_k(x):
    y = [1.0] * len(x)
    values = [norm_distance(x, y, k) for k in norms]
    for a, b in zip(values, values[1:]):
        assert a <= b + 1e-12


@given(st.lists(unit, min_size=1, max_size=8))
def test_large_k_approaches_max(x):
    y = [1.0] * len(x)
    top = norm_distance(x, y, math.inf)
    # (1/n)^(1/64) factor bounds the gap
    assert top * len(x) ** (-1 / 64) - 1e-12 <= norm_distance(x, y, 64) <= top + 1e-12


def test_check_norm():
    assert check_norm(3) == 3
    assert check_norm(2.0) == 2
    assert check_norm(math.inf) == math.inf
    for bad in (0, -1, 65, 1.5, True, "2"):
        with pytest.raises(UsageError):
            check_norm(bad)
    assert parse_norm("inf") == math.inf
    assert parse_norm(" 7 ") == 7
    with pytest.raises(UsageError):
        parse_norm("x")


def test_similarity_pairing():
    assert similarity_of(0.25) == 0.75
    assert similarity_of(math.inf) == -math.inf
    assert DistanceResult(math.inf).similarity == -math.inf
    assert not DistanceResult(math.inf).is_finite


def test_simvec_examples(golden_table):
    t = SimTable.from_rows(["P"], [{"P": 0.9}, {"P": 0.4}])
    assert simvec(t, [0, 1], [PHI, "P"]) == [0.4]
    assert simvec(t, [0, 1], [PHI, PHI]) == []
    assert simvec(golden_table, [0, 1], ["a", "b"]) == [0.5, 0.0]


def test_dist_examples(golden_table):
    assert dist(golden_table, [0, 1], [PHI, "b"], 1) == 1.0
    assert dist(golden_table, [0, 1], ["a", "b", "a"], 1) == math.inf
    assert dist(golden_table, [0, 1], [PHI, PHI], 2) == 0.0
    t = SimTable.from_rows(["a"], [{"a": "-inf"}, {"a": 1.0}])
    assert dist(t, [0, 1], ["a", "a"], 1) == math.inf
    assert dist(t, [0, 1], [PHI, "a"], 1) == 0.0


def test_simtable_validation():
    with pytest.raises(DataError, match="state 1"):
        SimTable.from_rows(["a", "b"], [{"a": 0, "b": 0}, {"a": 0}])
    with pytest.raises(DataError):
        SimTable.from_rows(["a"], [{"a": 1.5}])
    with pytest.raises(DataError):
        SimTable.from_rows(["a"], [{"a": 0.5, "c": 0.5}])
    with pytest.raises(DataError):
        SimTable.from_rows([PHI], [])
    t = SimTable.from_rows(["a"], [{"a": "-inf"}])
    assert t.simval(0, "a") == -math.inf


def test_negated_literals():
    t = SimTable.from_rows(["P", "Q"], [{"P": 0.3, "Q": "-inf", "!P": 0.1}, {"P": 0.25, "Q": 1}])
    assert t.simval(0, "!P") == 0.1
    assert t.simval(1, "!P") == 0.75
    assert t.simval(0, "!Q") == -math.inf
    assert t.simval(1, PHI) == 1.0
