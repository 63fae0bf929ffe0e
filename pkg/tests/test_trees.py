import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from recdel.trees import (
    RecursiveTree,
    StratumCapError,
    TreeIndex,
    canonical_index,
    enumerate_stratum,
    leaf_count,
    root_degree,
    stratum_number,
    tree_from_index,
)

SINGLE = RecursiveTree.single()
PATH3 = RecursiveTree((1, 2))
STAR3 = RecursiveTree((1, 1))


def brute_parent_vectors(k):
    """All valid parent vectors, independent of the library's enumeration."""
    return [pv for pv in itertools.product(*(range(1, i) for i in range(2, k + 2)))]


def test_rejects_invalid_parent():
    with pytest.raises(ValueError):
        RecursiveTree((1, 3))
    with pytest.raises(ValueError):
        RecursiveTree((0,))


@pytest.mark.parametrize("tree, expected", [(SINGLE, 0), (PATH3, 2), (STAR3, 2)])
def test_stratum_number(tree, expected):
    assert stratum_number(tree) == expected


@pytest.mark.parametrize("tree, expected", [(SINGLE, 1), (PATH3, 1), (STAR3, 2)])
def test_leaf_count(tree, expected):
    assert leaf_count(tree) == expected


@pytest.mark.parametrize("tree, expected", [(SINGLE, 0), (STAR3, 2), (PATH3, 1)])
def test_root_degree(tree, expected):
    assert root_degree(tree) == expected


def test_canonical_index_examples():
    assert canonical_index(SINGLE) == TreeIndex(0, 1)
    assert canonical_index(STAR3) == TreeIndex(2, 1)
    assert canonical_index(PATH3) == TreeIndex(2, 2)


def test_tree_from_index_examples():
    assert tree_from_index((0, 1)) == SINGLE
    assert tree_from_index(TreeIndex(2, 2)) == PATH3


@pytest.mark.parametrize("ix", [(2, 0), (2, 3), (3, 7), (-1, 1)])
def test_tree_from_index_out_of_range(ix):
    with pytest.raises(ValueError):
        tree_from_index(ix)


def test_round_trip_stratum_3_matches_sorted_enumeration():
    vectors = sorted(brute_parent_vectors(3))
    for idx, pv in enumerate(vectors, start=1):
        assert canonical_index(RecursiveTree(pv)) == (3, idx)
        assert tree_from_index((3, idx)).parents == pv


@pytest.mark.parametrize("k", range(0, 7))
def test_enumeration_is_complete_and_ordered(k):
    trees = enumerate_stratum(k)
    assert len(trees) == math.factorial(k)
    assert [t.parents for t in trees] == sorted(brute_parent_vectors(k))
    assert all(stratum_number(t) == k for t in trees)


def test_enumerate_small_examples():
    assert enumerate_stratum(0) == [SINGLE]
    assert enumerate_stratum(2) == [STAR3, PATH3]
    assert len(set(enumerate_stratum(4))) == 24


def test_enumeration_cap():
    with pytest.raises(StratumCapError):
        enumerate_stratum(9)
    assert len(enumerate_stratum(3, cap=3)) == 6


@given(st.integers(0, 7).flatmap(lambda k: st.tuples(st.just(k), st.integers(1, math.factorial(k)))))
def test_index_round_trip(ix):
    k, idx = ix
    assert canonical_index(tree_from_index(ix)) == (k, idx)


@st.composite
def trees(draw, max_size=12):
    m = draw(st.integers(1, max_size))
    return RecursiveTree(tuple(draw(st.integers(1, i - 1)) for i in range(2, m + 1)))


@given(trees())
def test_tree_invariants(t):
    k = stratum_number(t)
    internal = sum(1 for c in t.child_counts()[1:] if c > 0)
    assert leaf_count(t) >= 1
    assert root_degree(t) <= k
    assert leaf_count(t) + internal == t.size
    assert tree_from_index(canonical_index(t)) == t


@pytest.mark.parametrize("k", range(1, 8))
def test_mean_leaf_count_over_stratum(k):
    trees_k = enumerate_stratum(k)
    assert Fraction(sum(map(leaf_count, trees_k)), len(trees_k)) == Fraction(k + 1, 2)


@pytest.mark.parametrize("k", range(0, 8))
def test_mean_root_degree_over_stratum_is_harmonic_k(k):
    # a stratum-k tree has k+1 nodes; its mean root degree is H_k, not H_{k+1}
    trees_k = enumerate_stratum(k)
    h_k = sum((Fraction(1, j) for j in range(1, k + 1)), Fraction(0))
    assert Fraction(sum(map(root_degree, trees_k)), len(trees_k)) == h_k
