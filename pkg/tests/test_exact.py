import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from recdel.equiprob import evolve_exact
from recdel.exact import (
    FLOAT,
    RATIONAL,
    expected_leaf_count,
    expected_root_degree,
    harmonic_numbers,
    iter_distributions,
    moments,
    stratum_recurrence,
)
from recdel.process import LifoRule, ProcessParams
from recdel.trees import leaf_count, root_degree, tree_from_rank

HALF = ProcessParams(Fraction(1, 2))


def path_enumeration(n, p):
    """Law of S_n by summing over all 2**n insert/delete sequences."""
    q = 1 - p
    law = [Fraction(0)] * (n + 1)
    for moves in itertools.product((1, -1), repeat=n):
        s, w = 0, Fraction(1)
        for m in moves:
            w *= p if m == 1 else q
            s = s + 1 if m == 1 else max(s - 1, 0)
        law[s] += w
    return law


def folded_walk(n):
    """At p = 1/2, S_n has the law of |W_n + 1/2| - 1/2 for a simple walk W_n."""
    law = [Fraction(0)] * (n + 1)
    for j in range(n + 1):
        w = 2 * j - n
        law[w if w >= 0 else -w - 1] += Fraction(math.comb(n, j), 2 ** n)
    return law


@pytest.mark.parametrize("p", [Fraction(3, 10), Fraction(1, 2), Fraction(7, 10), Fraction(2, 3)])
@pytest.mark.parametrize("n", [0, 1, 2, 5, 9])
def test_recurrence_matches_path_enumeration(p, n):
    assert stratum_recurrence(n, ProcessParams(p)).probs == path_enumeration(n, p)


@pytest.mark.parametrize("n", [1, 10, 31, 60])
def test_recurrence_matches_folded_walk(n):
    assert stratum_recurrence(n, HALF).probs == folded_walk(n)


def test_examples():
    assert stratum_recurrence(2, HALF).probs == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    assert stratum_recurrence(2, ProcessParams(0.3)).probs == pytest.approx([0.7, 0.21, 0.09], abs=1e-15)
    assert stratum_recurrence(4, HALF)[0] == Fraction(6, 16)


@pytest.mark.parametrize("p", [Fraction(1, 3), Fraction(4, 5)])
def test_top_entry_and_conservation(p):
    for dist in iter_distributions(40, ProcessParams(p)):
        assert dist[dist.n] == p ** dist.n
        assert dist.total() == 1
        assert all(x >= 0 for x in dist.numerators)


def test_float_mode_close_to_rational():
    exact_row = stratum_recurrence(150, ProcessParams(Fraction(3, 10))).probs
    float_row = stratum_recurrence(150, ProcessParams(0.3)).probs
    assert float_row == pytest.approx([float(x) for x in exact_row], rel=1e-12, abs=1e-300)
    assert math.isclose(stratum_recurrence(3000, ProcessParams(0.5)).total(), 1.0, abs_tol=1e-12)


def test_moments_n0():
    m = moments(stratum_recurrence(0, HALF))
    assert (m.mean_stratum, m.variance, m.harmonic, m.reciprocal_size) == (0, 0, 0, 1)
    assert expected_leaf_count(stratum_recurrence(0, HALF)) == 1


def test_moments_n2_half():
    m = moments(stratum_recurrence(2, HALF))
    assert m.mean_stratum == Fraction(3, 4)
    assert m.second_factorial == Fraction(1, 2)
    assert m.variance == Fraction(11, 16)
    assert m.harmonic == Fraction(5, 8)
    assert m.reciprocal_size == Fraction(17, 24)
    assert m.harmonic_size == Fraction(4, 3)
    assert m.leaf_mean == Fraction(9, 8)


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100))
def test_moments_n1(p):
    dist = stratum_recurrence(1, ProcessParams(p))
    m = moments(dist)
    assert m.harmonic == p
    assert m.reciprocal_size == 1 - p / 2
    assert m.harmonic_size == 1 + p / 2
    assert expected_root_degree(dist) == p


def test_pure_insertion_leaf_mean():
    for dist in iter_distributions(12, ProcessParams(Fraction(1))):
        expected = 1 if dist.n == 0 else Fraction(dist.n + 1, 2)
        assert expected_leaf_count(dist) == expected


def brute_tree_average(n, params, functional):
    """E[f(T_n)] by weighting every tree with its exact probability under LIFO."""
    dist = evolve_exact(n, n, params, LifoRule())[n]
    return sum((mass * functional(tree_from_rank(k, r))
                for k, vec in dist.strata.items() for r, mass in enumerate(vec)), Fraction(0))


@pytest.mark.parametrize("p", [Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)])
@pytest.mark.parametrize("n", [0, 1, 3, 6])
def test_leaf_and_root_degree_against_tree_level_law(p, n):
    params = ProcessParams(p)
    dist = stratum_recurrence(n, params)
    assert expected_leaf_count(dist) == brute_tree_average(n, params, leaf_count)
    assert expected_root_degree(dist) == brute_tree_average(n, params, root_degree)


@settings(max_examples=30)
@given(st.fractions(min_value=Fraction(1, 50), max_value=Fraction(49, 50), max_denominator=50),
       st.integers(0, 80))
def test_moment_table_identities(p, n):
    m = moments(stratum_recurrence(n, ProcessParams(p)))
    assert m.variance == m.second_factorial + m.mean_stratum - m.mean_stratum ** 2
    assert m.variance >= 0
    assert m.harmonic_size == m.harmonic + m.reciprocal_size
    assert m.leaf_mean == (1 + m.mean_stratum + m.root_prob) / 2


def test_float_moments_agree_with_rational():
    r = moments(stratum_recurrence(120, ProcessParams(Fraction(7, 10))))
    f = moments(stratum_recurrence(120, ProcessParams(0.7), FLOAT))
    for name, value in r.as_dict().items():
        assert getattr(f, name) == pytest.approx(float(value), rel=1e-12)


def test_subcritical_mean_bounded():
    p = Fraction(3, 10)
    bound = p / (1 - 2 * p) + 1
    assert all(moments(d).mean_stratum <= bound for d in iter_distributions(200, ProcessParams(p)))


def test_supercritical_mean_eventually_increasing():
    means = [moments(d).mean_stratum for d in iter_distributions(200, ProcessParams(Fraction(7, 10)))]
    assert all(b > a for a, b in zip(means[20:], means[21:]))


def test_harmonic_numbers():
    assert harmonic_numbers(3) == [0, 1, Fraction(3, 2), Fraction(11, 6)]
    assert harmonic_numbers(3, FLOAT)[3] == pytest.approx(11 / 6)


def test_mode_validation():
    with pytest.raises(ValueError):
        stratum_recurrence(3, ProcessParams(0.3), RATIONAL)
    with pytest.raises(ValueError):
        stratum_recurrence(-1, HALF)
