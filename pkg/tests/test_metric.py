from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bklab.metric import (DimensionMismatch, ProtectedMetric, WeightVector, default_t_class,
                          differing_indices, dist, is_admissible, metric_class_contains)


def brute_dist(n, T, x, z):
    return sum((Fraction(1) if i in T else Fraction(1, n)) for i in range(n) if x[i] != z[i])


def test_weights():
    w = ProtectedMetric(4, {1}).weights()
    assert w.weights == (Fraction(1, 4), Fraction(1), Fraction(1, 4), Fraction(1, 4))


def test_examples_from_hand():
    m = ProtectedMetric(8, {0, 1, 2, 3, 4})
    x = list("abcdefgh")
    # one unprotected change costs 1/8
    assert m.dist(x, list("abcdefgX")) == Fraction(1, 8)
    # all three unprotected features changed: 3/8, still admissible
    z = list("abcdeXYZ")
    assert m.dist(x, z) == Fraction(3, 8)
    assert m.is_admissible(x, z)
    # touching a protected feature exhausts the budget
    assert m.dist(x, list("Xbcdefgh")) == 1
    assert not m.is_admissible(x, list("Xbcdefgh"))


def test_empty_protected_set_budget():
    m = ProtectedMetric(4, set())
    x = [0, 0, 0, 0]
    assert m.is_admissible(x, [1, 1, 1, 0])
    assert m.dist(x, [1, 1, 1, 1]) == 1
    assert not m.is_admissible(x, [1, 1, 1, 1])


vectors = st.integers(2, 10).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 2), min_size=n, max_size=n),
                        st.lists(st.integers(0, 2), min_size=n, max_size=n),
                        st.sets(st.integers(0, n - 1))))


@given(vectors)
def test_distance_matches_brute_force(args):
    n, x, z, T = args
    m = ProtectedMetric(n, T)
    d = m.dist(x, z)
    assert d == brute_dist(n, T, x, z)
    assert d == m.weights().dist(x, z)
    assert m.is_admissible(x, z) == (d < 1)
    assert dist(m, x, z) == d and is_admissible(m, x, z) == (d < 1)


@given(vectors)
def test_metric_axioms(args):
    n, x, z, T = args
    m = ProtectedMetric(n, T)
    assert m.dist(x, x) == 0
    assert m.dist(x, z) == m.dist(z, x)
    assert (m.dist(x, z) == 0) == (x == z)


@given(vectors, st.data())
def test_triangle_inequality(args, data):
    n, x, z, T = args
    y = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    m = ProtectedMetric(n, T)
    assert m.dist(x, z) <= m.dist(x, y) + m.dist(y, z)


def test_delta_counts():
    m = ProtectedMetric(5, {0, 4})
    d = m.delta([0] * 5, [1, 1, 0, 1, 0])
    assert (d.protected_diffs, d.unprotected_diffs) == (1, 2)
    assert d.distance == Fraction(7, 5)


def test_dimension_checks():
    m = ProtectedMetric(3, {0})
    with pytest.raises(DimensionMismatch):
        m.dist([0, 0, 0], [0, 0])
    with pytest.raises(DimensionMismatch):
        m.dist([0, 0], [0, 0])
    with pytest.raises(DimensionMismatch):
        differing_indices([1], [1, 2])
    with pytest.raises(ValueError):
        ProtectedMetric(3, {3})
    with pytest.raises(ValueError):
        WeightVector.of([1, 0])


def test_json_roundtrip():
    m = ProtectedMetric(8, {5, 1, 3})
    assert m.to_json() == '{"T": [1, 3, 5], "n": 8}'
    assert ProtectedMetric.from_json(m.to_json()) == m


def test_metric_class():
    assert default_t_class(8) == 5
    assert default_t_class(7) == 4
    assert metric_class_contains(8, 5, {0, 1, 2, 3, 4})
    assert not metric_class_contains(8, 5, {0, 1, 2, 3})
    assert not metric_class_contains(8, 2, {0, 8})


def test_works_on_instances(small_state, rng):
    from bklab import bigkey, task
    x = task.samp(small_state, 1, rng)
    xt = task.replace_features(x, {6: bigkey.enc(small_state.handles[6], 0, rng)})
    m = ProtectedMetric(8, {0, 1, 2, 3, 4})
    assert differing_indices(x, xt) == [6]
    assert m.dist(x, xt) == Fraction(1, 8)
