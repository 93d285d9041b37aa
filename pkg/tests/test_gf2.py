import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cssmaxsat import gf2

binary = st.integers(1, 8).flatmap(
    lambda m: st.integers(1, 10).flatmap(lambda n: arrays(np.uint8, (m, n), elements=st.integers(0, 1)))
)


def test_rank_of_identity_and_dependent_rows():
    assert gf2.rank(np.eye(5, dtype=np.uint8)) == 5
    a = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert gf2.rank(a) == 2


@given(binary)
@settings(max_examples=80, deadline=None)
def test_rank_nullity(a):
    ns = gf2.nullspace(a)
    assert gf2.rank(a) + ns.shape[0] == a.shape[1]
    assert not np.any(a @ ns.T % 2)


@given(binary, st.data())
@settings(max_examples=80, deadline=None)
def test_solve_consistent_systems(a, data):
    x = data.draw(arrays(np.uint8, (a.shape[1],), elements=st.integers(0, 1)))
    b = a @ x % 2
    sol = gf2.solve(a, b)
    assert sol is not None
    assert np.array_equal(a @ sol % 2, b)


def test_solve_inconsistent_returns_none():
    a = np.array([[1, 1], [1, 1]])
    assert gf2.solve(a, np.array([1, 0])) is None


def test_inverse():
    a = np.array([[1, 1, 0], [0, 1, 0], [1, 1, 1]], dtype=np.uint8)
    inv = gf2.inverse(a)
    assert np.array_equal(a @ inv % 2, np.eye(3, dtype=np.uint8))


def test_independent_rows_skips_span():
    base = np.array([[1, 0, 0]])
    cand = np.array([[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]])
    picked = gf2.independent_rows(base, cand)
    assert picked.shape[0] == 2
    assert gf2.rank(np.vstack([base, picked])) == 3
