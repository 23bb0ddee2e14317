from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cliquegossip.protocol import (TransitionError, apply, averaging_transition, block_transition,
                                   materialize, multi_transition, projection_matrix, solver_blocks,
                                   solver_transition, symmetric_block_transition, write_csv)
from cliquegossip.scheduler import clique_select
from helpers import ORACLE


def test_pair_average():
    np.testing.assert_array_equal(averaging_transition({1, 2}, 2).dense(), [[0.5, 0.5], [0.5, 0.5]])


def test_triangle_in_four_nodes():
    M = averaging_transition([3, 1, 2], 4).dense()
    np.testing.assert_allclose(M[:3], [[1 / 3, 1 / 3, 1 / 3, 0]] * 3)
    np.testing.assert_array_equal(M[3], [0, 0, 0, 1])


def test_full_average():
    x = np.array([3.0, -1.0, 4.0, 2.0])
    np.testing.assert_allclose(apply(averaging_transition(range(1, 5), 4), x), [2.0] * 4)


@pytest.mark.parametrize("members", [[], [0, 1], [1, 5]])
def test_averaging_rejects(members):
    with pytest.raises(TransitionError):
        averaging_transition(members, 4)


def test_block_transition_reduces_to_averaging():
    b = 2
    blocks = {(i, j): np.eye(b) / 3 for i in (1, 2, 4) for j in (1, 2, 4)}
    t = block_transition([1, 2, 4], blocks, 4, b)
    expected = np.kron(averaging_transition([1, 2, 4], 4).dense(), np.eye(b))
    np.testing.assert_allclose(t.dense(), expected)


def test_identity_blocks():
    blocks = {(i, j): np.eye(2) if i == j else np.zeros((2, 2)) for i in (1, 3) for j in (1, 3)}
    np.testing.assert_array_equal(block_transition([1, 3], blocks, 3, 2).dense(), np.eye(6))


def test_block_errors():
    with pytest.raises(TransitionError, match="missing"):
        block_transition([1, 2], {(1, 1): np.eye(2), (2, 2): np.eye(2), (1, 2): np.eye(2)}, 2, 2)
    with pytest.raises(TransitionError, match="shape"):
        block_transition([1], {(1, 1): np.eye(3)}, 2, 2)


def test_symmetric_constructor_duplicates_pairs():
    A = np.array([[0.1, 0.2], [0.3, 0.4]])
    t = symmetric_block_transition([1, 2], {(1, 1): np.eye(2), (2, 2): np.eye(2), (2, 1): A}, 2, 2)
    D = t.dense()
    np.testing.assert_array_equal(D[0:2, 2:4], A)
    np.testing.assert_array_equal(D[2:4, 0:2], A)
    with pytest.raises(TransitionError):
        symmetric_block_transition([1, 2], {(1, 1): np.eye(2), (2, 2): np.eye(2)}, 2, 2)


def test_projection_examples():
    np.testing.assert_array_equal(projection_matrix([1, 0]), np.diag([0, 1]))
    np.testing.assert_allclose(projection_matrix([1, 1]), [[0.5, -0.5], [-0.5, 0.5]])
    with pytest.raises(TransitionError):
        projection_matrix([0, 0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=6).filter(
    lambda h: sum(v * v for v in h) > 1e-6))
def test_projection_properties(h):
    P = projection_matrix(h)
    np.testing.assert_allclose(P, P.T, atol=1e-12)
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    np.testing.assert_allclose(P @ np.asarray(h), 0, atol=1e-12 * max(1, np.linalg.norm(h)))


def test_solver_blocks_singleton_is_identity():
    np.testing.assert_array_equal(solver_blocks([2], {2: [1.0, 3.0]})[(2, 2)], np.eye(2))


def test_solver_blocks_axis_rows():
    blk = solver_blocks([1, 2], {1: [1, 0], 2: [0, 1]})
    np.testing.assert_allclose(blk[(1, 1)], [[1, 0], [0, 0.5]])
    np.testing.assert_allclose(blk[(1, 2)], [[0, 0], [0, 0.5]])


def test_solver_dense_matches_oracle():
    t = solver_transition([1, 2], {1: [1, 2], 2: [3, -1]}, 2)
    np.testing.assert_allclose(t.dense(), ORACLE["solver_dense_h12_h3m1"], atol=1e-14)


def test_solver_converges_on_2x2_system():
    rows = {1: np.array([1.0, 2.0]), 2: np.array([3.0, -1.0])}
    z = {1: 1.0, 2: 4.0}
    t = solver_transition([1, 2], rows, 2)
    x = np.concatenate([rows[i] * z[i] / (rows[i] @ rows[i]) for i in (1, 2)])
    for _ in range(200):
        x = apply(t, x)
    np.testing.assert_allclose(x.reshape(2, 2), [ORACLE["solver_2x2_solution"]] * 2, atol=1e-10)


def test_solver_rejects_zero_row():
    with pytest.raises(TransitionError):
        solver_blocks([1, 2], {1: [0, 0], 2: [1, 0]})


def test_multi_transition():
    a = averaging_transition([1, 2, 3], 13).dense()
    b = averaging_transition([9, 10], 13).dense()
    M = multi_transition([[1, 2, 3], [9, 10]], 13).dense()
    np.testing.assert_allclose(M, a @ b)
    np.testing.assert_allclose(M, b @ a)
    np.testing.assert_array_equal(multi_transition([[4, 5]], 6).dense(),
                                  averaging_transition([4, 5], 6).dense())
    with pytest.raises(TransitionError, match="overlap"):
        multi_transition([[1, 2], [2, 3]], 3)


def test_apply_exact():
    t = averaging_transition([1, 2, 3], 4)
    y = apply(t, [Fraction(1), Fraction(0), Fraction(0), Fraction(5)])
    assert y == [Fraction(1, 3)] * 3 + [Fraction(5)]


def test_apply_identity_and_errors():
    t = block_transition([1], {(1, 1): np.eye(1)}, 3, 1)
    np.testing.assert_array_equal(apply(t, [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])
    with pytest.raises(TransitionError):
        apply(t, [1.0, 2.0])
    s = solver_transition([1, 2], {1: [1.0, 0.0], 2: [0.0, 1.0]}, 2)
    with pytest.raises(TransitionError, match="rational"):
        apply(s, [Fraction(0)] * 4)


def test_k18_select_exact():
    x = [Fraction(1)] + [Fraction(0)] * 17
    for c in clique_select(range(1, 19), 6):
        x = apply(averaging_transition(c, 18), x)
    assert x == [Fraction(1, 18)] * 18


def test_write_csv(tmp_path):
    p = tmp_path / "m.csv"
    write_csv(averaging_transition([1, 2, 3], 3).dense(), p)
    first = p.read_text().splitlines()[0].split(",")
    assert float(first[0]) == 1 / 3 and len(first) == 3


# --- properties ---------------------------------------------------------------

cliques = st.integers(2, 9).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n), min_size=1)))


@settings(max_examples=100, deadline=None)
@given(cliques, st.integers(0, 2**32 - 1))
def test_averaging_stochastic_symmetric_and_lazy(nc, seed):
    n, c = nc
    t = averaging_transition(c, n)
    D = t.dense()
    np.testing.assert_allclose(D.sum(axis=1), 1, atol=1e-12)
    np.testing.assert_array_equal(D, D.T)
    x = np.random.default_rng(seed).normal(size=n)
    np.testing.assert_allclose(apply(t, x), D @ x, atol=1e-12)
    assert abs(apply(t, x).sum() - x.sum()) <= 1e-12 * max(1, np.abs(x).sum())


@settings(max_examples=100, deadline=None)
@given(cliques, st.lists(st.fractions(max_denominator=50), min_size=9, max_size=9))
def test_exact_apply_conserves_sum(nc, vals):
    n, c = nc
    x = vals[:n]
    assert sum(apply(averaging_transition(c, n), x)) == sum(x)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_multi_equals_any_order(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    perm = rng.permutation(n) + 1
    cuts = sorted(rng.choice(np.arange(1, n), size=min(2, n - 1), replace=False))
    parts = [list(p) for p in np.split(perm, cuts) if len(p)]
    M = multi_transition(parts, n).dense()
    for order in permutations(parts):
        P = np.eye(n)
        for c in order:
            P = averaging_transition(c, n).dense() @ P
        np.testing.assert_allclose(P, M, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_block_lazy_matches_dense(b, seed):
    rng = np.random.default_rng(seed)
    n = 4
    c = [1, 3, 4]
    blocks = {(i, j): rng.normal(size=(b, b)) for i in c for j in c}
    t = block_transition(c, blocks, n, b)
    x = rng.normal(size=n * b)
    np.testing.assert_allclose(apply(t, x), materialize(t) @ x, atol=1e-12)
