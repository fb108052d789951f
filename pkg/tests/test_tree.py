import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyent.model import builtin_model
from anyent.tree import (
    TreeError,
    braid_generator_matrix,
    braid_word_matrix,
    enumerate_labellings,
    f_move_matrix,
    group_blocks,
    invert_word,
    make_shape,
    reduce_word,
)

from conftest import MODELS

LEAF_CHOICES = {
    "ising": [[1], [1], [2], [0, 1], [1, 2]],
    "fibonacci": [[1], [1], [0, 1]],
    "z_2": [[1], [0, 1]],
    "z_3": [[1], [2], [0, 1, 2]],
}


@st.composite
def shapes(draw, min_leaves=2, max_leaves=5):
    name = draw(st.sampled_from(MODELS))
    m = builtin_model(name)
    n = draw(st.integers(min_leaves, max_leaves))
    leaves = [draw(st.sampled_from(LEAF_CHOICES[name])) for _ in range(n)]
    free = draw(st.booleans())
    shape = make_shape(m, leaves, None if free else m.trivial)
    return m, shape


def _unitary(M):
    return np.abs(M @ M.conj().T - np.eye(len(M))).max(initial=0.0) < 1e-12


def test_six_sigma_labellings(ising):
    s = ising.index("sigma")
    labs = enumerate_labellings(ising, make_shape(ising, [s] * 6, ising.trivial))
    assert len(labs) == 4
    for lab in labs:
        a1, mid, a2, mid2 = lab.internal
        assert mid == mid2 == s and {a1, a2} <= {ising.index("1"), ising.index("psi")}


@pytest.mark.parametrize("n", range(2, 11))
def test_fibonacci_counts(fib, n):
    fibs = [0, 1]
    while len(fibs) < n + 1:
        fibs.append(fibs[-1] + fibs[-2])
    t = fib.index("tau")
    assert len(enumerate_labellings(fib, make_shape(fib, [t] * n, fib.trivial))) == fibs[n - 1]


def test_single_leaf(ising):
    s = ising.index("sigma")
    (lab,) = enumerate_labellings(ising, make_shape(ising, [s], s))
    assert lab.internal == () and lab.total == s
    assert enumerate_labellings(ising, make_shape(ising, [s], ising.trivial)) == ()


def test_f_move_matches_symbols(fib, ising):
    t = fib.index("tau")
    M, _ = f_move_matrix(fib, make_shape(fib, [t] * 3, t), 2)
    phi = (1 + 5**0.5) / 2
    assert np.allclose(M, [[1 / phi, phi**-0.5], [phi**-0.5, -1 / phi]])
    s = ising.index("sigma")
    M, _ = f_move_matrix(ising, make_shape(ising, [s] * 3, s), 2)
    assert np.allclose(M, np.array([[1, 1], [1, -1]]) / 2**0.5)
    with pytest.raises(TreeError):
        f_move_matrix(fib, make_shape(fib, [t] * 3, t), 3)


def test_two_sigma_exchange_eigenvalue(ising):
    s, one = ising.index("sigma"), ising.index("1")
    M, _ = braid_generator_matrix(ising, make_shape(ising, [s, s], one), 1, 1)
    assert M[0, 0] == pytest.approx(np.exp(-1j * np.pi / 8))


def test_b34_phases(ising):
    s, one = ising.index("sigma"), ising.index("1")
    shape = make_shape(ising, [s] * 6, one)
    M, out = braid_word_matrix(ising, shape, ((3, 1), (3, 1)))
    assert out == shape and np.allclose(M, np.diag(np.diag(M)))
    for lab, phase in zip(enumerate_labellings(ising, shape), np.diag(M)):
        a1, _, a2, _ = lab.internal
        expected = np.exp(-1j * np.pi / 4) if a1 == a2 else np.exp(3j * np.pi / 4)
        assert abs(phase - expected) < 1e-12


@pytest.mark.parametrize("N", [2, 3])
def test_abelian_generators_are_diagonal(N):
    m = builtin_model("z_n", N)
    shape = make_shape(m, [[1], [1], list(range(N))], None)
    for i in (1, 2):
        M, out = braid_generator_matrix(m, shape, i, 1)
        if out == shape:
            assert np.allclose(M, np.diag(np.diag(M)))


@given(shapes())
def test_generators_unitary_and_inverse(data):
    m, shape = data
    for i in range(1, shape.n):
        M, out = braid_generator_matrix(m, shape, i, 1)
        Mi, back = braid_generator_matrix(m, out, i, -1)
        assert back == shape and _unitary(M)
        assert np.allclose(Mi @ M, np.eye(len(M)), atol=1e-12)


@given(shapes(min_leaves=3))
def test_yang_baxter(data):
    m, shape = data
    for i in range(1, shape.n - 1):
        for s in (1, -1):
            lhs, o1 = braid_word_matrix(m, shape, ((i, s), (i + 1, s), (i, s)))
            rhs, o2 = braid_word_matrix(m, shape, ((i + 1, s), (i, s), (i + 1, s)))
            assert o1 == o2 and np.abs(lhs - rhs).max(initial=0.0) < 1e-12


@given(shapes(min_leaves=4))
def test_far_commutation(data):
    m, shape = data
    for i in range(1, shape.n):
        for j in range(i + 2, shape.n):
            lhs, o1 = braid_word_matrix(m, shape, ((i, 1), (j, -1)))
            rhs, o2 = braid_word_matrix(m, shape, ((j, -1), (i, 1)))
            assert o1 == o2 and np.abs(lhs - rhs).max(initial=0.0) < 1e-12


@given(shapes(), st.data())
def test_word_times_inverse_is_identity(data, draw):
    m, shape = data
    word = draw.draw(st.lists(st.tuples(st.integers(1, shape.n - 1), st.sampled_from((1, -1))), max_size=6))
    M, out = braid_word_matrix(m, shape, tuple(word))
    Mi, back = braid_word_matrix(m, out, invert_word(tuple(word)))
    assert back == shape and np.allclose(Mi @ M, np.eye(len(M)), atol=1e-12)
    assert reduce_word(tuple(word) + invert_word(tuple(word))) == ()


@given(shapes(min_leaves=3))
def test_f_moves_unitary(data):
    m, shape = data
    for p in range(1, shape.n):
        M, _ = f_move_matrix(m, shape, p)
        assert _unitary(M) and _unitary(M.conj().T)


@given(shapes(min_leaves=3, max_leaves=6), st.data())
def test_group_blocks_unitary(data, draw):
    m, shape = data
    start = draw.draw(st.integers(0, shape.n - 2))
    stop = draw.draw(st.integers(start + 2, shape.n))
    G, grouped = group_blocks(m, shape, ((start, stop),))
    assert G.shape[0] == G.shape[1] == len(grouped)
    assert _unitary(G)


def test_group_blocks_of_pair_is_f_move(fib):
    t = fib.index("tau")
    shape = make_shape(fib, [t] * 4, fib.trivial)
    G, grouped = group_blocks(fib, shape, ((1, 3),))
    M, out = f_move_matrix(fib, shape, 2)
    # same amplitudes, only the label bookkeeping differs
    keyed = {(g.outer.leaves[1], g.outer.path[0]): G[k] for k, g in enumerate(grouped)}
    for k, lab in enumerate(out):
        assert np.allclose(keyed[(lab.path[1], lab.path[0])], M[k])
