import itertools
import random

import numpy as np
import pytest

from spidercalc import Tensor
from spidercalc.fibre import FiniteQuantumSpace
from spidercalc.hadamard import (
    HadamardMatrix,
    MatrixFormatError,
    SignedPermutation,
    all_signed_permutations,
    automorphism_group,
    automorphism_group_bruteforce,
    equivalent_transform,
    find_equivalence,
    hadamard_graph,
    is_group,
    is_hadamard,
    is_magic_permutation,
    magic_from_automorphism,
    paley_type1,
    quadruple_profile,
    quantum_graph_checks,
    quantum_hadamard_graph,
    quantum_hadamard_transpose,
    shipped_matrices,
    so4_check,
    tensor_product,
    two_i_minus_j,
    vertex_relabelling,
    walsh,
)

FOURIER = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]])


def _random_signed(rng, N):
    perm = list(range(N))
    rng.shuffle(perm)
    return SignedPermutation(tuple(perm), tuple(rng.choice((1, -1)) for _ in range(N)))


def test_walsh_examples():
    assert np.array_equal(walsh(1).entries, [[1, 1], [1, -1]])
    assert np.array_equal(walsh(2).entries, FOURIER)
    for n in range(1, 7):
        H = walsh(n).entries
        assert np.array_equal(H @ H.T, H.shape[0] * np.eye(H.shape[0], dtype=int))
    assert tensor_product(walsh(1), walsh(1)) == walsh(2)
    assert is_hadamard(tensor_product(walsh(2), walsh(1)).entries)


@pytest.mark.parametrize("q", [3, 7, 11, 19])
def test_paley(q):
    H = paley_type1(q).entries
    assert H.shape == (q + 1, q + 1)
    assert np.array_equal(H @ H.T, (q + 1) * np.eye(q + 1, dtype=int))
    assert np.all(np.diag(H) == 1) and np.trace(H) == q + 1


@pytest.mark.parametrize("q", [5, 9, 15, 2])
def test_paley_rejects(q):
    with pytest.raises(ValueError):
        paley_type1(q)


def test_is_hadamard_negative():
    assert not is_hadamard(np.ones((2, 2), dtype=int))
    assert not is_hadamard(np.array([[1, 0], [0, 1]]))
    with pytest.raises(ValueError):
        HadamardMatrix(np.ones((2, 2), dtype=np.int64))


def test_equivalent_transforms_stay_hadamard():
    rng = random.Random(0)
    H = walsh(2)
    I = SignedPermutation.identity(4)
    assert equivalent_transform(H, I, I) == H
    neg = SignedPermutation((0, 1), (-1, 1))
    assert is_hadamard(equivalent_transform(walsh(1), neg, SignedPermutation.identity(2)).entries)
    for _ in range(20):
        P, Q = _random_signed(rng, 4), _random_signed(rng, 4)
        G = equivalent_transform(H, P, Q)
        assert is_hadamard(G.entries)
        found = find_equivalence(H, G)
        assert found is not None
        assert equivalent_transform(H, *found) == G


def test_signed_permutation_algebra():
    rng = random.Random(1)
    for _ in range(20):
        a, b = _random_signed(rng, 5), _random_signed(rng, 5)
        assert np.array_equal((a @ b).matrix(), a.matrix() @ b.matrix())
        assert a @ a.inverse() == SignedPermutation.identity(5)
        assert SignedPermutation.from_matrix(a.matrix()) == a
    assert SignedPermutation.from_matrix(np.ones((2, 2))) is None
    assert sum(1 for _ in all_signed_permutations(3)) == 48


def test_automorphism_orders():
    one = HadamardMatrix(np.array([[1]], dtype=np.int64))
    assert len(automorphism_group(one)) == 2
    assert len(automorphism_group(walsh(1))) == 8 == len(list(all_signed_permutations(2)))


@pytest.mark.parametrize("H", [walsh(1), walsh(2), paley_type1(3), two_i_minus_j()], ids=repr)
def test_pruned_search_matches_exhaustive(H):
    fast = automorphism_group(H)
    slow = automorphism_group_bruteforce(H)
    assert [(a.q, a.p) for a in fast] == [(a.q, a.p) for a in slow]
    assert is_group([a.q for a in fast]) and is_group([a.p for a in fast])
    for a in fast:
        assert np.array_equal(a.p.matrix() @ H.entries, H.entries @ a.q.matrix())


def test_size_four_matrices_are_equivalent():
    mats = list(shipped_matrices(4).values())
    for A, B in itertools.combinations(mats, 2):
        assert find_equivalence(A, B) is not None


def test_quadruple_profile_invariant():
    rng = random.Random(2)
    H = paley_type1(7)
    G = equivalent_transform(H, _random_signed(rng, 8), _random_signed(rng, 8))
    assert quadruple_profile(G) == quadruple_profile(H)


def test_graph_of_w1():
    g = hadamard_graph(walsh(1))
    hp, hm = g.A[0:2, 4:6], g.A[0:2, 6:8]
    assert np.array_equal(hp, [[1, 1], [1, 0]]) and np.array_equal(hm, [[0, 0], [0, 1]])
    assert g.A.shape == (8, 8) and np.all(g.A.sum(axis=1) == 2)


@pytest.mark.parametrize("H", [walsh(2), paley_type1(7)], ids=repr)
def test_graph_shape(H):
    g = hadamard_graph(H)
    N = H.N
    assert np.array_equal(g.A, g.A.T)
    assert not g.A[:2 * N, :2 * N].any() and not g.A[2 * N:, 2 * N:].any()
    assert np.array_equal(g.A0 - g.A, np.diag([1] * 2 * N + [0] * 2 * N))
    assert g.to_dot().count("--") == g.A.sum() // 2


@pytest.mark.parametrize("H", [walsh(1), walsh(2)], ids=repr)
def test_magic_permutations_commute(H):
    g = hadamard_graph(H)
    for a in automorphism_group(H):
        u = magic_from_automorphism(H, a.q)
        assert is_magic_permutation(u)
        assert np.array_equal(u @ g.A, g.A @ u) and np.array_equal(u @ g.A0, g.A0 @ u)
    assert np.array_equal(magic_from_automorphism(H, SignedPermutation.identity(H.N)), np.eye(4 * H.N))


def test_magic_rejects_non_automorphism():
    H = paley_type1(3)
    auts = {a.q for a in automorphism_group(H)}
    bad = next(q for q in all_signed_permutations(4) if q not in auts)
    with pytest.raises(ValueError):
        magic_from_automorphism(H, bad)


def test_graph_relabelling_under_equivalence():
    rng = random.Random(3)
    H = paley_type1(3)
    for _ in range(10):
        P, Q = _random_signed(rng, 4), _random_signed(rng, 4)
        S = vertex_relabelling(P, Q)
        G = equivalent_transform(H, P, Q)
        assert np.array_equal(hadamard_graph(G).A, S @ hadamard_graph(H).A @ S.T)


@pytest.mark.parametrize("n", [2, 3])
def test_transpose_quantum_hadamard(n):
    qh = quantum_hadamard_transpose(n)
    checks = qh.checks()
    assert len(checks) == 4 and all(c.passed for c in checks)
    H = qh.map
    assert H.compose(H.dagger()) == Tensor.identity(1, n * n).scaled(n * n)


@pytest.mark.parametrize("looped", [False, True])
def test_quantum_graph_axioms(looped):
    checks = quantum_graph_checks(quantum_hadamard_transpose(2), looped)
    assert all(c.passed for c in checks)


def test_quantum_graph_specializes_to_classical():
    from spidercalc.hadamard import QuantumHadamard

    H = walsh(2)
    qh = QuantumHadamard(FiniteQuantumSpace.classical(4), H.tensor())
    A = quantum_hadamard_graph(qh)
    assert np.array_equal(np.asarray(A.to_float()).reshape(16, 16), hadamard_graph(H).A)


def test_so4():
    checks = so4_check()
    assert len(checks) >= 20 and all(c.passed for c in checks), [c.name for c in checks if not c.passed]


def test_matrix_text_round_trip():
    H = paley_type1(7)
    assert HadamardMatrix.from_text(H.to_text()) == H
    assert HadamardMatrix.from_text("2\n++\n+-\n") == walsh(1)


@pytest.mark.parametrize("text", ["", "x\n", "2\n++\n", "2\n++\n++\n", "2\n+a\n+-\n"])
def test_matrix_text_rejects(text):
    with pytest.raises(MatrixFormatError):
        HadamardMatrix.from_text(text)
