import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from spidercalc import ExactScalar, Tensor
from spidercalc.diagram import (
    BLACK,
    WHITE,
    black_spider,
    cap,
    compose,
    crossing,
    cup,
    dagger,
    identity,
    tensor,
    white_spider,
)
from spidercalc.fibre import (
    FibreContext,
    FiniteQuantumSpace,
    MissingHadamard,
    bipart_checks,
    evaluate,
    evaluate_scalar,
    gram_det,
    gram_elements,
    span_saturate,
    spider_identity_checks,
    spider_tensor,
    trace,
    transpose,
)
from spidercalc.hadamard import paley_type1, quantum_hadamard_transpose, shipped_matrices, walsh
from spidercalc.rewrite import evaluate_closed

from helpers import closure, snake

CONTEXTS = {
    "standard3": FibreContext.standard(3),
    "walsh1": walsh(1).context(),
    "paley3": paley_type1(3).context(),
    "M2": quantum_hadamard_transpose(2).context,
}


def _white_oracle(H, k, l):
    """Direct float expansion of the classical white spider."""
    N = H.shape[0]
    out = np.zeros((N,) * (k + l))
    for idx in itertools.product(range(N), repeat=k + l):
        out[idx] = sum(np.prod([H[i, j] for i in idx]) for j in range(N)) / N ** ((k + l) / 2)
    return out


def test_black_is_kronecker_delta():
    t = spider_tensor(FibreContext.standard(2), BLACK, 2, 1)
    for i, j, k in itertools.product(range(2), repeat=3):
        assert t.entries[i, j, k] == (i == j == k)


@pytest.mark.parametrize("name", ["walsh1", "paley3"])
def test_white_identity_is_identity(name):
    ctx = CONTEXTS[name]
    assert spider_tensor(ctx, WHITE, 1, 1) == Tensor.identity(1, ctx.dim)


@pytest.mark.parametrize("H", [walsh(1), walsh(2), paley_type1(3)], ids=repr)
@pytest.mark.parametrize("k,l", [(2, 1), (0, 3), (2, 2), (1, 3)])
def test_white_against_direct_formula(H, k, l):
    t = spider_tensor(H.context(), WHITE, k, l)
    assert np.allclose(t.to_float(), _white_oracle(H.entries, k, l), atol=1e-9)


def test_white_fork_is_conjugated_multiplication():
    # H^-1 m (H (x) H), rescaled to the unitary U = H / sqrt(N)
    H = walsh(1).entries.astype(float)
    U = H / np.sqrt(2)
    m = np.zeros((2, 2, 2))
    for i in range(2):
        m[i, i, i] = 1
    expected = np.einsum("ai,ijk,jb,kc->abc", U.T, m, U, U)
    got = spider_tensor(walsh(1).context(), WHITE, 2, 1).to_float()
    assert np.allclose(got, expected, atol=1e-12)


def test_white_needs_hadamard():
    with pytest.raises(MissingHadamard):
        spider_tensor(FibreContext.standard(2), WHITE, 1, 1)


@pytest.mark.parametrize("name", list(CONTEXTS))
def test_snake_is_identity(name):
    ctx = CONTEXTS[name]
    assert evaluate(snake(), ctx) == Tensor.identity(1, ctx.dim)


def test_bipart_rules_hold_for_size_four():
    for H in shipped_matrices(4).values():
        assert all(c.passed for c in bipart_checks(H.context()))


def test_frobenius_law_over_M2():
    checks = spider_identity_checks(FibreContext.quantum(FiniteQuantumSpace.matrix_algebra(2)))
    assert checks and all(c.passed for c in checks)


def test_flip_fails_for_M2():
    # negative control: the multiplication of M2 is not commutative
    ctx = FibreContext.quantum(FiniteQuantumSpace.matrix_algebra(2))
    m = black_spider(2, 1)
    assert evaluate(compose(m, crossing()), ctx) != evaluate(m, ctx)
    std = FibreContext.standard(3)
    assert evaluate(compose(m, crossing()), std) == evaluate(m, std)


def _word(rng):
    gens = [lambda: black_spider(rng.randint(0, 2), rng.randint(0, 2)),
            lambda: white_spider(rng.randint(0, 2), rng.randint(0, 2)),
            cup, cap, crossing, lambda: identity(1)]
    d = rng.choice(gens)()
    for _ in range(rng.randint(0, 3)):
        g = rng.choice(gens)()
        if g.n_lower == d.n_upper:
            d = compose(g, d)
        elif d.n_lower + d.n_upper + g.n_lower + g.n_upper <= 5:
            d = tensor(d, g)
    return d


@pytest.mark.parametrize("name", ["walsh1", "paley3", "M2"])
def test_functoriality_on_random_words(name):
    ctx = CONTEXTS[name]
    rng = random.Random(name)
    done = 0
    while done < 200:
        f, g = _word(rng), _word(rng)
        assert evaluate(tensor(f, g), ctx) == evaluate(f, ctx).tensor(evaluate(g, ctx))
        if f.n_lower == g.n_upper:
            assert evaluate(compose(f, g), ctx) == evaluate(f, ctx).compose(evaluate(g, ctx))
        assert evaluate(dagger(f), ctx) == evaluate(f, ctx).dagger()
        done += 1


@pytest.mark.parametrize("N", [3, 4, 5])
def test_gram_of_identity(N):
    ctx = FibreContext.standard(N)
    assert gram_det([evaluate(identity(2), ctx)]) == N ** 2


def test_gram_determinant_size_four():
    ctx = walsh(2).context()
    ts = [evaluate(d, ctx) for d in gram_elements().values()]
    assert gram_det(ts) == 10368 == 4 ** 3 * 3 ** 4 * 2


def test_span_ranks_small_slots():
    ctx = walsh(2).context()
    gens = [black_spider(0, 4), white_spider(0, 4), cap()]
    assert span_saturate(ctx, gens, (2, 2))[0] == 4
    assert span_saturate(ctx, gens, (1, 1))[0] == 1


def test_transpose_and_trace():
    ctx = FibreContext.standard(4)
    assert trace(evaluate(identity(1), ctx), ctx) == ExactScalar(4)
    b = evaluate(black_spider(1, 1), ctx)
    assert transpose(b, ctx) == b
    rng = np.random.default_rng(1)
    t = Tensor(1, 1, 4, rng.integers(-3, 4, size=(4, 4)))
    assert np.array_equal(transpose(t, ctx).matrix(), t.matrix().T)


@pytest.mark.parametrize("H", list(shipped_matrices(4).values()), ids=repr)
def test_trace_matches_rewriting(H):
    ctx = H.context()
    f = compose(white_spider(2, 2), black_spider(2, 2))
    assert trace(evaluate(f, ctx), ctx) == evaluate_closed(closure(f), 4) == evaluate_scalar(closure(f), ctx)


def test_quantum_space_delta():
    s = FiniteQuantumSpace.tracial([2, 2])
    assert s.dim == 8 and s.delta2 == Fraction(8)
