import numpy as np
from hypothesis import given, settings, strategies as st

from spidercalc import ExactScalar, Tensor


def _random(rng, k, l, dim):
    return Tensor(k, l, dim, rng.integers(-3, 4, size=(dim,) * (k + l)))


def test_identity_is_neutral():
    rng = np.random.default_rng(0)
    t = _random(rng, 2, 1, 3)
    assert Tensor.identity(1, 3).compose(t) == t
    assert t.compose(Tensor.identity(2, 3)) == t


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_compose_matches_matrix_product(seed):
    rng = np.random.default_rng(seed)
    f, g = _random(rng, 2, 1, 2), _random(rng, 1, 2, 2)
    assert np.array_equal(f.compose(g).matrix(), f.matrix() @ g.matrix())
    assert np.array_equal(f.tensor(g).matrix(), np.kron(f.matrix(), g.matrix()))
    assert f.dagger().dagger() == f


def test_scale_folds_into_equality():
    t = Tensor.identity(1, 2)
    assert t.scaled(ExactScalar(2)) == Tensor(1, 1, 2, 2 * np.eye(2, dtype=np.int64))
    assert (t - t).is_zero


def test_dict_round_trip():
    t = Tensor.identity(1, 3).scaled(ExactScalar.power(3, -1))
    assert Tensor.from_dict(t.to_dict()) == t
