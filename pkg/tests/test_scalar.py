import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from spidercalc import ExactScalar, HomogeneityError
from spidercalc.scalar import squarefree_split

fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 1000)


def test_power_canonical_form():
    s = ExactScalar.power(8, 3)  # 8**1.5 = 16 sqrt 2
    assert (s.coeff, s.base, s.half_exp) == (Fraction(16), 2, 1)
    assert ExactScalar.power(4, -2) == ExactScalar(Fraction(1, 4))


def test_squarefree_split():
    assert squarefree_split(72) == (6, 2)
    assert squarefree_split(1) == (1, 1)


def test_sum_of_unlike_radicands_refused():
    with pytest.raises(HomogeneityError):
        ExactScalar.power(2, 1) + ExactScalar.power(3, 1)


def test_square_and_inverse():
    s = ExactScalar.power(2, -3)
    assert s.square() == Fraction(1, 8)
    assert s * s.inverse() == ExactScalar(1)


@given(fractions, fractions, st.integers(1, 30), st.integers(-4, 4))
def test_arithmetic_matches_floats(a, b, base, e):
    x = ExactScalar(a) * ExactScalar.power(base, e)
    y = ExactScalar(b) * ExactScalar.power(base, e)
    assert math.isclose(float(x + y), float(x) + float(y), rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(float(x * y), float(x) * float(y), rel_tol=1e-9, abs_tol=1e-9)


@given(fractions, st.integers(1, 30), st.integers(-4, 4))
def test_dict_round_trip(a, base, e):
    x = ExactScalar(a) * ExactScalar.power(base, e)
    assert ExactScalar.from_dict(x.to_dict()) == x
