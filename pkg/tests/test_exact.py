from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from spidercalc.exact import ExactSpan, bareiss_det


def _fraction_rank(rows):
    """Plain Gaussian elimination over Fractions."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _fraction_det(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    n, det = len(m), Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_bareiss_matches_fraction_elimination(m):
    assert bareiss_det(m) == _fraction_det(m)


def test_bareiss_rational_entries():
    assert bareiss_det([[Fraction(1, 2), 0], [0, Fraction(2, 3)]]) == Fraction(1, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_span_rank_matches_fraction_elimination(rows, cols, seed):
    rng = np.random.default_rng(seed)
    # low-rank products make dependencies likely
    m = rng.integers(-3, 4, size=(rows, 2)) @ rng.integers(-3, 4, size=(2, cols))
    m = m + (rng.random((rows, cols)) < 0.2) * rng.integers(-2, 3, size=(rows, cols))
    span = ExactSpan(cols)
    span.add(m)
    assert span.rank == _fraction_rank(m.tolist())
    for r in m:
        assert span.contains(r)


def test_span_handles_huge_entries():
    span = ExactSpan(2)
    big = 2**62
    span.add(np.array([[big, 1], [big, 2]], dtype=object))
    assert span.rank == 2
