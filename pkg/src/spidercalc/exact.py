"""Exact linear algebra over the integers: fraction-free rank and determinants."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .tensor import INT_LIMIT, content, lincomb, maxabs, shrink, widen

FLOAT_EXACT = 2**53


def bareiss_det(matrix) -> Fraction:
    """Determinant of a square matrix of rationals via Bareiss elimination."""
    rows = [[Fraction(x) for x in row] for row in matrix]
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    den = math.lcm(*(x.denominator for r in rows for x in r))
    a = [[int(x * den) for x in r] for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], den ** n)


def _reduce_row(row: np.ndarray) -> np.ndarray:
    g = content(row)
    if g > 1:
        row = shrink(row // g)
    nz = np.flatnonzero(row)
    if nz.size and row[nz[0]] < 0:
        row = -row
    return row


def _matmul(c: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer product, through float BLAS whenever every partial sum is exact."""
    bound = maxabs(c) * maxabs(b) * max(c.shape[1], 1)
    if bound < FLOAT_EXACT:
        return np.rint(c.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    if bound < INT_LIMIT:
        return c.astype(np.int64) @ b.astype(np.int64)
    return shrink(widen(c) @ widen(b))


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if maxabs(a) * maxabs(b) >= INT_LIMIT:
        return np.outer(widen(a), widen(b))
    return np.outer(a.astype(np.int64), b.astype(np.int64))


class ExactSpan:
    """Incrementally maintained reduced echelon basis of integer vectors.

    Each stored row has a pivot column where every other row is zero, so the
    residual of a batch of candidates is a single matrix product.
    """

    def __init__(self, length: int):
        self.length = length
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []
        self._stack = None

    @property
    def rank(self) -> int:
        return len(self._rows)

    def basis(self) -> list[np.ndarray]:
        return [r.copy() for r in self._rows]

    def _matrix(self) -> np.ndarray:
        if self._stack is None:
            if any(r.dtype == object for r in self._rows):
                self._stack = np.array([widen(r) for r in self._rows], dtype=object)
            else:
                self._stack = np.array(self._rows, dtype=np.int64)
        return self._stack

    def residuals(self, vectors: np.ndarray) -> np.ndarray:
        v = np.atleast_2d(vectors)
        if v.dtype != object:
            v = v.astype(np.int64)
        if not self._rows:
            return v.copy()
        b = self._matrix()
        piv = np.array(self._pivots)
        d = [int(b[i, p]) for i, p in enumerate(self._pivots)]
        lcm = math.lcm(*d)
        mult = np.array([lcm // x for x in d], dtype=object if lcm >= INT_LIMIT else np.int64)
        c = v[:, piv]
        if maxabs(c) * maxabs(mult) >= INT_LIMIT:
            c = widen(c) * widen(mult)
        else:
            c = c * mult
        return lincomb(v, lcm, _matmul(c, b), -1)

    def add(self, vectors) -> int:
        """Add the vectors to the span; return how many were independent."""
        return len(self.add_indices(vectors))

    def add_indices(self, vectors) -> list[int]:
        """Add the vectors in order; return the positions of those that enlarged the span."""
        res = self.residuals(np.asarray(vectors))
        added = []
        for i in range(res.shape[0]):
            w = res[i]
            if not np.any(w):
                continue
            w = _reduce_row(w)
            p = int(np.flatnonzero(w)[0])
            wp = int(w[p])
            for j, row in enumerate(self._rows):
                c = int(row[p])
                if c:
                    self._rows[j] = _reduce_row(lincomb(row, wp, w, -c))
            rest = res[i + 1:]
            col = rest[:, p]
            hit = np.flatnonzero(col)
            if hit.size:
                rest_hit = rest[hit]
                upd = lincomb(rest_hit, wp, _outer(col[hit], w), -1)
                if upd.dtype != res.dtype:
                    res = widen(res)
                    rest = res[i + 1:]
                rest[hit] = upd
            self._rows.append(w)
            self._pivots.append(p)
            self._stack = None
            added.append(i)
        return added

    def contains(self, vector) -> bool:
        return not np.any(self.residuals(np.asarray(vector)))
