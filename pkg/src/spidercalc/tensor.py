"""Homogeneous exact tensors: an integer array times one ExactScalar."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .scalar import ExactScalar, HomogeneityError

INT_LIMIT = 2**62


def maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(np.abs(a).max())


def shrink(a: np.ndarray) -> np.ndarray:
    """Move an object array back to int64 when every entry fits."""
    if a.dtype == object and maxabs(a) < INT_LIMIT:
        return a.astype(np.int64)
    return a


def widen(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def lincomb(x: np.ndarray, a: int, y: np.ndarray, b: int) -> np.ndarray:
    """``a*x + b*y`` with an overflow guard."""
    bound = abs(a) * maxabs(x) + abs(b) * maxabs(y)
    if bound >= INT_LIMIT or abs(a) >= INT_LIMIT or abs(b) >= INT_LIMIT:
        return shrink(widen(x) * a + widen(y) * b)
    return x.astype(np.int64) * a + y.astype(np.int64) * b


def content(a: np.ndarray) -> int:
    """gcd of all entries (0 for the zero array)."""
    if a.size == 0:
        return 0
    if a.dtype == object:
        return reduce(math.gcd, (abs(int(v)) for v in a.ravel()), 0)
    return int(np.gcd.reduce(np.abs(a.ravel())))


def safe_tensordot(a: np.ndarray, b: np.ndarray, axes, summed: int) -> np.ndarray:
    """tensordot on integer arrays, switching to Python ints if int64 could overflow."""
    if maxabs(a) * maxabs(b) * max(summed, 1) >= INT_LIMIT:
        return shrink(np.tensordot(widen(a), widen(b), axes=axes))
    return np.tensordot(a, b, axes=axes)


@dataclass(frozen=True, eq=False)
class Tensor:
    """A map from ``n_lower`` legs to ``n_upper`` legs, each leg of dimension ``dim``.

    ``entries`` has one axis per leg, upper legs first, so that
    ``entries.reshape(dim**n_upper, dim**n_lower)`` is the usual matrix.
    The represented value is ``scale * entries``.
    """

    n_lower: int
    n_upper: int
    dim: int
    entries: np.ndarray
    scale: ExactScalar = ExactScalar(1)

    def __post_init__(self):
        arr = np.asarray(self.entries)
        if arr.dtype != object:
            arr = arr.astype(np.int64)
        expected = (self.dim,) * (self.n_upper + self.n_lower)
        if arr.shape != expected:
            raise ValueError(f"entries shape {arr.shape} does not match slot {expected}")
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "scale", ExactScalar.coerce(self.scale))

    # construction

    @classmethod
    def identity(cls, n: int, dim: int) -> "Tensor":
        eye = np.eye(dim ** n, dtype=np.int64)
        return cls(n, n, dim, eye.reshape((dim,) * (2 * n)))

    @classmethod
    def from_matrix(cls, matrix, n_lower: int, n_upper: int, dim: int, scale=1) -> "Tensor":
        arr = np.asarray(matrix)
        return cls(n_lower, n_upper, dim, arr.reshape((dim,) * (n_upper + n_lower)), scale)

    @classmethod
    def zeros(cls, n_lower: int, n_upper: int, dim: int) -> "Tensor":
        return cls(n_lower, n_upper, dim, np.zeros((dim,) * (n_lower + n_upper), dtype=np.int64))

    # views

    @property
    def slot(self) -> tuple[int, int]:
        return (self.n_lower, self.n_upper)

    def matrix(self) -> np.ndarray:
        return self.entries.reshape(self.dim ** self.n_upper, self.dim ** self.n_lower)

    def to_float(self) -> np.ndarray:
        return self.entries.astype(float) * float(self.scale)

    @property
    def is_zero(self) -> bool:
        return self.scale.is_zero or not np.any(self.entries)

    def normalized(self) -> "Tensor":
        """Pull the gcd of the entries into the scale."""
        g = content(self.entries)
        if g == 0:
            return Tensor.zeros(self.n_lower, self.n_upper, self.dim)
        if g == 1:
            return self
        return Tensor(self.n_lower, self.n_upper, self.dim, shrink(self.entries // g), self.scale * g)

    # categorical structure

    def compose(self, other: "Tensor") -> "Tensor":
        """``self`` after ``other``."""
        if other.n_upper != self.n_lower or other.dim != self.dim:
            raise ValueError(f"cannot compose {self.slot} after {other.slot}")
        k = self.n_lower
        axes = (list(range(self.n_upper, self.n_upper + k)), list(range(k)))
        out = safe_tensordot(self.entries, other.entries, axes, self.dim ** k)
        return Tensor(other.n_lower, self.n_upper, self.dim, out, self.scale * other.scale)

    __matmul__ = compose

    def tensor(self, other: "Tensor") -> "Tensor":
        if other.dim != self.dim:
            raise ValueError("leg dimensions differ")
        out = safe_tensordot(self.entries, other.entries, 0, 1)
        lu, ll, ou, ol = self.n_upper, self.n_lower, other.n_upper, other.n_lower
        a_up = list(range(lu))
        a_lo = list(range(lu, lu + ll))
        b_up = list(range(lu + ll, lu + ll + ou))
        b_lo = list(range(lu + ll + ou, lu + ll + ou + ol))
        out = np.transpose(out, a_up + b_up + a_lo + b_lo)
        return Tensor(ll + ol, lu + ou, self.dim, out, self.scale * other.scale)

    def dagger(self) -> "Tensor":
        order = list(range(self.n_upper, self.n_upper + self.n_lower)) + list(range(self.n_upper))
        return Tensor(self.n_upper, self.n_lower, self.dim, np.transpose(self.entries, order), self.scale.conjugate())

    # linear structure

    def scaled(self, s) -> "Tensor":
        return Tensor(self.n_lower, self.n_upper, self.dim, self.entries, self.scale * ExactScalar.coerce(s))

    def __mul__(self, s):
        return self.scaled(s)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scaled(-1)

    def __add__(self, other: "Tensor") -> "Tensor":
        if other.slot != self.slot or other.dim != self.dim:
            raise ValueError("cannot add tensors of different slots")
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        sa, sb = self.scale, other.scale
        if sa.base != sb.base:
            raise HomogeneityError(f"scales {sa} and {sb} are not homogeneous")
        den = math.lcm(sa.coeff.denominator, sb.coeff.denominator)
        fa = sa.coeff.numerator * (den // sa.coeff.denominator)
        fb = sb.coeff.numerator * (den // sb.coeff.denominator)
        out = lincomb(self.entries, fa, other.entries, fb)
        scale = ExactScalar(Fraction(1, den), sa.base, sa.half_exp)
        return Tensor(self.n_lower, self.n_upper, self.dim, out, scale).normalized()

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        if other.slot != self.slot or other.dim != self.dim:
            return False
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        ratio = self.scale / other.scale
        if not ratio.is_rational:
            return False
        r = ratio.coeff
        left = lincomb(self.entries, r.numerator, self.entries, 0)
        right = lincomb(other.entries, r.denominator, other.entries, 0)
        return bool(np.array_equal(left, right))

    __hash__ = None

    def __repr__(self):
        return f"Tensor(slot={self.slot}, dim={self.dim}, scale={self.scale})"

    # serialization

    def to_dict(self) -> dict:
        return {
            "n_lower": self.n_lower,
            "n_upper": self.n_upper,
            "dim": self.dim,
            "base": self.scale.base,
            "half_exp": self.scale.half_exp,
            "scale": str(self.scale.coeff),
            "entries": [int(v) for v in self.entries.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Tensor":
        k, l, d = int(data["n_lower"]), int(data["n_upper"]), int(data["dim"])
        flat = [int(v) for v in data["entries"]]
        arr = np.array(flat, dtype=object if any(abs(v) >= INT_LIMIT for v in flat) else np.int64)
        scale = ExactScalar(Fraction(data["scale"]), int(data["base"]), int(data["half_exp"]))
        return cls(k, l, d, arr.reshape((d,) * (k + l)), scale)
