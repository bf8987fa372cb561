"""Exact scalars of the form ``q * sqrt(b)`` with ``q`` rational.

Every value that shows up when spiders are contracted is a rational number
times a half-integer power of an integer.  Such a power can always be folded
into ``q * sqrt(b)`` with ``b`` squarefree, which gives a canonical form:
two scalars are equal exactly when their fields are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


class HomogeneityError(ArithmeticError):
    """Raised when adding scalars that live in different square-root classes."""


@lru_cache(maxsize=None)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` squarefree."""
    if n < 1:
        raise ValueError("squarefree_split needs a positive integer")
    s, f, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            f *= p
        p += 1
    return s, f * n


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


@dataclass(frozen=True, eq=False)
class ExactScalar:
    """The value ``coeff * base**(half_exp/2)``, stored in canonical form.

    After construction ``half_exp`` is 0 or 1 and ``base`` is squarefree;
    ``base == 1`` means the value is rational.
    """

    coeff: Fraction
    base: int = 1
    half_exp: int = 0

    def __post_init__(self):
        c = _as_fraction(self.coeff)
        b, e = int(self.base), int(self.half_exp)
        if b < 1:
            raise ValueError("base must be a positive integer")
        if c == 0 or b == 1:
            b, e = 1, 0
        else:
            q, r = divmod(e, 2)
            c *= Fraction(b) ** q
            if r:
                s, b = squarefree_split(b)
                c *= s
                e = 1 if b > 1 else 0
            else:
                b, e = 1, 0
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "half_exp", e)

    # constructors

    @classmethod
    def power(cls, base: int, half_exp: int) -> "ExactScalar":
        """``base ** (half_exp / 2)``."""
        return cls(Fraction(1), base, half_exp)

    @classmethod
    def coerce(cls, x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        return cls(_as_fraction(x))

    # queries

    @property
    def is_rational(self) -> bool:
        return self.half_exp == 0

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self.coeff

    def square(self) -> Fraction:
        return self.coeff * self.coeff * (self.base if self.half_exp else 1)

    def __float__(self) -> float:
        return float(self.coeff) * (self.base ** 0.5 if self.half_exp else 1.0)

    # arithmetic

    def __mul__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactScalar(self.coeff * o.coeff, self.base * o.base, 1)

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero scalar")
        return ExactScalar(1 / (self.coeff * self.base), self.base, self.half_exp)

    def __truediv__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) * self.inverse()

    def __neg__(self):
        return ExactScalar(-self.coeff, self.base, self.half_exp)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ExactScalar(1)
        for _ in range(k):
            out = out * self
        return out

    def __add__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero:
            return self
        if self.is_zero:
            return o
        if o.base != self.base:
            raise HomogeneityError(f"cannot add {self} and {o}")
        return ExactScalar(self.coeff + o.coeff, self.base, self.half_exp)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other):
        return ExactScalar.coerce(other) - self

    def conjugate(self) -> "ExactScalar":
        return self

    # comparison

    def __eq__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.coeff, self.base, self.half_exp) == (o.coeff, o.base, o.half_exp)

    def __hash__(self):
        if self.is_rational:
            return hash(self.coeff)
        return hash((self.coeff, self.base))

    def __repr__(self):
        return f"ExactScalar({self})"

    def __str__(self):
        if self.is_rational:
            return str(self.coeff)
        return f"{self.coeff}*sqrt({self.base})"

    # serialization

    def to_dict(self) -> dict:
        return {"coeff": str(self.coeff), "base": self.base, "half_exp": self.half_exp}

    @classmethod
    def from_dict(cls, data: dict) -> "ExactScalar":
        return cls(Fraction(data["coeff"]), int(data.get("base", 1)), int(data.get("half_exp", 0)))
