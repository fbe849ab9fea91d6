"""Exact arithmetic in a quadratic field Q(sqrt(r))."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

Rational = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


@dataclass(frozen=True)
class QuadSurd:
    """The number ``p + q*sqrt(r)`` with rational ``p, q`` and integer ``r``.

    A perfect-square ``r`` is folded into ``p``.  Negative ``r`` gives the
    imaginary quadratic field, where :meth:`sign` is undefined.
    """

    p: Fraction
    q: Fraction
    r: int

    def __post_init__(self):
        p, q, r = _frac(self.p), _frac(self.q), int(self.r)
        if is_square(r):
            p, q, r = p + q * isqrt(r), Fraction(0), 1 if r else 0
        elif q == 0:
            r = 0
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @classmethod
    def rational(cls, x: Rational) -> "QuadSurd":
        return cls(_frac(x), Fraction(0), 0)

    @classmethod
    def sqrt(cls, r: int) -> "QuadSurd":
        return cls(Fraction(0), Fraction(1), r)

    def _lift(self, other) -> "QuadSurd":
        if isinstance(other, QuadSurd):
            return other
        return QuadSurd.rational(other)

    def _field(self, other: "QuadSurd") -> int:
        if self.r in (0, 1):
            return other.r
        if other.r in (0, 1) or other.r == self.r:
            return self.r
        raise ValueError(f"cannot combine sqrt({self.r}) with sqrt({other.r})")

    def is_rational(self) -> bool:
        return self.q == 0

    def __add__(self, other):
        o = self._lift(other)
        return QuadSurd(self.p + o.p, self.q + o.q, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.p, -self.q, self.r)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        r = self._field(o)
        return QuadSurd(self.p * o.p + self.q * o.q * r, self.p * o.q + self.q * o.p, r)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadSurd":
        """The Galois conjugate ``p - q*sqrt(r)``."""
        return QuadSurd(self.p, -self.q, self.r)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.r

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conjugate()
        return QuadSurd(num.p / n, num.q / n, num.r)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return QuadSurd.rational(1) / self ** (-k)
        out = QuadSurd.rational(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadSurd.rational(other)
        if not isinstance(other, QuadSurd):
            return NotImplemented
        return self.p == other.p and self.q == other.q and (self.q == 0 or self.r == other.r)

    def __hash__(self):
        return hash((self.p, self.q, self.r if self.q else 0))

    def sign(self) -> int:
        """Exact sign of a real surd."""
        if self.r < 0 and self.q != 0:
            raise ValueError("sign is undefined for a non-real number")
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0 or sp == sq:
            return sp or sq
        if sp == 0:
            return sq
        # opposite signs: compare p^2 with q^2 r
        diff = self.p * self.p - self.q * self.q * self.r
        if diff == 0:
            return 0
        return sp if diff > 0 else sq

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        if self.r < 0:
            raise ValueError("non-real surd; use complex()")
        return float(self.p) + float(self.q) * self.r ** 0.5

    def __complex__(self):
        return complex(float(self.p)) + float(self.q) * complex(self.r) ** 0.5

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        sign = "-" if self.q < 0 else "+"
        return f"{self.p} {sign} {abs(self.q)}*sqrt({self.r})"

    def __repr__(self):
        return f"QuadSurd({self})"
