"""Exact scalars of the form sum_m c_m * sqrt(m) with rational c_m.

Every coefficient produced by Dunkl operators on the catalogued root systems
(Z2^d, A2, B2, I2(3|4|6)) lives in a real quadratic-surd extension of Q
generated by sqrt(2) and sqrt(3): reflection matrices contribute sqrt(3)/2
entries, root coordinates contribute sqrt(2) factors, and divided differences
only ever divide by field elements.  This module implements that field on top
of stdlib Fractions.  It is closed under +, -, *, / and has exact zero tests,
which is what makes the oscillator eigenvalue identity and the pairing
orthogonality checkable with zero residual.

Square roots of general field elements (the Gram-Schmidt normalizers) are NOT
representable here; callers keep orthogonal bases unnormalized and divide by
exact norms instead, which stays inside the field.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def squarefree_split(n: int) -> tuple[int, int]:
    """Factor n = s*s*f with f squarefree; return (s, f). n must be positive."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, f, d, m = 1, 1, 2, n
    while d * d <= m:
        e = 0
        while m % d == 0:
            m //= d
            e += 1
        s *= d ** (e // 2)
        if e % 2:
            f *= d
        d += 1
    return s, f * m


@lru_cache(maxsize=None)
def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


@lru_cache(maxsize=None)
def _sqrt_float(m: int) -> float:
    return math.sqrt(m)


class Surd:
    """A finite sum of c_m * sqrt(m); keys m are squarefree positive ints."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        # terms must already be normalized: squarefree keys, no zero values
        self.terms = terms if terms is not None else {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def of(value) -> "Surd":
        if isinstance(value, Surd):
            return value
        value = Fraction(value)
        return Surd({1: value} if value else {})

    @staticmethod
    def sqrt_int(n: int, scale=1) -> "Surd":
        """scale * sqrt(n), exactly."""
        s, f = squarefree_split(n)
        c = Fraction(scale) * s
        return Surd({f: c} if c else {})

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            c2 = terms.get(m, 0) + c
            if c2:
                terms[m] = c2
            else:
                terms.pop(m, None)
        return Surd(terms)

    __radd__ = __add__

    def __neg__(self):
        return Surd({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                g = math.gcd(m1, m2)
                key = (m1 // g) * (m2 // g)
                c = c1 * c2 * g
                c3 = terms.get(key, 0) + c
                if c3:
                    terms[key] = c3
                else:
                    terms.pop(key, None)
        return Surd(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = Surd.of(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- field inverse ------------------------------------------------------

    def conjugate_wrt(self, p: int) -> "Surd":
        """Galois conjugate flipping the sign of sqrt(p)."""
        return Surd({m: (-c if m % p == 0 else c) for m, c in self.terms.items()})

    def inverse(self) -> "Surd":
        if not self.terms:
            raise ZeroDivisionError("surd division by zero")
        num, den = Surd.of(1), self
        while not den.is_rational():
            key = max(m for m in den.terms if m > 1)
            p = _smallest_prime_factor(key)
            conj = den.conjugate_wrt(p)
            num = num * conj
            den = den * conj
        r = den.terms[1]
        return num * Surd.of(Fraction(r.denominator, r.numerator))

    # -- queries ------------------------------------------------------------

    def is_rational(self) -> bool:
        return all(m == 1 for m in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.terms.get(1, Fraction(0))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __float__(self):
        return float(sum(float(c) * _sqrt_float(m) for m, c in self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "Surd(0)"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            parts.append(str(c) if m == 1 else f"{c}*sqrt({m})")
        return "Surd(" + " + ".join(parts) + ")"


def _coerce(value):
    if isinstance(value, Surd):
        return value
    if isinstance(value, (int, Fraction)):
        v = Fraction(value)
        return Surd({1: v} if v else {})
    return NotImplemented


ZERO = Surd()
ONE = Surd.of(1)
SQRT2 = Surd.sqrt_int(2)
SQRT3 = Surd.sqrt_int(3)
SQRT6 = Surd.sqrt_int(6)
