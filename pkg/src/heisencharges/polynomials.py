"""Univariate polynomials with exact Gaussian-rational coefficients.

Coefficients are stored ascending in degree as elements of sympy's ``QQ_I``
field.  The zero polynomial has an empty coefficient list and degree
``-inf``.  Only the handful of ring operations needed by the exact charge
pipeline are provided.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ_I

ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)


class NonDivisibleError(ArithmeticError):
    """Raised by :func:`exact_divide` when the remainder is nonzero."""


def gauss(value) -> "QQ_I.dtype":
    """Coerce ints, Fractions, complex-with-rational-parts or QQ_I to ``QQ_I``."""
    if isinstance(value, QQ_I.dtype):
        return value
    if isinstance(value, complex):
        return QQ_I(Fraction(value.real).limit_denominator(1 << 62),
                    Fraction(value.imag).limit_denominator(1 << 62))
    if isinstance(value, Fraction):
        return QQ_I(_qq(value), 0)
    if isinstance(value, int):
        return QQ_I(value, 0)
    if isinstance(value, tuple) and len(value) == 2:
        return QQ_I(_qq(Fraction(value[0])), _qq(Fraction(value[1])))
    return QQ_I.convert(value)


def _qq(fr: Fraction):
    from sympy import QQ
    return QQ(fr.numerator, fr.denominator)


def _is_zero(c) -> bool:
    return QQ_I.is_zero(c)


def to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class GaussPoly:
    """Polynomial in ``mu`` over Q(i); immutable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [gauss(c) for c in coeffs]
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    # construction helpers
    @classmethod
    def constant(cls, c) -> "GaussPoly":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c=1) -> "GaussPoly":
        return cls([0] * degree + [c])

    @classmethod
    def mu(cls) -> "GaussPoly":
        return cls([0, 1])

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    @property
    def lead(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussPoly):
            other = GaussPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "GaussPoly(0)"
        terms = [f"({c})*mu^{k}" for k, c in enumerate(self.coeffs) if not _is_zero(c)]
        return "GaussPoly(" + " + ".join(terms) + ")"

    # ring operations
    def __add__(self, other) -> "GaussPoly":
        other = _poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return GaussPoly([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self) -> "GaussPoly":
        return GaussPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "GaussPoly":
        return self + (-_poly(other))

    def __rsub__(self, other) -> "GaussPoly":
        return _poly(other) - self

    def __mul__(self, other) -> "GaussPoly":
        other = _poly(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return GaussPoly()
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if _is_zero(x):
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return GaussPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GaussPoly":
        if n < 0:
            raise ValueError("negative power")
        result, base = GaussPoly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "GaussPoly":
        c = gauss(c)
        return GaussPoly([c * x for x in self.coeffs])

    def derivative(self) -> "GaussPoly":
        return GaussPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation at a Python number (float/complex result)."""
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + complex(float(c.x), float(c.y))
        return acc

    def evaluate_exact(self, x):
        x = gauss(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "GaussPoly":
        if not self.coeffs:
            return self
        inv = ONE / self.lead
        return GaussPoly([c * inv for c in self.coeffs])

    def conjugate(self) -> "GaussPoly":
        return GaussPoly([QQ_I(c.x, -c.y) for c in self.coeffs])

    def real_part(self) -> "GaussPoly":
        return GaussPoly([QQ_I(c.x, 0) for c in self.coeffs])

    def imag_part(self) -> "GaussPoly":
        return GaussPoly([QQ_I(c.y, 0) for c in self.coeffs])

    def is_real(self) -> bool:
        return all(c.y == 0 for c in self.coeffs)

    def is_even(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs[1::2])

    def rational_coefficients(self) -> list[Fraction]:
        if not self.is_real():
            raise ValueError("polynomial has non-real coefficients")
        return [to_fraction(c.x) for c in self.coeffs]


def _poly(x) -> GaussPoly:
    return x if isinstance(x, GaussPoly) else GaussPoly([x])


def add(a: GaussPoly, b: GaussPoly) -> GaussPoly:
    return a + b


def mul(a: GaussPoly, b: GaussPoly) -> GaussPoly:
    return a * b


def derivative(a: GaussPoly) -> GaussPoly:
    return a.derivative()


def divmod_poly(a: GaussPoly, b: GaussPoly) -> tuple[GaussPoly, GaussPoly]:
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db = len(b.coeffs) - 1
    inv = ONE / b.lead
    quot = [ZERO] * max(len(rem) - db, 0)
    for k in range(len(rem) - 1 - db, -1, -1):
        q = rem[k + db] * inv
        if _is_zero(q):
            continue
        quot[k] = q
        for j, c in enumerate(b.coeffs):
            rem[k + j] -= q * c
    return GaussPoly(quot), GaussPoly(rem[:db] if db > 0 else [])


def exact_divide(a: GaussPoly, b: GaussPoly) -> GaussPoly:
    q, r = divmod_poly(a, b)
    if not r.is_zero():
        raise NonDivisibleError("polynomial is not divisible")
    return q


def gcd(a: GaussPoly, b: GaussPoly) -> GaussPoly:
    """Monic greatest common divisor (Euclid over the field Q(i))."""
    while not b.is_zero():
        a, b = b, divmod_poly(a, b)[1].monic()
    return a.monic()


def content_gcd(polys: Sequence[GaussPoly]) -> GaussPoly:
    g = GaussPoly()
    for p in polys:
        g = gcd(g, p) if not g.is_zero() else p.monic()
        if g.degree == 0:
            break
    return g
