"""Exact charges X_j(mu) as reduced rational functions of mu.

Two independent routes are implemented.

:func:`charge_exact` (fast)
    Works over Q[t] with ``t = mu^2``.  On W(j, j) the bare diagonal blocks
    ``B_s`` are real polynomials in ``t`` and their x-derivatives are
    ``mu - i A_s`` with ``A_s`` a constant diagonal matrix.  Because
    ``w B_s = g w`` with ``g = mu^2 + c^2``, the first-order shift collapses to

        X = (1 / 2 pi M) * [ M c / g  -  S / (g^M (w.v)) ],
        S = sum_j g^(M-j) w . A_{s_j} . B_{s_(j-1)} ... B_{s_1} v,

    where ``v`` is a column of ``adj(P - g^M)``, ``P = B_{s_M} ... B_{s_1}``.
    Everything is real, so the result is manifestly even and real.

:func:`charge_exact_literal` (slow, for cross-checks)
    Follows the first-order perturbation formula verbatim over Q(i)[mu]
    with the full Leibniz derivative and no use of the left eigenvector
    shortcut, then asserts the imaginary and odd parts cancel.

Both start from the exact block structure in :mod:`heisencharges.lax`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Callable, Sequence

import flint
import numpy as np

from .lax import exact_norm_polynomial, exact_top_blocks
from .monodromy import SpinState
from .polynomials import GaussPoly, content_gcd, exact_divide, gcd, to_fraction
from .spin_algebra import check_jj, w_vector

DEFAULT_DEGREE_CAP = 600
SCHEMA = "heisencharges.rational_charge/1"


class DegreeCapError(RuntimeError):
    """The predicted denominator degree exceeds the configured cap."""


class AdjugateError(ArithmeticError):
    """All adjugate columns vanish, or ``w.v`` vanishes identically."""


# generic linear algebra over a polynomial ring ------------------------------

def bareiss_det(a: Sequence[Sequence], div: Callable, zero, one):
    """Fraction-free determinant; ``div`` must be exact division in the ring."""
    n = len(a)
    if n == 0:
        return one
    m = [list(row) for row in a]
    sign = 1
    prev = one
    for k in range(n - 1):
        if _iszero(m[k][k]):
            for r in range(k + 1, n):
                if not _iszero(m[r][k]):
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def _iszero(p) -> bool:
    return p == 0 if not isinstance(p, GaussPoly) else p.is_zero()


def adjugate_column(a, j: int, div: Callable, zero, one) -> list:
    """Column ``j`` of ``adj(a)``: entries ``(-1)^(i+j) det(a without row j, col i)``."""
    n = len(a)
    col = []
    for i in range(n):
        minor = [[a[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
        d = bareiss_det(minor, div, zero, one)
        col.append(d if (i + j) % 2 == 0 else -d)
    return col


def _fmpq_div(a, b):
    return a // b


def _gauss_div(a, b):
    return exact_divide(a, b)


def adjugate_unit_vector(m, one=None) -> list:
    """Null vector of ``m`` (a singular polynomial matrix) from its adjugate.

    The first column of ``adj(m)`` that is not identically zero is returned,
    divided by the gcd of its entries.  ``m`` holds either ``GaussPoly`` or
    ``flint.fmpq_poly`` entries; callers pass ``P - g^M I`` (the scalar
    normalization does not change null vectors).
    """
    n = len(m)
    gauss_ring = isinstance(m[0][0], GaussPoly)
    if gauss_ring:
        zero, one, div = GaussPoly(), GaussPoly([1]), _gauss_div
    else:
        zero, one, div = flint.fmpq_poly([]), flint.fmpq_poly([1]), _fmpq_div
    for j in range(n):
        col = adjugate_column(m, j, div, zero, one)
        if any(not _iszero(c) for c in col):
            break
    else:
        raise AdjugateError("all adjugate columns vanish (rank deficiency > 1)")
    if gauss_ring:
        g = content_gcd([c for c in col if not c.is_zero()])
        return [exact_divide(c, g) for c in col]
    g = reduce(lambda x, y: x.gcd(y), [c for c in col if not c.is_zero()])
    return [c // g for c in col]


# rational charge container -------------------------------------------------

def _int_list(poly: "flint.fmpz_poly") -> list[int]:
    return [int(c) for c in poly.coeffs()]


def _horner_ratio(num: Sequence[int], den: Sequence[int], t):
    """``num(t) / den(t)`` evaluated without overflow for large coefficients or |t|."""
    t = np.asarray(t, dtype=complex)

    def scaled(coeffs):
        bits = max(abs(c).bit_length() for c in coeffs) if coeffs else 0
        shift = max(bits - 900, 0)
        return np.array([float(c >> shift) if c >= 0 else -float((-c) >> shift)
                         for c in coeffs]), shift

    n, sn = scaled(list(num))
    d, sd = scaled(list(den))
    small = np.abs(t) <= 1
    out = np.empty(t.shape, dtype=complex)

    def horner(c, x):
        acc = np.zeros(x.shape, dtype=complex)
        for a in c[::-1]:
            acc = acc * x + a
        return acc

    ts = t[small]
    out[small] = horner(n, ts) / horner(d, ts)
    tl = t[~small]
    if tl.size:
        inv = 1 / tl
        # num(t)/den(t) = t^(dn - dd) num_rev(1/t)/den_rev(1/t)
        out[~small] = (tl ** (len(n) - len(d))) * horner(n[::-1], inv) / horner(d[::-1], inv)
    return out * 2.0 ** (sn - sd)


@dataclass(frozen=True)
class RationalCharge:
    """``X_j(mu) = (prefactor / pi) * num(mu^2) / den(mu^2)``.

    ``num`` and ``den`` are primitive integer coefficient lists in ``t = mu^2``
    (ascending).  ``den`` has positive leading coefficient; ``num`` too (its
    sign lives in ``prefactor``).
    """

    prefactor: Fraction
    num: tuple[int, ...]
    den: tuple[int, ...]
    jj: int
    psi: str

    @property
    def psi_len(self) -> int:
        return len(self.psi)

    @property
    def numerator_mu(self) -> list[int]:
        return _spread(self.num)

    @property
    def denominator_mu(self) -> list[int]:
        return _spread(self.den)

    @property
    def num_degree(self) -> int:
        """Degree in ``mu``."""
        return 2 * (len(self.num) - 1)

    @property
    def den_degree(self) -> int:
        return 2 * (len(self.den) - 1)

    def __call__(self, mu):
        mu = np.asarray(mu, dtype=complex)
        val = float(self.prefactor) / np.pi * _horner_ratio(self.num, self.den, mu * mu)
        return val if val.ndim else complex(val)

    def evaluate_exact(self, mu) -> Fraction:
        """Exact value of ``pi * X`` at rational ``mu``."""
        t = Fraction(mu) ** 2
        return self.prefactor * _eval_frac(self.num, t) / _eval_frac(self.den, t)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "psi": self.psi,
            "jj": self.jj,
            "prefactor_num": str(self.prefactor.numerator),
            "prefactor_den": str(self.prefactor.denominator),
            "numerator": [str(c) for c in self.num],
            "denominator": [str(c) for c in self.den],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_dict(), **kw)

    @classmethod
    def from_json(cls, data) -> "RationalCharge":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            prefactor=Fraction(int(data["prefactor_num"]), int(data["prefactor_den"])),
            num=tuple(int(c) for c in data["numerator"]),
            den=tuple(int(c) for c in data["denominator"]),
            jj=int(data["jj"]),
            psi=str(data["psi"]),
        )

    def pretty(self) -> str:
        def fmt(cs):
            terms = []
            for k in range(len(cs) - 1, -1, -1):
                c = cs[k]
                if c == 0:
                    continue
                p = 2 * k
                terms.append(f"{c}" + ("" if p == 0 else f" mu^{p}"))
            return " + ".join(terms).replace("+ -", "- ")
        return f"({self.prefactor}/pi) * ({fmt(self.num)}) / ({fmt(self.den)})"


def _spread(coeffs) -> list[int]:
    out = []
    for c in coeffs:
        out.extend([c, 0])
    return out[:-1]


def _eval_frac(coeffs, t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _normalize(num: "flint.fmpq_poly", den: "flint.fmpq_poly", jj: int, psi: str) -> RationalCharge:
    g = num.gcd(den)
    num, den = num // g, den // g
    # rational content: x = c_n / c_d * N / D with N, D primitive integer polys
    nn, dd = num.numer(), den.numer()
    cn = Fraction(int(nn.content()), int(num.denom())) if not nn.is_zero() else Fraction(0)
    cd = Fraction(int(dd.content()), int(den.denom()))
    N = _int_list(nn // nn.content()) if not nn.is_zero() else [0]
    D = _int_list(dd // dd.content())
    if D[-1] < 0:
        D = [-c for c in D]
        cd = -cd
    if N[-1] < 0:
        N = [-c for c in N]
        cn = -cn
    return RationalCharge(cn / cd, tuple(N), tuple(D), jj, psi)


# fast route ----------------------------------------------------------------

def _gauss_even_to_t(p: GaussPoly) -> "flint.fmpq_poly":
    if not (p.is_real() and p.is_even()):
        raise ValueError("expected a real even polynomial")
    cs = p.rational_coefficients()[::2]
    return flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in cs])


@lru_cache(maxsize=None)
def _t_structure(jj: int):
    """Bare top blocks in ``t`` and the diagonal ``A_s`` with ``dB_s = mu - i A_s``."""
    blocks = exact_top_blocks(jj)
    n = jj + 1
    B, A = {}, {}
    for s in (1, 2):
        bare, dbare = blocks[s]
        B[s] = [[_gauss_even_to_t(bare[i][k]) for k in range(n)] for i in range(n)]
        diag = []
        for i in range(n):
            for k in range(n):
                p = dbare[i][k]
                if i != k:
                    if not p.is_zero():
                        raise AssertionError("derivative block is not diagonal on W(j, j)")
                    continue
                cs = p.coeffs
                if len(cs) != 2 or cs[1] != GaussPoly([1]).coeffs[0] or cs[0].x != 0:
                    raise AssertionError("derivative block does not have the form mu - i a")
                a = -to_fraction(cs[0].y)
                diag.append(flint.fmpq(a.numerator, a.denominator))
        A[s] = diag
    g = _gauss_even_to_t(exact_norm_polynomial(jj))
    return B, A, g


def _matvec(m, v):
    n = len(v)
    return [sum((m[i][k] * v[k] for k in range(n) if not m[i][k].is_zero()), flint.fmpq_poly([]))
            for i in range(len(m))]


def _matmul(a, b):
    n = len(b)
    return [[sum((a[i][l] * b[l][j] for l in range(n) if not a[i][l].is_zero()), flint.fmpq_poly([]))
             for j in range(len(b[0]))] for i in range(len(a))]


def predicted_degree(M: int, jj: int) -> int:
    """Upper bound ``2 M j`` on the reduced denominator degree in ``mu``."""
    return 2 * M * jj


def charge_exact(psi, jj: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> RationalCharge:
    """Exact ``X_j`` of the periodic state built from ``psi``."""
    psi = SpinState.coerce(psi)
    jj = check_jj(jj)
    M = psi.M
    if predicted_degree(M, jj) > degree_cap:
        raise DegreeCapError(
            f"predicted degree {predicted_degree(M, jj)} exceeds cap {degree_cap}")
    B, A, g = _t_structure(jj)
    n = jj + 1
    w = [int(x) for x in w_vector(jj)]
    zero = flint.fmpq_poly([])
    P = [[flint.fmpq_poly([1]) if i == k else zero for k in range(n)] for i in range(n)]
    for s in psi:
        P = _matmul(B[s], P)
    gpow = [flint.fmpq_poly([1])]
    for _ in range(M):
        gpow.append(gpow[-1] * g)
    Q = [[P[i][k] - (gpow[M] if i == k else 0) for k in range(n)] for i in range(n)]
    v = adjugate_unit_vector(Q)
    wv = sum((w[k] * v[k] for k in range(n)), zero)
    if wv.is_zero():
        raise AdjugateError("w.v vanishes identically")
    S = zero
    u = v
    for j, s in enumerate(psi, start=1):
        S += gpow[M - j] * sum((w[k] * A[s][k] * u[k] for k in range(n)), zero)
        u = _matvec(B[s], u)
    c = flint.fmpq(jj + 1, 2)
    num = M * c * gpow[M - 1] * wv - S
    den = 2 * M * gpow[M] * wv
    return _normalize(num, den, jj, str(psi))


# literal route -------------------------------------------------------------

def _gmatmul(a, b):
    n = len(b)
    return [[sum((a[i][l] * b[l][j] for l in range(n)), GaussPoly()) for j in range(len(b[0]))]
            for i in range(len(a))]


def _gadd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def charge_exact_literal(psi, jj: int) -> RationalCharge:
    """Exact charge via ``delta = w dM v / w v`` over Q(i)[mu], no shortcuts.

    Slow; intended for small ``M`` as an independent check of
    :func:`charge_exact`.  Raises ``AssertionError`` if the reduced result
    is not real and even.
    """
    psi = SpinState.coerce(psi)
    jj = check_jj(jj)
    M = psi.M
    n = jj + 1
    blocks = exact_top_blocks(jj)
    g = exact_norm_polynomial(jj)
    ident = [[GaussPoly([1]) if i == k else GaussPoly() for k in range(n)] for i in range(n)]
    P, dP = ident, [[GaussPoly() for _ in range(n)] for _ in range(n)]
    for s in psi:
        B, dB = blocks[s]
        dP = _gadd(_gmatmul(dB, P), _gmatmul(B, dP))
        P = _gmatmul(B, P)
    gM = g ** M
    Q = [[P[i][k] - (gM if i == k else GaussPoly()) for k in range(n)] for i in range(n)]
    v = adjugate_unit_vector(Q)
    w = [int(x) for x in w_vector(jj)]

    def bil(m):
        return sum((m[i][k] * v[k] * w[i] for i in range(n) for k in range(n)), GaussPoly())

    wv = sum((v[k] * w[k] for k in range(n)), GaussPoly())
    if wv.is_zero():
        raise AdjugateError("w.v vanishes identically")
    c = Fraction(jj + 1, 2)
    mu_plus_ic = GaussPoly([(0, c), 1])
    # M(mu, x) = f^M P, d_x f^M = -M f^M / (mu + i c)
    # delta = [(mu + i c) w dP v - M w P v] / [(mu + i c) g^M w v]
    num = mu_plus_ic * bil(dP) - bil(P).scale(M)
    # X = delta / (2 pi i M)
    den = (mu_plus_ic * gM * wv).scale((0, 2 * M))
    h = gcd(num, den)
    num, den = exact_divide(num, h), exact_divide(den, h)
    lead = den.lead
    inv = GaussPoly([1]).coeffs[0] / lead
    num, den = num.scale(inv), den.scale(inv)
    if not (num.is_real() and den.is_real() and num.is_even() and den.is_even()):
        raise AssertionError("literal charge is not a real even rational function")
    to_t = lambda p: flint.fmpq_poly(  # noqa: E731
        [flint.fmpq(c.numerator, c.denominator) for c in p.rational_coefficients()[::2]])
    return _normalize(to_t(num), to_t(den), jj, str(psi))


def leading_coefficient(rc: RationalCharge) -> Fraction:
    """Coefficient ``a`` in ``X ~ a / (pi mu^2)`` as ``mu -> infinity``."""
    if rc.den_degree - rc.num_degree != 2:
        raise ValueError(
            f"degree gap is {rc.den_degree - rc.num_degree}, expected 2")
    return rc.prefactor * Fraction(rc.num[-1], rc.den[-1])
