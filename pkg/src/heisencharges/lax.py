"""Composite two-channel Lax blocks on V_j (x) V_j.

Every block is bilinear in the shifted spectral parameters
``mu_minus = mu - i/2`` and ``x_plus = x + i/2``::

    bare = C0 + mu_minus * Cmu + x_plus * Cx + mu_minus * x_plus * Cmux

:func:`block_structure` produces the four coefficient matrices exactly
(Gaussian-rational entries, stored as real/imaginary Fraction arrays).  The
numeric backend (:func:`lax_blocks`) and the exact backend
(:func:`exact_top_blocks`) both start from it, so the two cannot drift apart.

The normalized block is ``f(mu, x) * bare`` with
``f = 1 / ((mu - i c)(x + i c))`` and ``c = (j + 1) / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .polynomials import GaussPoly, gauss
from .spin_algebra import build_spin_ops, check_jj, top_sector

BLOCK_NAMES = ("b11", "b22", "b12", "b21")
SINGULAR_TOL = 1e-14


class SingularPointError(ArithmeticError):
    """The normalization factor has a pole at the requested spectral point."""


@dataclass(frozen=True)
class ExactMatrix:
    """Gaussian-rational matrix kept as separate real and imaginary parts."""

    re: np.ndarray
    im: np.ndarray

    def to_complex(self) -> np.ndarray:
        return np.array(self.re, dtype=float) + 1j * np.array(self.im, dtype=float)

    def restrict(self, idx) -> "ExactMatrix":
        ix = np.ix_(idx, idx)
        return ExactMatrix(self.re[ix], self.im[ix])

    def entry(self, i, j):
        return gauss((self.re[i, j], self.im[i, j]))


@dataclass(frozen=True)
class BlockStructure:
    c0: ExactMatrix
    cmu: ExactMatrix
    cx: ExactMatrix
    cmux: ExactMatrix

    def restrict(self, idx) -> "BlockStructure":
        return BlockStructure(*(m.restrict(idx) for m in (self.c0, self.cmu, self.cx, self.cmux)))


def _zero(n):
    return np.full((n, n), Fraction(0), dtype=object)


@lru_cache(maxsize=None)
def block_structure(jj: int, convention: str = "rational") -> dict[str, BlockStructure]:
    """Exact coefficient matrices of the four bare blocks.

    ``b11 = (mu- + i sz)(x) (x+ + i sz) - sm (x) sp``
    ``b22 = (mu- - i sz)(x) (x+ - i sz) - sp (x) sm``
    ``b12 = i mu- (1 (x) sp) + i x+ (sp (x) 1) - sp (x) sz + sz (x) sp``
    ``b21 = i mu- (1 (x) sm) + i x+ (sm (x) 1) + sm (x) sz - sz (x) sm``
    """
    jj = check_jj(jj)
    ops = build_spin_ops(jj, convention)
    n = jj + 1
    N = n * n
    if convention == "rational":
        eye = np.full((n, n), Fraction(0), dtype=object)
        for k in range(n):
            eye[k, k] = Fraction(1)
    else:
        eye = np.eye(n)
    K = np.kron
    sz, sp, sm = ops.sz, ops.sp, ops.sm
    one = K(eye, eye)

    def real(m):
        return m if convention == "rational" else np.asarray(m, dtype=float)

    zero = _zero(N) if convention == "rational" else np.zeros((N, N))

    def em(re=None, im=None):
        return ExactMatrix(zero if re is None else real(re), zero if im is None else real(im))

    out = {}
    # (i sz) (x) (i sz) = -(sz (x) sz)
    out["b11"] = BlockStructure(
        c0=em(re=-K(sz, sz) - K(sm, sp)),
        cmu=em(im=K(eye, sz)),
        cx=em(im=K(sz, eye)),
        cmux=em(re=one),
    )
    out["b22"] = BlockStructure(
        c0=em(re=-K(sz, sz) - K(sp, sm)),
        cmu=em(im=-K(eye, sz)),
        cx=em(im=-K(sz, eye)),
        cmux=em(re=one),
    )
    out["b12"] = BlockStructure(
        c0=em(re=-K(sp, sz) + K(sz, sp)),
        cmu=em(im=K(eye, sp)),
        cx=em(im=K(sp, eye)),
        cmux=em(),
    )
    out["b21"] = BlockStructure(
        c0=em(re=K(sm, sz) - K(sz, sm)),
        cmu=em(im=K(eye, sm)),
        cx=em(im=K(sm, eye)),
        cmux=em(),
    )
    return out


@lru_cache(maxsize=None)
def _complex_structure(jj: int, convention: str):
    st = block_structure(jj, convention)
    return {
        name: tuple(m.to_complex() for m in (s.c0, s.cmu, s.cx, s.cmux))
        for name, s in st.items()
    }


@dataclass(frozen=True)
class SpectralPoint:
    mu: complex
    x: complex


@dataclass(frozen=True)
class LaxBlocks:
    """The four ``(j+1)^2``-dimensional blocks ``L^1_1, L^2_2, L^1_2, L^2_1``."""

    jj: int
    b11: np.ndarray
    b22: np.ndarray
    b12: np.ndarray
    b21: np.ndarray
    normalized: bool = True

    def __getitem__(self, key):
        """``blocks[(a, b)]`` with ``a, b`` in ``{1, 2}``."""
        a, b = key
        return getattr(self, f"b{a}{b}")

    def top(self, name: str = "b11") -> np.ndarray:
        idx = top_sector(self.jj).flat
        return getattr(self, name)[np.ix_(idx, idx)]


def norm_factor(jj: int, mu, x=None):
    """``1 / ((mu - i c)(x + i c))`` with ``c = (j + 1)/2``; ``x`` defaults to ``mu``."""
    jj = check_jj(jj)
    if x is None:
        x = mu
    c = (jj + 1) / 2
    den = (np.asarray(mu) - 1j * c) * (np.asarray(x) + 1j * c)
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularPointError(f"normalization is singular at mu={mu}, x={x} (j={jj})")
    return 1 / den


def _combine(coeffs, mum, xp):
    c0, cmu, cx, cmux = coeffs
    mum = np.asarray(mum)[..., None, None]
    xp = np.asarray(xp)[..., None, None]
    return c0 + mum * cmu + xp * cx + mum * xp * cmux


def bare_blocks(jj: int, mu, x=None, convention: str = "rational") -> LaxBlocks:
    """Blocks without the normalization factor ``f``."""
    jj = check_jj(jj)
    x = mu if x is None else x
    st = _complex_structure(jj, convention)
    mum, xp = np.asarray(mu) - 0.5j, np.asarray(x) + 0.5j
    return LaxBlocks(jj, *(_combine(st[n], mum, xp) for n in BLOCK_NAMES), normalized=False)


def lax_blocks(jj: int, mu, x=None, convention: str = "rational") -> LaxBlocks:
    """Normalized blocks ``f(mu, x) * bare``.  ``mu``/``x`` may be arrays (batched)."""
    x = mu if x is None else x
    f = np.asarray(norm_factor(jj, mu, x))[..., None, None]
    bare = bare_blocks(jj, mu, x, convention)
    return LaxBlocks(bare.jj, *(f * getattr(bare, n) for n in BLOCK_NAMES))


def lax_block_derivative(jj: int, mu, convention: str = "rational") -> LaxBlocks:
    """``d/dx`` of the normalized blocks at ``x = mu``.

    ``d(f B) = f' B + f dB`` with ``f' = -f / (mu + i c)`` and
    ``dB = Cx + mu_minus * Cmux``.
    """
    jj = check_jj(jj)
    c = (jj + 1) / 2
    f = np.asarray(norm_factor(jj, mu))[..., None, None]
    fprime = -f / (np.asarray(mu)[..., None, None] + 1j * c)
    st = _complex_structure(jj, convention)
    mum = (np.asarray(mu) - 0.5j)[..., None, None]
    bare = bare_blocks(jj, mu, convention=convention)
    out = []
    for name in BLOCK_NAMES:
        _, _, cx, cmux = st[name]
        out.append(fprime * getattr(bare, name) + f * (cx + mum * cmux))
    return LaxBlocks(jj, *out)


def top_diagonal_blocks(jj: int, mu, convention: str = "rational"):
    """Normalized diagonal blocks and their x-derivatives on W(j, j) at ``x = mu``.

    Returns ``(L11, L22, dL11, dL22)``; arrays are batched over ``mu``.
    """
    idx = top_sector(jj).flat
    ix = np.ix_(idx, idx)
    blk = lax_blocks(jj, mu, convention=convention)
    dblk = lax_block_derivative(jj, mu, convention=convention)
    return (blk.b11[..., ix[0], ix[1]], blk.b22[..., ix[0], ix[1]],
            dblk.b11[..., ix[0], ix[1]], dblk.b22[..., ix[0], ix[1]])


# exact backend -------------------------------------------------------------

_MU = GaussPoly.mu()
_MU_MINUS = _MU + GaussPoly([gauss((0, Fraction(-1, 2)))])
_X_PLUS = _MU + GaussPoly([gauss((0, Fraction(1, 2)))])


def _poly_matrix(st: BlockStructure, derivative: bool) -> list[list[GaussPoly]]:
    n = st.c0.re.shape[0]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            cx, cmux = st.cx.entry(i, j), st.cmux.entry(i, j)
            if derivative:
                p = GaussPoly([cx]) + _MU_MINUS.scale(cmux)
            else:
                c0, cmu = st.c0.entry(i, j), st.cmu.entry(i, j)
                p = (GaussPoly([c0]) + _MU_MINUS.scale(cmu) + _X_PLUS.scale(cx)
                     + (_MU_MINUS * _X_PLUS).scale(cmux))
            row.append(p)
        rows.append(row)
    return rows


@lru_cache(maxsize=None)
def exact_top_blocks(jj: int):
    """Bare diagonal blocks on W(j, j) at ``x = mu`` as GaussPoly matrices.

    Returns ``{1: (B, dB), 2: (B, dB)}`` where ``dB`` is the bare x-derivative.
    Normalization ``f = 1 / g`` with ``g = mu^2 + c^2`` is left to the caller.
    """
    st = block_structure(jj, "rational")
    idx = top_sector(jj).flat
    out = {}
    for s, name in ((1, "b11"), (2, "b22")):
        r = st[name].restrict(idx)
        out[s] = (_poly_matrix(r, False), _poly_matrix(r, True))
    return out


def exact_norm_polynomial(jj: int) -> GaussPoly:
    """``g(mu) = (mu - i c)(mu + i c) = mu^2 + c^2``, so that ``f(mu, mu) = 1/g``."""
    c = Fraction(check_jj(jj) + 1, 2)
    return GaussPoly([c * c, 0, 1])
