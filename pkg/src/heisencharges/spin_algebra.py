"""su(2) representation matrices on V_j and the top S^z sector of V_j (x) V_j.

Basis convention: ``e_0`` is the highest-weight vector, ``sz e_k = (j/2 - k) e_k``.
Two ladder normalizations are available:

``"rational"`` (default)
    ``sm e_k = e_{k+1}`` and ``sp e_k = k (j + 1 - k) e_{k-1}``.  All entries are
    integers, so exact arithmetic never needs square roots, and the left action
    of the diagonal Lax blocks on ``e_k (x) e_{j-k}`` has integer structure
    constants ``k (k - j - 1)`` and ``(k + 1)(k - j)``.

``"unitary"``
    The usual Condon-Shortley matrices (``sm = sp^T``).  Operator norms are only
    meaningful in this orthonormal basis.

The two conventions are related by a diagonal similarity, so charges agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

CONVENTIONS = ("rational", "unitary")


def check_jj(jj) -> int:
    """Validate a representation index ``jj = 2s`` and return it as ``int``."""
    if isinstance(jj, bool) or int(jj) != jj or jj < 1:
        raise ValueError(f"representation index must be a positive integer, got {jj!r}")
    return int(jj)


@dataclass(frozen=True)
class SpinOperators:
    """Spin matrices ``sz, sp, sm`` acting on V_j in the basis ``e_0 ... e_j``.

    For the rational convention the arrays have ``dtype=object`` and hold
    :class:`fractions.Fraction` entries; for the unitary convention they are
    float arrays.
    """

    jj: int
    sz: np.ndarray
    sp: np.ndarray
    sm: np.ndarray
    convention: str = "rational"

    @property
    def dim(self) -> int:
        return self.jj + 1

    def casimir(self) -> np.ndarray:
        """``sp sm + sm sp + 2 sz^2``, equal to ``2 s (s + 1)`` times identity."""
        return self.sp @ self.sm + self.sm @ self.sp + 2 * (self.sz @ self.sz)

    def as_complex(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.array(a, dtype=complex) for a in (self.sz, self.sp, self.sm))


def build_spin_ops(jj: int, convention: str = "rational") -> SpinOperators:
    jj = check_jj(jj)
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    n = jj + 1
    if convention == "rational":
        zero = Fraction(0)
        sz = np.full((n, n), zero, dtype=object)
        sp = np.full((n, n), zero, dtype=object)
        sm = np.full((n, n), zero, dtype=object)
        for k in range(n):
            sz[k, k] = Fraction(jj - 2 * k, 2)
        for k in range(1, n):
            sp[k - 1, k] = Fraction(k * (jj + 1 - k))
            sm[k, k - 1] = Fraction(1)
    else:
        s = jj / 2
        m = s - np.arange(n)
        sz = np.diag(m)
        sp = np.zeros((n, n))
        for k in range(1, n):
            # sp |s, m_k> = sqrt((s - m_k)(s + m_k + 1)) |s, m_k + 1>
            sp[k - 1, k] = np.sqrt((s - m[k]) * (s + m[k] + 1))
        sm = sp.T.copy()
    return SpinOperators(jj, sz, sp, sm, convention)


@dataclass(frozen=True)
class SectorBasis:
    """Basis pairs ``(k, l)`` of V_j (x) V_j with a fixed total ``S^z``.

    ``flat`` holds the positions of those pairs in the Kronecker-ordered
    ``(j+1)^2`` dimensional space (``k * (j + 1) + l``).
    """

    jj: int
    sz_total: Fraction
    indices: tuple[tuple[int, int], ...]

    @property
    def dim(self) -> int:
        return len(self.indices)

    @property
    def flat(self) -> list[int]:
        n = self.jj + 1
        return [k * n + l for k, l in self.indices]


def sector(jj: int, sz_total) -> SectorBasis:
    """All pairs ``(k, l)`` with ``(j/2 - k) + (j/2 - l) == sz_total``, k ascending."""
    jj = check_jj(jj)
    sz_total = Fraction(sz_total)
    idx = tuple(
        (k, l)
        for k in range(jj + 1)
        for l in range(jj + 1)
        if Fraction(jj - k - l) == sz_total
    )
    return SectorBasis(jj, sz_total, idx)


def top_sector(jj: int) -> SectorBasis:
    """The sector W(j, j) spanned by ``e_k (x) e_{j-k}`` (total ``S^z = 0``)."""
    return sector(jj, 0)


def all_sectors(jj: int) -> list[SectorBasis]:
    jj = check_jj(jj)
    return [sector(jj, Fraction(s)) for s in range(jj, -jj - 1, -1)]


def w_vector(jj: int) -> np.ndarray:
    """Left unit eigenvector of the diagonal blocks on W(j, j): ``w_k = (-1)^k``."""
    jj = check_jj(jj)
    return np.array([(-1) ** k for k in range(jj + 1)], dtype=np.int64)


def total_sz(jj: int, convention: str = "rational") -> np.ndarray:
    ops = build_spin_ops(jj, convention)
    eye = np.eye(jj + 1, dtype=int).astype(ops.sz.dtype)
    return np.kron(ops.sz, eye) + np.kron(eye, ops.sz)
