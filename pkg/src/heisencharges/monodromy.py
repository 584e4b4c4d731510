"""Monodromy of a periodic product state and the numeric charge X_j(mu).

All charge work happens on the top sector W(j, j) (dimension j + 1): the
diagonal Lax blocks preserve it and both unit eigenvectors live there.
Functions accept scalar or 1-d array ``mu`` and broadcast over it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lax import lax_blocks, top_diagonal_blocks
from .spin_algebra import check_jj, top_sector, w_vector

# second-smallest singular value of (M - I) relative to ||M||
DEGENERACY_TOL = 1e-8
# |w.v| relative to ||w|| ||v||
OVERLAP_TOL = 1e-10


class PoleProximityError(ArithmeticError):
    """The unit eigenvalue is (numerically) degenerate: mu sits on or near a pole."""


@dataclass(frozen=True)
class SpinState:
    """A simple substate: a finite sequence of 1 (up) and 2 (down)."""

    sites: tuple[int, ...]

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        if not sites:
            raise ValueError("a spin state needs at least one site")
        if any(s not in (1, 2) for s in sites):
            raise ValueError(f"sites must be 1 or 2, got {self.sites!r}")
        object.__setattr__(self, "sites", sites)

    @classmethod
    def parse(cls, text: str) -> "SpinState":
        """Parse ``"1111212"``, ``"1,2,1"`` or ``"{1, 2}"``."""
        chars = [ch for ch in str(text) if ch not in " ,{}[]()"]
        if not chars or any(ch not in "12" for ch in chars):
            raise ValueError(f"cannot parse spin state {text!r}")
        return cls(tuple(int(ch) for ch in chars))

    @classmethod
    def coerce(cls, psi) -> "SpinState":
        if isinstance(psi, SpinState):
            return psi
        if isinstance(psi, str):
            return cls.parse(psi)
        return cls(tuple(psi))

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    def __str__(self):
        return "".join(map(str, self.sites))

    @property
    def M(self) -> int:
        return len(self.sites)

    @property
    def n1(self) -> int:
        return self.sites.count(1)

    @property
    def n2(self) -> int:
        return self.sites.count(2)

    @property
    def r(self) -> float:
        if self.n1 == 0:
            raise ZeroDivisionError("r = n2/n1 is undefined without up spins")
        return self.n2 / self.n1

    def rotate(self, k: int) -> "SpinState":
        k %= self.M
        return SpinState(self.sites[k:] + self.sites[:k])

    def flip(self) -> "SpinState":
        return SpinState(tuple(3 - s for s in self.sites))

    def repeat(self, times: int) -> "SpinState":
        return SpinState(self.sites * times)


@dataclass
class MonodromyData:
    matrix: np.ndarray
    derivative: np.ndarray | None = None
    v: np.ndarray | None = None
    w: np.ndarray | None = field(default=None)
    delta: complex | None = None


def _eye_like(jj, mu):
    n = jj + 1
    return np.broadcast_to(np.eye(n, dtype=complex), np.shape(mu) + (n, n)).copy()


def monodromy_matrix(psi, jj: int, mu, x=None, full_space: bool = False) -> np.ndarray:
    """``L^(M) ... L^(1)`` of diagonal blocks, site 1 rightmost.

    ``full_space=True`` returns the ``(j+1)^2``-dimensional product (debug path).
    """
    psi = SpinState.coerce(psi)
    jj = check_jj(jj)
    x = mu if x is None else x
    blk = lax_blocks(jj, mu, x)
    if full_space:
        factors = {1: blk.b11, 2: blk.b22}
        n = (jj + 1) ** 2
        out = np.broadcast_to(np.eye(n, dtype=complex), np.shape(mu) + (n, n)).copy()
    else:
        factors = {1: _top(blk.b11, jj), 2: _top(blk.b22, jj)}
        out = _eye_like(jj, mu)
    for s in psi:
        out = factors[s] @ out
    return out


def _top(arr, jj):
    idx = top_sector(jj).flat
    ix = np.ix_(idx, idx)
    return arr[..., ix[0], ix[1]]


def monodromy(psi, jj: int, mu) -> MonodromyData:
    return MonodromyData(matrix=monodromy_matrix(psi, jj, mu), w=w_vector(jj).astype(complex))


def _propagate(psi: SpinState, jj: int, mu):
    """Return ``(M, dM)`` with ``dM`` the exact Leibniz x-derivative at ``x = mu``."""
    L1, L2, dL1, dL2 = top_diagonal_blocks(jj, mu)
    L = {1: L1, 2: L2}
    dL = {1: dL1, 2: dL2}
    P = _eye_like(jj, mu)
    dP = np.zeros_like(P)
    for s in psi:
        dP = dL[s] @ P + L[s] @ dP
        P = L[s] @ P
    return P, dP


def monodromy_derivative(psi, jj: int, mu) -> np.ndarray:
    """``d/dx M(mu, x)`` at ``x = mu`` on W(j, j)."""
    return _propagate(SpinState.coerce(psi), check_jj(jj), mu)[1]


def _null_vectors(m: np.ndarray):
    """Unit right null vectors of ``m - I`` and a per-point conditioning flag."""
    n = m.shape[-1]
    a = m - np.eye(n)
    _, s, vh = np.linalg.svd(a)
    v = vh[..., -1, :].conj()
    scale = np.linalg.norm(m, ord=2, axis=(-2, -1)) if m.ndim > 2 else np.linalg.norm(m, 2)
    ok = s[..., -2] > DEGENERACY_TOL * np.maximum(scale, 1.0) if n > 1 else np.ones(s.shape[:-1], bool)
    # deterministic phase: first non-negligible component real positive
    mag = np.abs(v)
    first = np.argmax(mag > 1e-12 * mag.max(axis=-1, keepdims=True), axis=-1)
    ph = np.take_along_axis(v, first[..., None], axis=-1)
    v = v * (np.abs(ph) / ph)
    return v, ok


def unit_right_eigenvector(m: np.ndarray) -> np.ndarray:
    """Unit vector ``v`` with ``(m - I) v = 0``.

    Raises :class:`PoleProximityError` if the eigenvalue-1 direction is not
    well separated (second-smallest singular value of ``m - I`` below
    ``DEGENERACY_TOL * ||m||``).
    """
    m = np.asarray(m, dtype=complex)
    v, ok = _null_vectors(m)
    if not np.all(ok):
        raise PoleProximityError("eigenvalue-1 eigenspace is degenerate or near a Jordan block")
    return v


def _charge_batch(psi: SpinState, jj: int, mu):
    P, dP = _propagate(psi, jj, mu)
    v, ok = _null_vectors(P)
    w = w_vector(jj).astype(complex)
    wv = v @ w
    ok &= np.abs(wv) >= OVERLAP_TOL * np.linalg.norm(w) * np.linalg.norm(v, axis=-1)
    wdv = np.einsum("k,...kl,...l->...", w, dP, v)
    delta = wdv / np.where(ok, wv, 1.0)
    X = delta / (2j * np.pi * psi.M)
    return X, ok, v, delta


def charge_numeric(psi, jj: int, mu, on_error: str = "raise"):
    """Numeric charge ``X_j(mu) = delta / (2 pi i M)``, ``delta = w.dM.v / w.v``.

    Parameters
    ----------
    psi : SpinState, str or sequence of 1/2
    jj : int
    mu : complex or array of complex
    on_error : {"raise", "nan"}
        What to do at points where the unit eigenvector is ill-conditioned or
        ``w.v`` vanishes (poles of X).  With ``"nan"`` those entries are NaN.
    """
    psi = SpinState.coerce(psi)
    jj = check_jj(jj)
    mu_arr = np.asarray(mu, dtype=complex)
    X, ok, _, _ = _charge_batch(psi, jj, mu_arr)
    if not np.all(ok):
        if on_error == "raise":
            raise PoleProximityError(f"charge is singular near mu={mu_arr[~ok] if mu_arr.ndim else mu}")
        X = np.where(ok, X, np.nan)
    if mu_arr.ndim == 0:
        return complex(X)
    return X


def monodromy_data(psi, jj: int, mu: complex) -> MonodromyData:
    """Everything about the monodromy at a single point (raises near poles)."""
    psi = SpinState.coerce(psi)
    jj = check_jj(jj)
    P, dP = _propagate(psi, jj, complex(mu))
    v = unit_right_eigenvector(P)
    w = w_vector(jj).astype(complex)
    wv = w @ v
    if abs(wv) < OVERLAP_TOL * np.linalg.norm(w):
        raise PoleProximityError(f"w.v vanishes at mu={mu}")
    return MonodromyData(matrix=P, derivative=dP, v=v, w=w, delta=(w @ dP @ v) / wv)


def power_limit_oracle(psi, jj: int, mu: complex, n_over_m: int, h: float | None = None) -> complex:
    """Finite-N estimate ``(1 / 2 pi i N) d/dx tr[M(mu, x)^(N/M)]`` at ``x = mu``.

    Uses the full ``(j+1)^2``-dimensional monodromy and a central finite
    difference in ``x``; no eigenvectors are involved.
    """
    psi = SpinState.coerce(psi)
    K = int(n_over_m)
    if K < 1:
        raise ValueError("n_over_m must be >= 1")
    if h is None:
        h = min(1e-5, 1e-3 / (K * psi.M))

    def tr_power(x):
        m = monodromy_matrix(psi, jj, complex(mu), complex(x), full_space=True)
        return np.trace(np.linalg.matrix_power(m, K))

    d = (tr_power(mu + h) - tr_power(mu - h)) / (2 * h)
    return d / (2j * np.pi * K * psi.M)
