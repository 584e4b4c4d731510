"""Infinite-temperature average of the charges and string-charge densities."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .conjecture import x_infinity
from .lax import lax_block_derivative, lax_blocks
from .spin_algebra import build_spin_ops, check_jj


@dataclass(frozen=True)
class CasimirSpec:
    """``C2 = s- (x) s+ + s+ (x) s- + 2 sz (x) sz`` on ``V_j (x) V_j``.

    ``spectrum`` maps each eigenvalue to its multiplicity.  On the irrep of
    total spin ``S = r/2`` the eigenvalue is ``r(r+2)/4 - j(j+2)/2``.
    """

    jj: int
    operator: np.ndarray
    spectrum: dict


def casimir(jj: int) -> CasimirSpec:
    jj = check_jj(jj)
    sz, sp, sm = build_spin_ops(jj, "unitary").as_complex()
    K = np.kron
    c2 = K(sm, sp) + K(sp, sm) + 2 * K(sz, sz)
    ev = np.linalg.eigvalsh((c2 + c2.conj().T) / 2)
    spec: dict = {}
    for e in np.round(ev * 4) / 4:
        spec[float(e)] = spec.get(float(e), 0) + 1
    return CasimirSpec(jj, c2, spec)


def casimir_eigenvalue(jj: int, rlabel: int) -> float:
    return rlabel * (rlabel + 2) / 4 - jj * (jj + 2) / 2


def irrep_labels(jj: int) -> range:
    return range(0, 2 * check_jj(jj) + 1, 2)


def lambda_r(jj: int, rlabel: int, mu, x=None):
    """Eigenvalue of ``(1/2) tr_quantum L_j(mu, x)`` on the irrep of total spin ``r/2``.

    Only even ``r`` in ``0..2j`` occur in ``V_j (x) V_j``, each with
    multiplicity ``r + 1``.
    """
    jj = check_jj(jj)
    if rlabel not in irrep_labels(jj):
        raise ValueError(f"rlabel must be even and in 0..{2 * jj}")
    mu = np.asarray(mu, dtype=complex)
    x = mu if x is None else np.asarray(x, dtype=complex)
    den = (2 * mu - 1j * (jj + 1)) * (2 * x + 1j * (jj + 1))
    if np.any(np.abs(den) < 1e-14):
        raise ZeroDivisionError("lambda_r denominator vanishes")
    out = ((jj + 1) ** 2 - rlabel * (rlabel / 2 + 1) + 2j * (mu - x) + 4 * mu * x) / den
    return out if out.ndim else complex(out)


def half_trace(jj: int, mu, x=None) -> np.ndarray:
    """``(1/2)(L^1_1 + L^2_2)``: the single-site average over the quantum space."""
    blk = lax_blocks(check_jj(jj), mu, x)
    return (blk.b11 + blk.b22) / 2


def gibbs_average(jj: int, mu):
    jj = check_jj(jj)
    mu = np.asarray(mu, dtype=float)
    out = jj / (np.pi * ((jj + 1) ** 2 + 4 * mu * mu))
    return out if out.ndim else float(out)


def lambda0_finite_n(jj: int, mu: float, N: int) -> float:
    """``(1/2 pi i N) d/dx lambda_0^N`` at ``x = mu``, using the analytic derivative of ``lambda_0``."""
    jj = check_jj(jj)
    mu = complex(mu)
    den = (2 * mu - 1j * (jj + 1)) * (2 * mu + 1j * (jj + 1))
    lam = lambda_r(jj, 0, mu)
    dnum = -2j + 4 * mu
    dlam = dnum / den - lam * 2 / (2 * mu + 1j * (jj + 1))
    return float(np.real(N * lam ** (N - 1) * dlam / (2j * np.pi * N)))


def average_trace_finite_n(jj: int, mu: float, N: int) -> float:
    """``(1/2 pi i N) d/dx tr[(half_trace)^N]`` at ``x = mu`` with the full ``(j+1)^2`` matrix."""
    jj = check_jj(jj)
    if N < 1:
        raise ValueError("N must be >= 1")
    a = half_trace(jj, mu)
    d = lax_block_derivative(jj, mu)
    da = (d.b11 + d.b22) / 2
    val = np.trace(np.linalg.matrix_power(a, N - 1) @ da)  # d tr(A^N) = N tr(A^(N-1) dA)
    return float(np.real(val / (2j * np.pi)))


def _x_inf_ext(jj: int, mu):
    """``x_infinity`` with the convention ``X_0 = 0``."""
    if jj == 0:
        return np.zeros_like(np.asarray(mu, dtype=complex))
    return np.asarray(x_infinity(jj, mu))


@dataclass(frozen=True)
class DensityPair:
    jj: int
    rho: np.ndarray
    rho_bar: np.ndarray

    @property
    def eta(self) -> np.ndarray:
        return self.rho_bar / self.rho


def string_densities(jj: int, mu) -> DensityPair:
    """Particle and hole densities from the shifted closed-form charges."""
    jj = check_jj(jj)
    mu = np.asarray(mu, dtype=float)
    xp = _x_inf_ext(jj, mu + 0.5j)
    xm = _x_inf_ext(jj, mu - 0.5j)
    rho = xp + xm - _x_inf_ext(jj - 1, mu) - _x_inf_ext(jj + 1, mu)
    rho_bar = 4 * jj / (2 * np.pi * (jj * jj + 4 * mu * mu)) - xp - xm
    return DensityPair(jj, np.real(rho), np.real(rho_bar))


def density_closed_forms(jj: int, mu):
    """``(rho, rho_bar)`` as explicit rational functions of ``mu``."""
    mu = np.asarray(mu, dtype=float)
    rho = 8 / (2 * np.pi * (4 * mu * mu + jj * jj) * (4 * mu * mu + (jj + 2) ** 2))
    return rho, jj * (jj + 2) * rho


def eta(jj: int) -> int:
    return jj * (jj + 2)


def y_system_check(jj_max: int) -> int:
    """``max |eta_j^2 - (1 + eta_{j+1})(1 + eta_{j-1})|`` over ``j = 1..jj_max`` (integers)."""
    if jj_max < 1:
        raise ValueError("jj_max must be >= 1")
    return max(abs(eta(j) ** 2 - (1 + eta(j + 1)) * (1 + eta(j - 1))) for j in range(1, jj_max + 1))


def densities_csv(jjs, mus) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["jj", "mu", "rho", "rho_bar", "eta"])
    for jj in jjs:
        d = string_densities(jj, mus)
        for m, r, rb, e in zip(np.atleast_1d(mus), np.atleast_1d(d.rho), np.atleast_1d(d.rho_bar),
                               np.atleast_1d(d.eta)):
            w.writerow([jj, f"{m:.15g}", f"{r:.15g}", f"{rb:.15g}", f"{e:.15g}"])
    return buf.getvalue()
