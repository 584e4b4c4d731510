"""The closed-form large-M charge, its large-mu approximation and deviations.

``x_infinity(j, mu) = (1/4 pi) j / (mu^2 + (j+1)^2/4)``

``x_tilde(j, mu, r) = (1/2 pi) B_j(r) / (mu^2 + (j+1)^2/4)`` where ``B_j``
depends on the state only through ``r = n2/n1``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .exact import RationalCharge, charge_exact
from .monodromy import SpinState, charge_numeric
from .spin_algebra import check_jj

R_SERIES_SWITCH = 1e-6
EXACT_MAX_M = 60


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[lo, hi]`` plus one local refinement pass."""

    lo: float = -10.0
    hi: float = 10.0
    points: int = 2001
    refinement: int = 10

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("GridSpec needs lo < hi")
        if self.points < 2:
            raise ValueError("GridSpec needs at least 2 points")
        if self.refinement < 1:
            raise ValueError("refinement factor must be >= 1")

    def coarse(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)

    def refine_around(self, index: int) -> np.ndarray:
        g = self.coarse()
        a, b = g[max(index - 1, 0)], g[min(index + 1, len(g) - 1)]
        n = int(round((b - a) / (g[1] - g[0]))) * self.refinement + 1
        return np.linspace(a, b, n)


def _c2(jj: int) -> Fraction:
    return Fraction(jj + 1, 2) ** 2


def x_infinity(jj: int, mu):
    jj = check_jj(jj)
    mu = np.asarray(mu, dtype=complex)
    den = mu * mu + float(_c2(jj))
    if np.any(np.abs(den) < 1e-15):
        raise ZeroDivisionError(f"x_infinity has a pole at mu = +-{(jj + 1) / 2}i")
    out = jj / (4 * np.pi * den)
    return out if out.ndim else complex(out)


def _bracket(jj: int, r):
    """``B_j(r)``; exact when ``r`` is a Fraction or int."""
    if r == 1:
        return Fraction(jj, 2)
    num = jj * (1 - r) * (r ** (jj + 1) + 1) - 2 * r * (1 - r ** jj)
    den = 2 * (r + 1) * (1 - r ** (jj + 1))
    return Fraction(jj, 2) - num / den if isinstance(r, (int, Fraction)) else jj / 2 - num / den


def tilde_bracket(jj: int, r):
    """``B_j(r)`` with the analytic branch ``(j/2)(1 - (j+2) eps^2 / 12)`` near ``r = 1``."""
    jj = check_jj(jj)
    if r < 0:
        raise ValueError("r must be non-negative")
    if not isinstance(r, (int, Fraction)) and abs(1 - r) < R_SERIES_SWITCH:
        eps = 1 - r
        return jj / 2 * (1 - (jj + 2) * eps * eps / 12)
    return _bracket(jj, r)


def x_tilde(jj: int, mu, r):
    jj = check_jj(jj)
    b = float(tilde_bracket(jj, r))
    return x_infinity(jj, mu) * (2 * b / jj)


def x_tilde_leading_coefficient(jj: int, r) -> Fraction:
    """Exact ``a`` in ``x_tilde ~ a / (pi mu^2)``, i.e. ``B_j(r) / 2``."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("r must be non-negative")
    return _bracket(check_jj(jj), r) / 2


def state_ratio(psi) -> Fraction:
    """``n2/n1`` folded into ``[0, 1]`` using the ``r -> 1/r`` symmetry."""
    psi = SpinState.coerce(psi)
    lo, hi = sorted((psi.n1, psi.n2))
    return Fraction(lo, hi)


def r_inversion_check(jj: int, mu, r) -> float:
    if r <= 0:
        raise ValueError("r must be positive")
    return float(np.max(np.abs(np.asarray(x_tilde(jj, mu, r)) - np.asarray(x_tilde(jj, mu, 1 / r)))))


def epsilon_coefficient(jj: int) -> Fraction:
    """Coefficient ``a`` in ``x_tilde(r = 1 - eps) = x_infinity (1 + a eps^2) + O(eps^3)``."""
    return -Fraction(check_jj(jj) + 2, 12)


def epsilon_expansion_check(jj: int, mu, eps, coefficient=Fraction(1, 12)) -> float:
    """``|x_tilde(r = 1 - eps) - x_infinity (1 + coefficient eps^2)|``.

    The default coefficient is the commonly quoted ``1/12``; the true one is
    :func:`epsilon_coefficient`.
    """
    if abs(eps) > 0.3:
        raise ValueError("|eps| must be <= 0.3")
    xi = np.asarray(x_infinity(jj, mu))
    xt = np.asarray(x_tilde(jj, mu, 1 - eps))
    return float(np.max(np.abs(xt - xi * (1 + float(coefficient) * eps * eps))))


@dataclass
class DeviationResult:
    delta: float
    mu_at_sup: float
    backend: str
    excluded: list = field(default_factory=list)


def _charge_evaluator(psi: SpinState, jj: int, backend: str):
    if backend == "auto":
        backend = "exact" if psi.M <= EXACT_MAX_M else "numeric"
    if backend == "exact":
        rc = charge_exact(psi, jj)
        return (lambda mu: np.real(rc(mu))), backend
    if backend == "numeric":
        return (lambda mu: np.real(charge_numeric(psi, jj, mu, on_error="nan"))), backend
    raise ValueError(f"unknown backend {backend!r}")


def _relative(xv, xt):
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs((xv - xt) / xv)
    return rel


def deviation(psi, jj: int, grid: GridSpec = GridSpec(), backend: str = "auto",
              charge=None) -> DeviationResult:
    """``sup |(X - x_tilde) / X|`` over the grid, refined around the coarse maximum.

    ``charge`` may be any callable ``mu -> X`` to bypass the charge backends.
    Points where ``X`` is not finite or zero are excluded and listed.
    """
    psi = SpinState.coerce(psi)
    jj = check_jj(jj)
    if charge is None:
        xfun, backend = _charge_evaluator(psi, jj, backend)
    else:
        xfun, backend = (lambda mu: np.real(np.asarray(charge(mu)))), "custom"
    r = state_ratio(psi)

    def rel_on(mus):
        xv = np.asarray(xfun(mus), dtype=float)
        xt = np.real(np.asarray(x_tilde(jj, mus, r)))
        rel = _relative(xv, xt)
        bad = ~np.isfinite(rel)
        return rel, bad

    g = grid.coarse()
    rel, bad = rel_on(g)
    excluded = [float(m) for m in g[bad]]
    if bad.all():
        return DeviationResult(float("nan"), float("nan"), backend, excluded)
    i = int(np.nanargmax(np.where(bad, -np.inf, rel)))
    fine = grid.refine_around(i)
    rf, bf = rel_on(fine)
    excluded += [float(m) for m in fine[bf] if m not in g]
    j = int(np.argmax(np.where(bf, -np.inf, rf)))
    best = (rf[j], fine[j]) if rf[j] >= rel[i] else (rel[i], g[i])
    return DeviationResult(float(best[0]), float(best[1]), backend, excluded)


def thermo_integrand(a, mu, c=1.0):
    return c / (2 * np.pi ** 2) / ((4 * a * a + 1) * (a * a + (mu - a) ** 2 + 0.5))


def thermo_integral(mu: float, c: float = 1.0) -> float:
    """Integral of the pole density against the hyperbola kernel over the real line."""
    val, err = integrate.quad(thermo_integrand, -np.inf, np.inf, args=(float(mu), float(c)),
                              epsabs=1e-12, epsrel=1e-12, limit=200)
    if not np.isfinite(val) or err > 1e-10:
        raise ArithmeticError(f"quadrature did not converge (error estimate {err})")
    return float(val)


def thermo_closed_form(mu, c: float = 1.0):
    return c / (4 * np.pi * (np.asarray(mu, dtype=float) ** 2 + 1))


def curve_csv(psi, jj: int, grid: GridSpec = GridSpec(), rc: RationalCharge | None = None) -> str:
    """CSV with columns mu, X_exact, X_tilde, X_infinity, rel_deviation."""
    psi = SpinState.coerce(psi)
    rc = rc or charge_exact(psi, jj)
    mus = grid.coarse()
    xe = np.real(rc(mus))
    xt = np.real(x_tilde(jj, mus, state_ratio(psi)))
    xi = np.real(x_infinity(jj, mus))
    rel = _relative(xe, xt)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mu", "X_exact", "X_tilde", "X_infinity", "rel_deviation"])
    for row in zip(mus, xe, xt, xi, rel):
        w.writerow([f"{v:.15g}" for v in row])
    return buf.getvalue()
