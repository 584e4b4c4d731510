"""Poles of exact charges: location, strip classification and the j = 1 laws.

Denominators are even in ``mu``, so roots are found for the polynomial in
``t = mu^2`` (half the degree) and mapped back as ``+-sqrt(t)``; this makes
the ``mu -> -mu`` pairing exact.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import flint
import mpmath
import numpy as np

from .exact import RationalCharge
from .monodromy import SpinState, monodromy_matrix
from .spin_algebra import check_jj, w_vector

STRIP_MARGIN = 1e-9
CLUSTER_RTOL = 1e-7


class RootFindingError(RuntimeError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class WrongRepresentationError(ValueError):
    pass


class PoleMismatchError(ArithmeticError):
    """The monodromy at the given point shows no Jordan block at eigenvalue 1."""


# Aberth-Ehrlich ----------------------------------------------------------------

def _initial_guesses(coeffs) -> np.ndarray:
    """Points on a circle of radius from the Fujiwara bound, rotated off-axis.

    Works from logarithms so arbitrarily large integer coefficients are fine.
    """
    n = len(coeffs) - 1
    logs = [math.log(abs(c)) if c != 0 else -math.inf for c in coeffs]
    cand = [(logs[n - k] - logs[n]) / k for k in range(1, n)]
    cand.append((logs[0] - math.log(2) - logs[n]) / n)
    lr = max(cand)
    radius = 2 * math.exp(lr) if math.isfinite(lr) else 1.0
    ang = 2 * np.pi * np.arange(n) / n + 0.4
    return radius * np.exp(1j * ang)


def _double_ratio(c: np.ndarray):
    desc = c[::-1]
    ddesc = (c[1:] * np.arange(1, len(c)))[::-1]
    return lambda z: np.polyval(desc, z) / np.polyval(ddesc, z)


def _ball_ratio(int_coeffs, prec: int):
    """Newton ratio ``p/p'`` evaluated in ``prec``-bit ball arithmetic, returned as complex128."""
    old = flint.ctx.prec
    flint.ctx.prec = prec
    try:
        p = flint.acb_poly([flint.acb(int(c)) for c in int_coeffs])
        dp = p.derivative()
    finally:
        flint.ctx.prec = old

    def ratio(z):
        old = flint.ctx.prec
        flint.ctx.prec = prec
        try:
            out = []
            for zi in z:
                x = flint.acb(complex(zi))
                out.append(complex((p(x) / dp(x)).mid()))
            return np.array(out, dtype=complex)
        finally:
            flint.ctx.prec = old
    return ratio


def aberth(coeffs, maxiter: int = 500, tol: float = 4e-16, ratio=None) -> tuple[np.ndarray, bool]:
    """Simultaneous Aberth-Ehrlich iteration; roots are carried in double precision.

    ``coeffs`` are ascending.  ``ratio`` maps an array of points to ``p/p'``;
    by default it is plain double-precision Horner, which is adequate for
    well-conditioned polynomials only.  Converged roots are frozen.
    Returns ``(roots, converged)``.
    """
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    n = len(c) - 1
    if n < 1:
        return np.array([], dtype=complex), True
    ratio = ratio or _double_ratio(np.asarray(c, dtype=complex))
    z = _initial_guesses(c)
    active = np.ones(n, bool)
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        r = ratio(z[idx])
        diff = z[idx, None] - z[None, :]
        diff[np.arange(len(idx)), idx] = np.inf
        s = (1 / diff).sum(axis=1)
        step = r / (1 - r * s)
        step = np.where(np.isfinite(step), step, 0)
        z[idx] -= step
        done = np.abs(step) <= tol * np.maximum(np.abs(z[idx]), np.finfo(float).tiny)
        active[idx[done]] = False
        if not active.any():
            return z, True
    return z, False


def relative_residuals(int_coeffs, z, prec: int = 400) -> np.ndarray:
    """``|p(z)| / sum |c_k| |z|^k`` for each root estimate."""
    old = flint.ctx.prec
    flint.ctx.prec = prec
    try:
        p = flint.acb_poly([flint.acb(int(c)) for c in int_coeffs])
        mags = [abs(int(c)) for c in int_coeffs]
        out = []
        for zi in z:
            x = flint.acb(complex(zi))
            az = flint.arb(abs(complex(zi)))
            scale = sum(flint.arb(m) * az ** k for k, m in enumerate(mags))
            out.append(float((abs(p(x)) / scale).mid()))
        return np.array(out)
    finally:
        flint.ctx.prec = old


def polynomial_roots_t(int_coeffs, prec: int = 400):
    """Roots of an integer polynomial (ascending coefficients) with relative residuals."""
    coeffs = [int(c) for c in int_coeffs]
    z, ok = aberth(coeffs, ratio=_ball_ratio(coeffs, prec))
    res = relative_residuals(coeffs, z, prec)
    if not ok or np.any(res > 1e-10):
        raise RootFindingError("Aberth iteration did not reach the residual target",
                               residual=float(res.max()))
    return z, res


def _clusters(t: np.ndarray, rtol: float):
    """Group nearly equal roots; returns (representatives, multiplicities)."""
    reps, mult = [], []
    for z in t:
        for i, r in enumerate(reps):
            if abs(z - r) <= rtol * max(abs(r), 1e-300):
                mult[i] += 1
                # running mean keeps the representative centred
                reps[i] = r + (z - r) / mult[i]
                break
        else:
            reps.append(z)
            mult.append(1)
    return np.array(reps), np.array(mult)


def _check_multiplicities(coeffs, reps, mult):
    """A cluster of size m must be a root of the first m - 1 derivatives too."""
    with mpmath.workdps(60):
        cs = [mpmath.mpf(int(c)) for c in coeffs][::-1]
        for z, m in zip(reps, mult):
            if m == 1:
                continue
            vals = mpmath.polyval(cs, mpmath.mpc(z), derivative=True)
            scale = sum(abs(mpmath.mpf(int(c))) * abs(z) ** k for k, c in enumerate(coeffs))
            if abs(vals[1]) * max(abs(z), 1) > 1e-6 * scale:
                raise RootFindingError(f"cluster of {m} approximations at t={z} is not a multiple root")


@dataclass
class PoleSet:
    """Distinct poles ``mu`` of a charge with multiplicities.

    ``roots`` contains both members of every ``+-mu`` pair.
    """

    roots: np.ndarray
    multiplicities: np.ndarray
    residual: float
    jj: int
    M: int
    t_roots: np.ndarray = field(default_factory=lambda: np.array([], dtype=complex))

    def __len__(self):
        return int(self.multiplicities.sum())

    def upper(self) -> np.ndarray:
        """Poles with ``Im(mu) >= 0``."""
        return self.roots[self.roots.imag >= 0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["re_mu", "im_mu", "multiplicity", "on_hyperbola_residual"])
        for z, m in zip(self.roots, self.multiplicities):
            wr.writerow([f"{z.real:.15g}", f"{z.imag:.15g}", int(m),
                         f"{abs(z.imag ** 2 - z.real ** 2 - 0.5):.15g}"])
        return buf.getvalue()


def find_poles(rc: RationalCharge) -> PoleSet:
    if len(rc.den) < 2:
        raise ValueError("denominator has no roots")
    t, res = polynomial_roots_t(rc.den)
    tr, tm = _clusters(t, CLUSTER_RTOL)
    _check_multiplicities(rc.den, tr, tm)
    mu = np.sqrt(tr.astype(complex))
    roots = np.concatenate([mu, -mu])
    mult = np.concatenate([tm, tm])
    order = np.lexsort((roots.imag, roots.real))
    return PoleSet(roots[order], mult[order], float(res.max()), rc.jj, rc.psi_len, tr)


@dataclass
class StripReport:
    inside_PS: list
    min_distance: float


def classify_physical_strip(ps: PoleSet, margin: float = STRIP_MARGIN) -> StripReport:
    """Poles with ``|Im mu| < 1/2 - margin``; ``min_distance`` is ``min |Im mu|``."""
    im = np.abs(ps.roots.imag)
    inside = [complex(z) for z in ps.roots[im < 0.5 - margin]]
    return StripReport(inside, float(im.min()) if im.size else np.inf)


def hyperbola_check(ps: PoleSet) -> float:
    """``max |Im(mu)^2 - Re(mu)^2 - 1/2|`` over the poles (j = 1 only)."""
    if ps.jj != 1:
        raise WrongRepresentationError("the hyperbola law holds for j = 1 only")
    z = ps.roots
    return float(np.max(np.abs(z.imag ** 2 - z.real ** 2 - 0.5)))


@dataclass
class CurveSolutions:
    k: np.ndarray
    mu_sq: np.ndarray
    mu: np.ndarray

    @property
    def mu_all(self) -> np.ndarray:
        return np.concatenate([self.mu, -self.mu])


def curve_solutions(M: int) -> CurveSolutions:
    """Solutions of ``(mu^2 / (mu^2 + 1))^M = 1``: ``mu^2 = (i/2) cot(pi k / M) - 1/2``."""
    if M < 2:
        raise ValueError("M must be >= 2")
    k = np.arange(1, M)
    mu_sq = 0.5j / np.tan(np.pi * k / M) - 0.5
    mu = np.sqrt(mu_sq)
    mu = np.where(mu.imag < 0, -mu, mu)
    return CurveSolutions(k, mu_sq, mu)


def match_to_curve(ps: PoleSet) -> float:
    """Largest distance from a pole to the nearest curve solution for its ``M``."""
    cs = curve_solutions(ps.M).mu_all
    return float(max(np.min(np.abs(cs - z)) for z in ps.roots))


@dataclass
class JordanReport:
    mu: complex
    gap_ratio: float
    defect_ratio: float
    overlap: float
    confirmed: bool


def jordan_check(psi, jj: int, pole: complex, tol: float = 1e-6, overlap_tol: float = 1e-8) -> JordanReport:
    """Check for a Jordan block at eigenvalue 1 of the monodromy at ``pole``.

    ``w`` is an exact left eigenvector for eigenvalue 1.  If that eigenvalue
    has a one-dimensional eigenspace with right eigenvector ``v``, then
    ``w.v = 0`` holds exactly when the eigenvalue is defective (a simple
    eigenvalue always has nonzero left-right overlap).  Both tests are
    scale-free, which matters near the normalization poles where ``||M||``
    is huge:

    * ``gap_ratio = s_min(M - I) / s_second(M - I) <= tol``;
    * ``overlap = |w.v| / (|w| |v|) <= overlap_tol``.

    ``defect_ratio = s_second((M - I)^2) / s_second(M - I)^2`` is reported as
    a diagnostic (small for a 2-dimensional block).
    """
    psi = SpinState.coerce(psi)
    jj = check_jj(jj)
    m = monodromy_matrix(psi, jj, complex(pole))
    n = jj + 1
    a = m - np.eye(n)
    _, s1, vh = np.linalg.svd(a)
    s2 = np.linalg.svd(a @ a, compute_uv=False)
    v = vh[-1].conj()
    w = w_vector(jj) / np.sqrt(n)
    overlap = float(abs(w @ v))
    gap = float(s1[-1] / s1[-2])
    defect = float(s2[-2] / s1[-2] ** 2)
    confirmed = gap <= tol and overlap <= overlap_tol
    rep = JordanReport(complex(pole), gap, defect, overlap, bool(confirmed))
    if not confirmed:
        raise PoleMismatchError(f"no Jordan block at eigenvalue 1 for mu={pole}: {rep}")
    return rep


def residues(rc: RationalCharge, ps: PoleSet) -> np.ndarray:
    """Diagnostic ``c_n`` with ``X = (1/2 pi) sum c_n / (mu - mu_n)`` near simple poles."""
    with mpmath.workdps(50):
        num = [mpmath.mpf(c) for c in rc.num][::-1]
        dden = [mpmath.mpf(c * k) for k, c in enumerate(rc.den)][1:][::-1]
        out = []
        for z in ps.roots:
            t = mpmath.mpc(z) ** 2
            res = mpmath.mpf(rc.prefactor.numerator) / rc.prefactor.denominator / mpmath.pi
            res *= mpmath.polyval(num, t) / (mpmath.polyval(dden, t) * 2 * mpmath.mpc(z))
            out.append(complex(2 * mpmath.pi * res))
    return np.array(out)


# pole density ---------------------------------------------------------------

def analytic_cdf(a):
    """CDF of the normalized density ``(2/pi) / (4 a^2 + 1)``."""
    return 0.5 + np.arctan(2 * np.asarray(a, dtype=float)) / np.pi


def curve_cdf(a):
    """CDF of ``Re(mu)`` for the curve solutions as ``M -> infinity``.

    With ``k/M`` uniform, ``a = Re(mu)`` on the upper branch has density
    ``(2/pi) / ((4 a^2 + 1) sqrt(a^2 + 1/2))``.
    """
    a = np.asarray(a, dtype=float)
    return 0.5 + np.arctan(4 * a * np.sqrt(a * a + 0.5)) / np.pi


@dataclass
class DensityComparison:
    a: np.ndarray
    empirical_cdf: np.ndarray
    analytic_cdf: np.ndarray
    sup_distance: float


def pole_density_compare(M: int, reference=analytic_cdf) -> DensityComparison:
    """Kolmogorov distance between ``Re(mu)`` of the curve solutions and a reference CDF."""
    cs = curve_solutions(M)
    a = np.sort(cs.mu.real)
    n = len(a)
    ref = reference(a)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    sup = float(max(np.max(np.abs(hi - ref)), np.max(np.abs(lo - ref))))
    return DensityComparison(a, hi, ref, sup)
