from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from heisencharges.exact import (
    DegreeCapError, RationalCharge, charge_exact, charge_exact_literal, leading_coefficient,
    predicted_degree,
)
from heisencharges.monodromy import (
    PoleProximityError, SpinState, charge_numeric, monodromy_data, power_limit_oracle,
)

from conftest import GOLDEN, GOLDEN_J1_DEN, GOLDEN_J1_NUM


def sympy_charge(psi: str, jj: int):
    """Charge built from scratch with sympy: full kron blocks, symbolic x-derivative."""
    mu, x = sp.symbols("mu x")
    n = jj + 1
    sz = sp.diag(*[sp.Rational(jj, 2) - k for k in range(n)])
    spl = sp.zeros(n)
    for k in range(1, n):
        spl[k - 1, k] = sp.sqrt(k * (n - k))
    sm = spl.T
    one = sp.eye(n)
    kp = sp.kronecker_product
    c = sp.Rational(jj + 1, 2)
    f = 1 / ((mu - sp.I * c) * (x + sp.I * c))
    mm, xp = mu - sp.I / 2, x + sp.I / 2
    b = {1: f * (kp(mm * one + sp.I * sz, xp * one + sp.I * sz) - kp(sm, spl)),
         2: f * (kp(mm * one - sp.I * sz, xp * one - sp.I * sz) - kp(spl, sm))}
    idx = [k * n + (jj - k) for k in range(n)]
    prod = sp.eye(n)
    for s in psi:
        prod = b[int(s)].extract(idx, idx) * prod
    at = prod.subs(x, mu)
    v = (sp.simplify(at - sp.eye(n))).nullspace()[0]
    w = sp.Matrix([[(-1) ** k for k in range(n)]])
    delta = (w * sp.diff(prod, x).subs(x, mu) * v)[0] / (w * v)[0]
    return sp.lambdify(mu, sp.simplify(delta / (2 * sp.pi * sp.I * len(psi))), "numpy")


@pytest.mark.parametrize("psi,jj", [("12", 1), ("112", 1), ("1121", 1), ("12", 2), ("112", 2)])
def test_exact_matches_independent_sympy(psi, jj):
    ref = sympy_charge(psi, jj)
    rc = charge_exact(psi, jj)
    for m in (0.0, 0.37, -1.9, 4.5):
        assert abs(rc(m) - complex(ref(m))) < 1e-12 * max(1, abs(rc(m)))


def test_neel_closed_form():
    rc = charge_exact("12", 1)
    assert rc.prefactor == Fraction(1, 2)
    assert rc.num == (1,) and rc.den == (1, 2)


def test_golden_j1_exact():
    rc = charge_exact(GOLDEN, 1)
    assert rc.prefactor == Fraction(1, 7)
    assert list(rc.num[::-1]) == GOLDEN_J1_NUM
    assert list(rc.den[::-1]) == GOLDEN_J1_DEN


@pytest.mark.parametrize("jj", [1, 2])
def test_literal_route_agrees(short_psi, jj):
    assert charge_exact(short_psi, jj) == charge_exact_literal(short_psi, jj)


@pytest.mark.parametrize("jj", [1, 2, 3])
def test_symmetries(short_psi, jj):
    base = charge_exact(short_psi, jj)
    psi = SpinState.parse(short_psi)
    for other in (psi.rotate(1), psi.rotate(-2), psi.repeat(2)):
        rc = charge_exact(other, jj)
        assert (rc.prefactor, rc.num, rc.den) == (base.prefactor, base.num, base.den)


def test_spin_flip_symmetry():
    for psi in ("112", "1121", GOLDEN):
        a = charge_exact(psi, 2)
        b = charge_exact(SpinState.parse(psi).flip(), 2)
        assert (a.prefactor, a.num, a.den) == (b.prefactor, b.num, b.den)


def test_degree_bound_and_cap():
    rc = charge_exact(GOLDEN, 2)
    assert rc.den_degree <= predicted_degree(7, 2)
    with pytest.raises(DegreeCapError):
        charge_exact("1211122111121211211111212121221222121121", 3, degree_cap=100)


def test_json_round_trip_exact():
    rc = charge_exact(GOLDEN, 2)
    back = RationalCharge.from_json(rc.to_json())
    assert back == rc
    for m in (Fraction(0), Fraction(3, 7), Fraction(-5, 2)):
        assert back.evaluate_exact(m) == rc.evaluate_exact(m)


def test_golden_leading_coefficient():
    assert leading_coefficient(charge_exact(GOLDEN, 1)) == Fraction(10, 49)


def test_numeric_scalar_and_array():
    x = charge_numeric("12", 1, 0.0)
    assert isinstance(x, complex)
    assert abs(x - 1 / (2 * np.pi)) < 1e-14
    arr = charge_numeric("12", 1, np.array([0.0, 1.0]))
    assert arr.shape == (2,)


def test_numeric_pole_handling():
    pole = 1j / np.sqrt(2)
    with pytest.raises(PoleProximityError):
        charge_numeric("12", 1, pole)
    out = charge_numeric("12", 1, np.array([0.0, pole]), on_error="nan")
    assert np.isfinite(out[0]) and np.isnan(out[1])
    with pytest.raises(PoleProximityError):
        monodromy_data("12", 1, pole)


def test_numeric_matches_exact_complex_points(short_psi):
    rc = charge_exact(short_psi, 2)
    mu = np.array([0.3 + 0.2j, -2.0 + 0.1j, 5.0])
    assert np.allclose(charge_numeric(short_psi, 2, mu), rc(mu), rtol=1e-10)


def test_power_limit_converges():
    exact = charge_numeric("12122", 2, 1.0)
    errs = [abs(power_limit_oracle("12122", 2, 1.0, k) - exact) for k in (10, 100, 1000)]
    assert errs[2] < errs[1] < errs[0]
