import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisencharges.conjecture import GridSpec, x_infinity
from heisencharges.ensemble import (
    EnsembleConfig, GeneralStatePair, contraction_bound, contraction_sup, decays, is_nongeneric, offdiagonal_decay,
    random_state, run_ensemble,
)
from heisencharges.thermo import (
    average_trace_finite_n, casimir, casimir_eigenvalue, density_closed_forms, gibbs_average,
    half_trace, irrep_labels, lambda0_finite_n, lambda_r, string_densities, y_system_check,
)

SMALL_GRID = GridSpec(-10, 10, 201)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 200), st.integers(0, 2 ** 64 - 1), st.integers(0, 10 ** 6))
def test_random_state_deterministic(M, seed, index):
    a = random_state(M, seed, index)
    assert a == random_state(M, seed, index)
    assert len(a) == M


def test_random_state_fair():
    frac = np.mean([random_state(100, 11, i).n2 / 100 for i in range(10_000)])
    assert abs(frac - 0.5) < 0.02
    assert str(random_state(1, 4)) in ("1", "2")


def test_streams_differ_by_index_and_seed():
    assert random_state(64, 1, 0) != random_state(64, 1, 1)
    assert random_state(64, 1, 0) != random_state(64, 2, 0)


def test_nongeneric_detection():
    assert is_nongeneric("1212") == {"periodic": True, "period": 2}
    assert is_nongeneric("112") == {"periodic": False, "period": 3}
    assert is_nongeneric("122122") == {"periodic": True, "period": 3}


def test_nongeneric_fraction_small():
    flags = [is_nongeneric(random_state(20, 3, i))["periodic"] for i in range(2000)]
    assert np.mean(flags) < 0.01


def test_ensemble_single_state_echo():
    rep = run_ensemble(EnsembleConfig(M=12, jj=1, count=1, seed=5, grid=SMALL_GRID))
    d = rep.per_state[0].delta
    assert rep.quantiles["median"] == d == rep.quantiles["min"]
    assert sum(rep.histogram["counts"]) == 1


def test_ensemble_parallel_is_byte_identical():
    cfg = dict(M=16, jj=1, count=12, seed=99, grid=SMALL_GRID)
    a = run_ensemble(EnsembleConfig(**cfg, parallelism=1)).to_json()
    b = run_ensemble(EnsembleConfig(**cfg, parallelism=3)).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["schema"].startswith("heisencharges.ensemble_report/")
    assert sum(doc["histogram"]["counts"]) == 12


def test_ensemble_histogram_csv():
    rep = run_ensemble(EnsembleConfig(M=10, jj=1, count=4, seed=1, grid=SMALL_GRID, bins=5))
    lines = rep.histogram_csv().splitlines()
    assert lines[0] == "bin_lo,bin_hi,count" and len(lines) == 6


def test_ensemble_m20_median_range():
    rep = run_ensemble(EnsembleConfig(M=20, jj=1, count=100, seed=2024))
    assert 0.05 < rep.quantiles["median"] < 0.5


def test_pair_validation():
    with pytest.raises(ValueError):
        GeneralStatePair("12", "12")
    with pytest.raises(ValueError):
        GeneralStatePair("12", "121")


def test_neel_swap_decay():
    norms = offdiagonal_decay(GeneralStatePair("12", "21"), 1, 1.0, 10)
    assert np.all(np.diff(norms) < 0) and norms[-1] < 0.1 * norms[0]
    assert decays(norms)


def test_j2_random_pair_decays():
    m, n = random_state(10, 8, 0), random_state(10, 8, 1)
    norms = offdiagonal_decay(GeneralStatePair(m, n), 2, 1.0, 10)
    assert norms[-1] < norms[0] or norms[0] == 0


def test_contraction_values():
    # the j = 1 ratio formula: sup of ||L12 v||^2/||v||^2 equals (2 + mu^2 + x^2)/((1 + mu^2)(1 + x^2))
    for mu, x in ((0.3, -1.2), (2.0, 0.5), (1.0, 1.0)):
        ratio = (2 + mu * mu + x * x) / ((1 + mu * mu) * (1 + x * x))
        assert abs(contraction_bound(1, mu, x) ** 2 - ratio) < 1e-12
    assert abs(contraction_bound(1, 0, 0) - np.sqrt(2)) < 1e-12
    assert abs(contraction_bound(2, 0, 0) - 4 / 3) < 1e-12


# thermo -----------------------------------------------------------------------

@pytest.mark.parametrize("jj", [1, 2, 3])
def test_lambda_spectrum_matches_diagonalization(jj):
    mu, x = 0.7, -0.3
    ev = np.sort_complex(np.linalg.eigvals(half_trace(jj, mu, x)))
    lam = np.sort_complex(np.concatenate([[lambda_r(jj, r, mu, x)] * (r + 1) for r in irrep_labels(jj)]))
    assert np.allclose(ev, lam, atol=1e-13)
    spec = casimir(jj).spectrum
    assert spec == {casimir_eigenvalue(jj, r): r + 1 for r in irrep_labels(jj)}


def test_lambda_zero_is_one_on_diagonal():
    for jj in (1, 3, 5):
        assert abs(lambda_r(jj, 0, 1.7) - 1) < 1e-15
    with pytest.raises(ValueError):
        lambda_r(2, 1, 0.0)


def test_higher_lambdas_inside_unit_disc():
    mus = np.linspace(-10, 10, 2001)
    for jj in range(1, 6):
        for r in irrep_labels(jj)[1:]:
            assert np.all(np.abs(lambda_r(jj, r, mus)) < 1)


def test_gibbs_values():
    assert abs(gibbs_average(1, 0) - 1 / (4 * np.pi)) < 1e-16
    mus = np.linspace(-10, 10, 1000)
    for jj in range(1, 6):
        assert np.allclose(gibbs_average(jj, mus), np.real(x_infinity(jj, mus)), rtol=1e-12, atol=0)


def test_finite_n_average():
    for N in (100, 1000, 10_000):
        assert abs(lambda0_finite_n(2, 0.4, N) - gibbs_average(2, 0.4)) < 1e-6
    errs = [abs(average_trace_finite_n(2, 0.5, N) - gibbs_average(2, 0.5)) for N in (2, 4, 8, 12)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_densities_and_y_system():
    d = string_densities(1, 0.0)
    assert abs(d.rho - 4 / (9 * np.pi)) < 1e-15
    assert abs(string_densities(2, 0.0).eta - 8) < 1e-12
    assert y_system_check(20) == 0
    mus = np.linspace(-6, 6, 241)
    for jj in range(1, 9):
        dp = string_densities(jj, mus)
        assert np.all(dp.rho > 0) and np.all(dp.rho_bar > 0)
        rho, rho_bar = density_closed_forms(jj, mus)
        assert np.allclose(dp.rho, rho, rtol=0, atol=1e-12)
        assert np.allclose(dp.rho_bar, rho_bar, rtol=0, atol=1e-12)


def test_contraction_sup_grid():
    # measured sups over mu, x in [-10, 10]; attained at mu = x = 0
    assert contraction_sup(1)[0] == pytest.approx(np.sqrt(2), abs=1e-12)
    assert contraction_sup(2)[0] == pytest.approx(4 / 3, abs=1e-12)
    assert contraction_sup(2, block="b21")[0] == pytest.approx(4 / 3, abs=1e-12)
    assert contraction_bound(1, 3.0, 4.0) < 1 and contraction_bound(2, 3.0, 4.0) < 1
