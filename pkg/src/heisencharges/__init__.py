"""Conserved charges of periodic product states in the Heisenberg spin-1/2 chain."""
from .conjecture import GridSpec, deviation, thermo_integral, x_infinity, x_tilde
from .ensemble import EnsembleConfig, GeneralStatePair, random_state, run_ensemble
from .exact import RationalCharge, charge_exact, leading_coefficient
from .monodromy import SpinState, charge_numeric, power_limit_oracle
from .poles import curve_solutions, find_poles
from .thermo import gibbs_average, string_densities

__all__ = [
    "EnsembleConfig", "GeneralStatePair", "GridSpec", "RationalCharge", "SpinState",
    "charge_exact", "charge_numeric", "curve_solutions", "deviation", "find_poles",
    "gibbs_average", "leading_coefficient", "power_limit_oracle", "random_state",
    "run_ensemble", "string_densities", "thermo_integral", "x_infinity", "x_tilde",
]
