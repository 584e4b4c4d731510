# %% [markdown]
# # One state, two routes, and where the charge blows up
#
# We take the seven-site state `1111212`, build its charge exactly and
# numerically, and then locate the poles of the exact rational function.

# %%
import numpy as np

from heisencharges import charge_exact, charge_numeric
from heisencharges.poles import classify_physical_strip, find_poles, hyperbola_check, match_to_curve

psi = "1111212"
rc = charge_exact(psi, 1)
print("prefactor", rc.prefactor)
print("numerator (ascending in mu^2)", rc.num)
print("denominator (ascending in mu^2)", rc.den)

# %% [markdown]
# The transfer-matrix route evaluates the same function at sampled points.

# %%
mus = np.linspace(-3, 3, 7)
print(np.max(np.abs(charge_numeric(psi, 1, mus) - rc(mus))))

# %% [markdown]
# Poles come in conjugate and sign-flipped quadruples.  None of them sits in
# the strip |Im mu| < 1/2.  For spin 1/2 every pole matches one of the
# closed-form curve solutions returned by `curve_solutions(M)`.

# %%
ps = find_poles(rc)
print(ps.to_csv())
print("inside strip:", classify_physical_strip(ps).inside_PS)
print("hyperbola residual", hyperbola_check(ps), "curve match", match_to_curve(ps))
