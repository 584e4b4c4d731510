# %% [markdown]
# # Infinite-temperature averages and string densities

# %%
import numpy as np

from heisencharges import gibbs_average, string_densities, thermo_integral, x_infinity
from heisencharges.conjecture import thermo_closed_form
from heisencharges.thermo import average_trace_finite_n, irrep_labels, lambda_r, y_system_check

mus = np.linspace(-4, 4, 9)
for jj in (1, 2, 3):
    print(jj, np.max(np.abs(gibbs_average(jj, mus) - np.real(x_infinity(jj, mus)))))

# %% [markdown]
# Only even labels r = 0, 2, ..., 2j appear in the half-trace spectrum.
# The r = 0 eigenvalue is exactly one on the diagonal, the rest shrink.

# %%
print([abs(lambda_r(3, r, 0.7)) for r in irrep_labels(3)])
print([average_trace_finite_n(2, 0.5, N) - gibbs_average(2, 0.5) for N in (2, 4, 8)])

# %%
print(thermo_integral(0.3), thermo_closed_form(0.3))
print(string_densities(2, 0.0), y_system_check(20))
