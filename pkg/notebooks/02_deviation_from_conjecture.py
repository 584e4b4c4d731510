# %% [markdown]
# # How far is a single state from the closed-form guess?
#
# The guess depends only on the ratio r = n2/n1.  The deviation is the largest
# relative gap on a real grid, refined near its maximum.

# %%
from heisencharges import GridSpec, charge_exact, deviation, x_tilde
from heisencharges.conjecture import epsilon_coefficient, state_ratio

psi = "1211122111121211211111212121221222121121"
r = state_ratio(psi)
print("r =", r)
for jj in (1, 2):
    res = deviation(psi, jj, GridSpec())
    print(jj, res.delta, res.mu_at_sup, res.backend)

# %% [markdown]
# Near r = 1 the guess has a small-epsilon expansion.  Its first correction
# coefficient comes out as -(j+2)/12 when expanded symbolically.

# %%
for jj in range(1, 6):
    print(jj, epsilon_coefficient(jj))

# %%
rc = charge_exact(psi, 1)
for mu in (0.5, 1.0, 3.0):
    print(mu, rc(mu).real, x_tilde(1, mu, r))
