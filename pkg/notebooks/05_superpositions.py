# %% [markdown]
# # Off-diagonal products between two different states
#
# Repeating a mixed product kills the top-sector inputs quickly.  A single
# block, though, is not a contraction near mu = x = 0.

# %%
from heisencharges import GeneralStatePair, random_state
from heisencharges.ensemble import contraction_sup, decays, offdiagonal_decay

norms = offdiagonal_decay(GeneralStatePair("12", "21"), 1, 1.0, 10)
print(norms, decays(norms))

pair = GeneralStatePair(random_state(10, 3, 0), random_state(10, 3, 1))
print(offdiagonal_decay(pair, 2, 1.0, 6))

# %%
for jj in (1, 2, 3):
    print(jj, contraction_sup(jj))
