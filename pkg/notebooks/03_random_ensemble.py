# %% [markdown]
# # Deviations over random product states
#
# States are drawn from a seeded counter-based generator, so rerunning gives
# identical histograms regardless of worker count.

# %%
from heisencharges import EnsembleConfig, run_ensemble

for M in (20, 50, 100):
    rep = run_ensemble(EnsembleConfig(M=M, jj=1, count=100, seed=20240601, parallelism=4))
    print(M, rep.quantiles["median"], rep.failed)

# %%
print(rep.histogram_csv())
