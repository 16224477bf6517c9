# %% [markdown]
# # A family where the older rule breaks down
#
# Left node i sees every right node except i.  One big cluster costs n.
# PivotBiCluster always pays 2n - 2; the ``ghkz`` baseline pays about n^2 / 2.

# %%
from bcc.baselines import ghkz_cost
from bcc.graph import gen_counterexample
from bcc.pivot import PivotRunner
from bcc.rng import derive_seed

for n in (10, 20, 40, 80):
    g = gen_counterexample(n)
    runner = PivotRunner(g)
    pivot = {runner.cost(derive_seed(n, j)) for j in range(50)}
    ghkz = sum(ghkz_cost(g, derive_seed(n, j)) for j in range(50)) / 50
    print(f"n={n:>3}  pivot {sorted(pivot)}  ghkz mean {ghkz:8.1f}  ghkz/OPT {ghkz / n:6.2f}")

# %% [markdown]
# The same study as a config file, through the experiment runner.

# %%
from bcc.experiment import load_config, report_csv, run_experiment

print(report_csv(run_experiment(load_config("configs/counterexample.cfg"))), end="")
