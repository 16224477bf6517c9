# %% [markdown]
# # Checking the dual certificate by simulation
#
# Record every bad event over many runs, build the dual point from the
# estimated event probabilities and check each pair constraint.

# %%
from bcc.bounds import (
    check_dual_feasibility,
    check_lemma3,
    dual_objective_se,
    dual_solution,
    estimate_tuple_stats,
    lemma3_csv,
    slack_csv,
)
from bcc.exact import opt
from bcc.graph import new_graph

g = new_graph(3, 3, {(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2), (0, 2)})
stats = estimate_tuple_stats(g, 20_000, seed=1)
print(f"{len(stats.counts)} tuples, mean cost {stats.mean_cost:.4f} +- {stats.cost_se:.4f}")

# %%
dual = dual_solution(stats)
print(slack_csv(check_dual_feasibility(g, dual, stats)), end="")
print(f"sum beta = {dual.objective:.4f} +- {dual_objective_se(dual, stats):.4f}, OPT = {opt(g).opt_cost}")

# %%
print(lemma3_csv(check_lemma3(stats, dual)), end="")
