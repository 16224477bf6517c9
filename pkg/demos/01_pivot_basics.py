# %% [markdown]
# # PivotBiCluster on a tiny graph
#
# Build the two-by-two graph with one missing pair, cluster it a few times
# and look at the trace of decisions behind each result.

# %%
from bcc import cost, format_clustering, new_graph
from bcc.pivot import format_trace, run, verify_trace

g = new_graph(2, 2, {(0, 0), (0, 1), (1, 0)})
print(g)

# %%
for seed in range(4):
    b, trace = run(g, seed)
    rep = cost(g, b)
    print(f"seed {seed}: cost {rep.total} (cut {rep.cut_edges}, missing {rep.missing_pairs})")
    print(format_clustering(b), end="")

# %% [markdown]
# Every erroneous pair is colored by exactly one recorded event.

# %%
b, trace = run(g, 0)
print(format_trace(trace), end="")
print(verify_trace(g, b, trace))
