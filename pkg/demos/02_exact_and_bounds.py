# %% [markdown]
# # Exact optimum and lower bounds
#
# Greedy square packing, the square LP and brute-force OPT on a handful of
# random graphs.  The three numbers always come out in that order.

# %%
from bcc.bounds import enumerate_bad_squares, packing_bound, square_lp_bound
from bcc.exact import opt
from bcc.graph import gen_random
from bcc.rng import derive_seed

print(f"{'graph':>6} {'squares':>8} {'packing':>8} {'lp':>8} {'opt':>4}")
for i in range(8):
    g = gen_random(4, 5, 0.5, derive_seed(42, i))
    print(f"{i:>6} {len(enumerate_bad_squares(g)):>8} {packing_bound(g):>8} "
          f"{square_lp_bound(g):>8.3f} {opt(g).opt_cost:>4}")

# %% [markdown]
# The witness returned with OPT is a normalized clustering.

# %%
res = opt(gen_random(4, 5, 0.5, 7))
print(res.opt_cost, res.partitions_examined)
print(res.witness)
