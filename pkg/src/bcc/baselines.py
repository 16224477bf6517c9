"""The older neighbourhood-pivot rule, kept as the ``ghkz`` baseline.

Each phase picks a uniform left pivot and clusters it with its live
neighbours.  Every other alive left node whose live neighbourhood equals the
pivot's joins; otherwise it joins with probability 1/2 if it has a neighbour
in the new cluster.  Non-joining nodes stay for later phases.  This rule has
unbounded approximation ratio on :func:`bcc.graph.gen_counterexample`.
"""
from __future__ import annotations

from .clustering import Clustering, normalize
from .graph import BipartiteGraph, bits
from .rng import SplitMix64


def _run(g: BipartiteGraph, seed: int):
    rng = SplitMix64(seed)
    rows = g.rows
    alive_l = (1 << g.n_left) - 1
    alive_r = g.right_mask
    left_cluster = [-1] * g.n_left
    cluster_rights: list[int] = []
    while alive_l:
        alive = bits(alive_l)
        pivot = alive[rng.randbelow(len(alive))]
        c_right = rows[pivot] & alive_r
        cid = len(cluster_rights)
        cluster_rights.append(c_right)
        left_cluster[pivot] = cid
        removed = 1 << pivot
        for l2 in alive:
            if l2 == pivot:
                continue
            coin = rng.next_u64() >> 63  # one draw per candidate, used or not
            n2 = rows[l2] & alive_r
            if n2 == c_right or (n2 & c_right and coin == 0):
                left_cluster[l2] = cid
                removed |= 1 << l2
        alive_l &= ~removed
        alive_r &= ~c_right
    return left_cluster, cluster_rights


def run_ghkz(g: BipartiteGraph, seed: int) -> Clustering:
    left_cluster, cluster_rights = _run(g, seed)
    right = [-1] * g.n_right
    for c, m in enumerate(cluster_rights):
        for r in bits(m):
            right[r] = c
    nxt = len(cluster_rights)
    for r in range(g.n_right):
        if right[r] == -1:
            right[r] = nxt
            nxt += 1
    return normalize(Clustering(g.n_left, g.n_right, tuple(left_cluster + right)))


def ghkz_cost(g: BipartiteGraph, seed: int) -> int:
    left_cluster, cluster_rights = _run(g, seed)
    return sum((row ^ cluster_rights[c]).bit_count() for row, c in zip(g.rows, left_cluster))
