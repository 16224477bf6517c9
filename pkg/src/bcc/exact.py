"""Brute-force optimum over all set partitions of ``L u R``.

Partitions are restricted-growth strings (RGS) in lexicographic order; the
node order is ``L0..L{n-1}, R0..R{m-1}``.  Connected components are solved
independently, since no pair crosses two components.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .clustering import Clustering, cost, normalize
from .graph import BipartiteGraph, bits

DEFAULT_LIMIT = 12
_CHUNK = 1 << 18


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OptResult:
    opt_cost: int
    witness: Clustering
    partitions_examined: int


@lru_cache(maxsize=None)
def bell(n: int) -> int:
    # Bell triangle
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise SizeLimitError(f"{n} nodes exceeds the enumeration limit of {limit}")


def enumerate_partitions(n: int, limit: int = DEFAULT_LIMIT):
    """Yield every partition of ``{0..n-1}`` once, as an RGS tuple, lexicographically."""
    _check_limit(n, limit)
    if n == 0:
        yield ()
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[:i+1])
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] > m[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def rgs_array(n: int, limit: int = DEFAULT_LIMIT) -> np.ndarray:
    """All RGS of length ``n`` as an ``(Bell(n), n)`` int8 array, lexicographic rows."""
    _check_limit(n, limit)
    arr = np.zeros((1, 0), dtype=np.int8)
    top = np.full(1, -1, dtype=np.int8)
    for _ in range(n):
        fan = (top + 2).astype(np.int64)
        starts = np.repeat(np.cumsum(fan) - fan, fan)
        col = (np.arange(starts.size) - starts).astype(np.int8)
        arr = np.concatenate([np.repeat(arr, fan, axis=0), col[:, None]], axis=1)
        top = np.maximum(np.repeat(top, fan), col)
    return arr


def components(g: BipartiteGraph) -> list[tuple[list[int], list[int]]]:
    """Connected components as ``(lefts, rights)``, ordered by smallest node."""
    seen_l = [False] * g.n_left
    seen_r = [False] * g.n_right
    cols = [0] * g.n_right
    for l, row in enumerate(g.rows):
        for r in bits(row):
            cols[r] |= 1 << l
    comps = []
    for start_side, start in [("L", l) for l in range(g.n_left)] + [("R", r) for r in range(g.n_right)]:
        if (seen_l if start_side == "L" else seen_r)[start]:
            continue
        lefts, rights = [], []
        stack = [(start_side, start)]
        (seen_l if start_side == "L" else seen_r)[start] = True
        while stack:
            side, i = stack.pop()
            if side == "L":
                lefts.append(i)
                for r in bits(g.rows[i]):
                    if not seen_r[r]:
                        seen_r[r] = True
                        stack.append(("R", r))
            else:
                rights.append(i)
                for l in bits(cols[i]):
                    if not seen_l[l]:
                        seen_l[l] = True
                        stack.append(("L", l))
        comps.append((sorted(lefts), sorted(rights)))
    return comps


def _best_partition(adj: np.ndarray, limit: int) -> tuple[int, np.ndarray, int]:
    """Minimum-cost RGS for a dense ``(a, b)`` adjacency; first minimum wins."""
    a, b = adj.shape
    rgs = rgs_array(a + b, limit)
    best_cost = None
    best_row = None
    adj_b = adj.astype(bool)
    for s in range(0, len(rgs), _CHUNK):
        block = rgs[s : s + _CHUNK]
        same = block[:, :a, None] == block[:, None, a:]
        costs = (same != adj_b[None]).sum(axis=(1, 2))
        i = int(np.argmin(costs))
        if best_cost is None or costs[i] < best_cost:
            best_cost = int(costs[i])
            best_row = block[i].copy()
    return best_cost, best_row, len(rgs)


def opt(g: BipartiteGraph, limit: int = DEFAULT_LIMIT) -> OptResult:
    """Exact optimum by enumeration, per connected component.

    Each component must have at most ``limit`` nodes.  Within a component
    the witness is the lexicographically smallest optimal RGS.
    """
    comps = components(g)
    for lefts, rights in comps:
        _check_limit(len(lefts) + len(rights), limit)
    labels = [0] * (g.n_left + g.n_right)
    total = 0
    examined = 0
    next_id = 0
    full = g.to_matrix()
    for lefts, rights in comps:
        sub = full[np.ix_(lefts, rights)] if lefts and rights else np.zeros((len(lefts), len(rights)))
        c, row, k = _best_partition(sub, limit)
        total += c
        examined += k
        nodes = lefts + [g.n_left + r for r in rights]
        for node, lab in zip(nodes, row):
            labels[node] = next_id + int(lab)
        next_id += int(row.max()) + 1 if len(row) else 0
    witness = normalize(Clustering(g.n_left, g.n_right, tuple(labels)))
    assert cost(g, witness).total == total
    return OptResult(total, witness, examined)


def opt_reference(g: BipartiteGraph, limit: int = DEFAULT_LIMIT) -> OptResult:
    """Slow path: whole-graph RGS stream, cost recomputed from scratch each time."""
    n = g.n_left + g.n_right
    best = None
    count = 0
    for rgs in enumerate_partitions(n, limit):
        count += 1
        b = Clustering(g.n_left, g.n_right, rgs)
        c = cost(g, b).total
        if best is None or c < best[0]:
            best = (c, b)
    return OptResult(best[0], normalize(best[1]), count)


def opt_by_left_partitions(g: BipartiteGraph, limit: int = DEFAULT_LIMIT) -> int:
    """Optimum via partitions of ``L`` only.

    For a fixed left partition each right node independently picks the
    cheapest cluster (or stays alone), since right-right pairs cost nothing.
    Independent of :func:`opt`; used to cross-check it.
    """
    best = None
    degs = [0] * g.n_right
    cols = [0] * g.n_right
    for l, row in enumerate(g.rows):
        for r in bits(row):
            degs[r] += 1
            cols[r] |= 1 << l
    for rgs in enumerate_partitions(g.n_left, limit):
        k = max(rgs, default=-1) + 1
        members = [0] * k
        for l, c in enumerate(rgs):
            members[c] |= 1 << l
        total = 0
        for r in range(g.n_right):
            choice = degs[r]  # alone
            for m in members:
                inside = (cols[r] & m).bit_count()
                choice = min(choice, m.bit_count() - inside + degs[r] - inside)
            total += choice
        if best is None or total < best:
            best = total
    return 0 if best is None else best
