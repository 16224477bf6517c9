"""Bipartite graphs with bitset adjacency rows, generators and the ``bcc`` text format.

Row ``l`` of the adjacency is a Python int whose bit ``r`` is set iff the pair
``(l, r)`` is an edge.  All set algebra on neighbourhoods is done with ``&``,
``|``, ``^`` and ``int.bit_count``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .rng import SplitMix64


class GraphError(ValueError):
    """Invalid graph construction."""


class ParseError(ValueError):
    """Malformed ``bcc`` text; ``line`` is 1-based (0 when the error is global)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"


@dataclass(frozen=True, order=True)
class NodeId:
    side: Side
    index: int

    def __str__(self) -> str:
        return f"{self.side.value}{self.index}"


@dataclass(frozen=True, order=True)
class Pair:
    left: int
    right: int


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in ascending order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class BipartiteGraph:
    """Immutable bipartite graph ``G = (L, R, E)``.

    Parameters
    ----------
    n_left, n_right : int
        Side sizes.
    rows : sequence of int
        One bit row per left node; bits at or above ``n_right`` must be clear.
    """

    __slots__ = ("_n_left", "_n_right", "_rows", "_hash")

    def __init__(self, n_left: int, n_right: int, rows: Sequence[int]):
        if n_left < 0 or n_right < 0:
            raise GraphError("side sizes must be nonnegative")
        if len(rows) != n_left:
            raise GraphError(f"expected {n_left} rows, got {len(rows)}")
        full = (1 << n_right) - 1
        for i, row in enumerate(rows):
            if row < 0 or row & ~full:
                raise GraphError(f"row {i} has bits outside 0..{n_right - 1}")
        object.__setattr__(self, "_n_left", n_left)
        object.__setattr__(self, "_n_right", n_right)
        object.__setattr__(self, "_rows", tuple(rows))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("BipartiteGraph is immutable")

    @property
    def n_left(self) -> int:
        return self._n_left

    @property
    def n_right(self) -> int:
        return self._n_right

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    @property
    def n_edges(self) -> int:
        return sum(r.bit_count() for r in self._rows)

    @property
    def right_mask(self) -> int:
        return (1 << self._n_right) - 1

    def has_edge(self, left: int, right: int) -> bool:
        return bool(self._rows[left] >> right & 1)

    def edges(self) -> list[tuple[int, int]]:
        """Edges in row-major sorted order."""
        return [(l, r) for l, row in enumerate(self._rows) for r in bits(row)]

    def transpose(self) -> "BipartiteGraph":
        """Swap the roles of the two sides."""
        rows = [0] * self._n_right
        for l, row in enumerate(self._rows):
            for r in bits(row):
                rows[r] |= 1 << l
        return BipartiteGraph(self._n_right, self._n_left, rows)

    def to_matrix(self):
        import numpy as np

        m = np.zeros((self._n_left, self._n_right), dtype=np.int8)
        for l, r in self.edges():
            m[l, r] = 1
        return m

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self._n_left, self._n_right, self._rows) == (
            other._n_left,
            other._n_right,
            other._rows,
        )

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self._n_left, self._n_right, self._rows)))
        return self._hash

    def __repr__(self):
        return f"BipartiteGraph(n_left={self._n_left}, n_right={self._n_right}, n_edges={self.n_edges})"


def new_graph(n_left: int, n_right: int, edges: Iterable[tuple[int, int]]) -> BipartiteGraph:
    """Build a graph from an edge collection; duplicate edges collapse."""
    if n_left < 0 or n_right < 0:
        raise GraphError("side sizes must be nonnegative")
    rows = [0] * n_left
    for l, r in edges:
        if not (0 <= l < n_left and 0 <= r < n_right):
            raise GraphError(f"edge ({l}, {r}) out of range for a {n_left}x{n_right} graph")
        rows[l] |= 1 << r
    return BipartiteGraph(n_left, n_right, rows)


def from_matrix(matrix) -> BipartiteGraph:
    """Graph from a 0/1 array of shape ``(n_left, n_right)``."""
    rows = []
    n_left = len(matrix)
    n_right = len(matrix[0]) if n_left else 0
    for row in matrix:
        rows.append(mask_of(j for j, v in enumerate(row) if v))
    return BipartiteGraph(n_left, n_right, rows)


def neighbors(g: BipartiteGraph, left: int) -> int:
    """Bit row ``N(left)`` of the static graph."""
    if not 0 <= left < g.n_left:
        raise GraphError(f"left index {left} out of range 0..{g.n_left - 1}")
    return g.rows[left]


def gen_random(n_left: int, n_right: int, p: float, seed: int) -> BipartiteGraph:
    """Each pair independently present with probability ``p``.

    Pairs are visited row-major and each consumes one unit-interval draw.
    """
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p must lie in [0, 1], got {p}")
    rng = SplitMix64(seed)
    rows = []
    for _ in range(n_left):
        row = 0
        for r in range(n_right):
            if rng.random() < p:
                row |= 1 << r
        rows.append(row)
    return BipartiteGraph(n_left, n_right, rows)


def gen_biclique_union(left_sizes: Sequence[int], right_sizes: Sequence[int]) -> BipartiteGraph:
    """Disjoint union of complete bi-cliques, blocks laid out consecutively."""
    if len(left_sizes) != len(right_sizes):
        raise GraphError("left_sizes and right_sizes must have equal length")
    if any(s < 0 for s in left_sizes) or any(s < 0 for s in right_sizes):
        raise GraphError("block sizes must be nonnegative")
    rows = []
    r0 = 0
    for a, b in zip(left_sizes, right_sizes):
        block = ((1 << b) - 1) << r0
        rows.extend([block] * a)
        r0 += b
    return BipartiteGraph(sum(left_sizes), sum(right_sizes), rows)


def biclique_labels(left_sizes: Sequence[int], right_sizes: Sequence[int]) -> list[int]:
    """Cluster labels (left nodes then right nodes) of the planted bi-cliques."""
    labels = []
    for i, a in enumerate(left_sizes):
        labels.extend([i] * a)
    for i, b in enumerate(right_sizes):
        labels.extend([i] * b)
    return labels


def gen_planted(
    left_sizes: Sequence[int], right_sizes: Sequence[int], eps: float, seed: int
) -> BipartiteGraph:
    """Bi-clique union with every pair flipped independently with probability ``eps``."""
    base = gen_biclique_union(left_sizes, right_sizes)
    noise = gen_random(base.n_left, base.n_right, eps, seed)
    return BipartiteGraph(base.n_left, base.n_right, [a ^ b for a, b in zip(base.rows, noise.rows)])


def gen_counterexample(n: int) -> BipartiteGraph:
    """``n x n`` graph with ``l_i`` adjacent to every ``r_j`` except ``r_i``."""
    if n < 2:
        raise GraphError(f"counterexample needs n >= 2, got {n}")
    full = (1 << n) - 1
    return BipartiteGraph(n, n, [full ^ (1 << i) for i in range(n)])


def all_graphs(n_left: int, n_right: int):
    """Every graph on fixed sides, ordered by the integer edge pattern.

    Bit ``l * n_right + r`` of the pattern is the pair ``(l, r)``.
    """
    width = n_left * n_right
    if width > 20:
        raise GraphError(f"refusing to enumerate 2**{width} graphs")
    row_mask = (1 << n_right) - 1
    for pattern in range(1 << width):
        yield BipartiteGraph(
            n_left, n_right, [(pattern >> (l * n_right)) & row_mask for l in range(n_left)]
        )


def serialize_graph(g: BipartiteGraph) -> str:
    edges = g.edges()
    lines = [f"bcc {g.n_left} {g.n_right} {len(edges)}"]
    lines.extend(f"{l} {r}" for l, r in edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str, strict: bool = True) -> BipartiteGraph:
    """Parse ``bcc`` text.

    The first non-comment line is ``bcc <n_left> <n_right> <n_edges>``, followed
    by exactly ``n_edges`` lines ``<l> <r>``.  Lines starting with ``#`` and blank
    lines are ignored.  In strict mode a repeated edge is an error.
    """
    header = None
    n_left = n_right = n_expected = 0
    rows: list[int] = []
    count = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 4 or fields[0] != "bcc":
                raise ParseError("expected header 'bcc <n_left> <n_right> <n_edges>'", lineno)
            try:
                n_left, n_right, n_expected = (int(x) for x in fields[1:])
            except ValueError:
                raise ParseError("header fields must be integers", lineno) from None
            if min(n_left, n_right, n_expected) < 0:
                raise ParseError("header fields must be nonnegative", lineno)
            header = lineno
            rows = [0] * n_left
            continue
        if len(fields) != 2:
            raise ParseError("expected '<left> <right>'", lineno)
        try:
            l, r = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError("edge indices must be integers", lineno) from None
        if not (0 <= l < n_left and 0 <= r < n_right):
            raise ParseError(f"edge ({l}, {r}) out of range", lineno)
        count += 1
        if count > n_expected:
            raise ParseError(f"more edges than the declared {n_expected}", lineno)
        if rows[l] >> r & 1:
            if strict:
                raise ParseError(f"duplicate edge ({l}, {r})", lineno)
        rows[l] |= 1 << r
    if header is None:
        raise ParseError("missing header")
    if count != n_expected:
        raise ParseError(f"header declares {n_expected} edges, found {count}")
    return BipartiteGraph(n_left, n_right, rows)


def read_graph(path, strict: bool = True) -> BipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read(), strict=strict)


def write_graph(g: BipartiteGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_graph(g))
