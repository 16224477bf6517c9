"""Clusterings of ``L u R`` and the symmetric-difference cost."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph import BipartiteGraph, Pair, bits


class ClusteringError(ValueError):
    pass


def _relabel(labels: Sequence[int]) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


@dataclass(frozen=True)
class Clustering:
    """Assignment of every node to a cluster id.

    ``labels`` lists left nodes first, then right nodes.  Ids are relabelled to
    first-seen order on construction, so ``==`` is partition equality.
    """

    n_left: int
    n_right: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != self.n_left + self.n_right:
            raise ClusteringError(
                f"expected {self.n_left + self.n_right} labels, got {len(self.labels)}"
            )
        object.__setattr__(self, "labels", _relabel(self.labels))

    @classmethod
    def from_labels(cls, n_left: int, n_right: int, labels: Sequence[int]) -> "Clustering":
        return cls(n_left, n_right, tuple(labels))

    @classmethod
    def singletons(cls, n_left: int, n_right: int) -> "Clustering":
        return cls(n_left, n_right, tuple(range(n_left + n_right)))

    @classmethod
    def from_clusters(cls, n_left: int, n_right: int, clusters) -> "Clustering":
        """Build from ``(left_indices, right_indices)`` groups; unlisted nodes are singletons."""
        labels = [-1] * (n_left + n_right)
        for cid, (lefts, rights) in enumerate(clusters):
            for l in lefts:
                if labels[l] != -1:
                    raise ClusteringError(f"L{l} listed twice")
                labels[l] = cid
            for r in rights:
                if labels[n_left + r] != -1:
                    raise ClusteringError(f"R{r} listed twice")
                labels[n_left + r] = cid
        nxt = len(clusters)
        for i, x in enumerate(labels):
            if x == -1:
                labels[i] = nxt
                nxt += 1
        return cls(n_left, n_right, tuple(labels))

    @property
    def left_labels(self) -> tuple[int, ...]:
        return self.labels[: self.n_left]

    @property
    def right_labels(self) -> tuple[int, ...]:
        return self.labels[self.n_left :]

    def clusters(self) -> list[tuple[list[int], list[int]]]:
        """``(lefts, rights)`` for every cluster, in id order."""
        k = max(self.labels, default=-1) + 1
        out: list[tuple[list[int], list[int]]] = [([], []) for _ in range(k)]
        for l, c in enumerate(self.left_labels):
            out[c][0].append(l)
        for r, c in enumerate(self.right_labels):
            out[c][1].append(r)
        return out

    def right_masks(self) -> list[int]:
        """Bit mask of right members per cluster id."""
        k = max(self.labels, default=-1) + 1
        masks = [0] * k
        for r, c in enumerate(self.right_labels):
            masks[c] |= 1 << r
        return masks

    def transpose(self) -> "Clustering":
        return Clustering(self.n_right, self.n_left, self.right_labels + self.left_labels)


@dataclass(frozen=True)
class CostReport:
    total: int
    cut_edges: int
    missing_pairs: int


def _check(g: BipartiteGraph, b: Clustering) -> None:
    if (g.n_left, g.n_right) != (b.n_left, b.n_right):
        raise ClusteringError(
            f"clustering covers {b.n_left}x{b.n_right} nodes, graph is {g.n_left}x{g.n_right}"
        )


def error_rows(g: BipartiteGraph, b: Clustering) -> list[int]:
    """Per left node, the bit row of right nodes on which ``b`` errs."""
    _check(g, b)
    masks = b.right_masks()
    return [row ^ masks[c] for row, c in zip(g.rows, b.left_labels)]


def cost(g: BipartiteGraph, b: Clustering) -> CostReport:
    _check(g, b)
    masks = b.right_masks()
    cut = missing = 0
    for row, c in zip(g.rows, b.left_labels):
        inside = masks[c]
        cut += (row & ~inside).bit_count()
        missing += (inside & ~row).bit_count()
    return CostReport(cut + missing, cut, missing)


def erroneous_pairs(g: BipartiteGraph, b: Clustering) -> set[Pair]:
    return {Pair(l, r) for l, row in enumerate(error_rows(g, b)) for r in bits(row)}


def normalize(b: Clustering) -> Clustering:
    """Split every single-side cluster into singletons."""
    has_left: set[int] = set(b.left_labels)
    has_right: set[int] = set(b.right_labels)
    mixed = has_left & has_right
    nxt = max(b.labels, default=-1) + 1
    labels = list(b.labels)
    for i, c in enumerate(labels):
        if c not in mixed:
            labels[i] = nxt
            nxt += 1
    return Clustering(b.n_left, b.n_right, tuple(labels))


def format_clustering(b: Clustering) -> str:
    """One line per cluster with at least two members, e.g. ``L0 L2 R1``."""
    lines = []
    for lefts, rights in b.clusters():
        if len(lefts) + len(rights) < 2:
            continue
        lines.append(" ".join([f"L{l}" for l in lefts] + [f"R{r}" for r in rights]))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_clustering(text: str, n_left: int, n_right: int) -> Clustering:
    groups = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lefts, rights = [], []
        for tok in line.split():
            side, idx = tok[:1], tok[1:]
            if side not in ("L", "R") or not idx.isdigit():
                raise ClusteringError(f"line {lineno}: bad node token {tok!r}")
            i = int(idx)
            if side == "L":
                if i >= n_left:
                    raise ClusteringError(f"line {lineno}: {tok} out of range")
                lefts.append(i)
            else:
                if i >= n_right:
                    raise ClusteringError(f"line {lineno}: {tok} out of range")
                rights.append(i)
        groups.append((lefts, rights))
    return Clustering.from_clusters(n_left, n_right, groups)
