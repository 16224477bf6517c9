"""PivotBiCluster with full bad-event tracing.

Every phase picks a left pivot uniformly among the alive left nodes, opens
the cluster ``{pivot} u N(pivot)`` and then, for every other alive left node
``l2`` in ascending order, compares the live neighbourhoods

* ``R1  = N(pivot) \\ N(l2)``
* ``R12 = N(pivot) & N(l2)``
* ``R2  = N(l2) \\ N(pivot)``

With probability ``min(|R12| / |R2|, 1)`` the node joins the cluster (when
``|R12| >= |R1|``) or becomes a singleton (otherwise); else it is deferred to
a later phase.  All decisions in a phase read the phase-start state.

Randomness contract (``SplitMix64``): one ``randbelow`` for the pivot, then
one 53-bit draw per alive ``l2`` in ascending index order, even when the
outcome is forced.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .clustering import Clustering, error_rows, normalize
from .graph import BipartiteGraph, Pair, bits
from .rng import SplitMix64

_ONE53 = 1 << 53
_CACHE_LIMIT = 200_000


class Decision(enum.Enum):
    JOIN = "join"
    SINGLETON = "singleton"
    DEFER = "defer"


class TupleKey(NamedTuple):
    """A tuple ``(l1, l2, R1, R12, R2)``; the right-node sets are bit masks."""

    l1: int
    l2: int
    r1: int
    r12: int
    r2: int

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.r1.bit_count(), self.r12.bit_count(), self.r2.bit_count()

    def sets(self) -> tuple[set[int], set[int], set[int]]:
        return set(bits(self.r1)), set(bits(self.r12)), set(bits(self.r2))

    def __str__(self) -> str:
        def fmt(m):
            return "{" + ",".join(map(str, bits(m))) + "}"

        return f"T(L{self.l1},L{self.l2},{fmt(self.r1)},{fmt(self.r12)},{fmt(self.r2)})"


def conjugate(t: TupleKey) -> TupleKey:
    """``(l1, l2, R1, R12, R2) -> (l2, l1, R2, R12, R1)``."""
    return TupleKey(t.l2, t.l1, t.r2, t.r12, t.r1)


@dataclass(frozen=True)
class TupleEvent:
    key: TupleKey
    decision: Decision
    colored: int  # bit mask of right nodes r such that (l2, r) got this color

    @property
    def colored_pairs(self) -> set[Pair]:
        return {Pair(self.key.l2, r) for r in bits(self.colored)}


@dataclass(frozen=True)
class Phase:
    pivot: int
    events: tuple[TupleEvent, ...]


@dataclass
class Trace:
    phases: list[Phase] = field(default_factory=list)

    def events(self):
        for ph in self.phases:
            yield from ph.events


def join_threshold(r1: int, r12: int, r2: int) -> int:
    """Integer threshold ``t`` such that a 53-bit draw ``k`` accepts iff ``k < t``.

    ``t = ceil(p * 2**53)`` with ``p = min(r12 / r2, 1)``; ``p = 1`` when
    ``R2`` is empty and ``R12`` is not, ``p = 0`` when ``R12`` is empty.
    """
    if r12 == 0:
        return 0
    if r12 >= r2:
        return _ONE53
    return -((-r12 * _ONE53) // r2)


def decide_ell2(r1: int, r12: int, r2: int, u: float) -> Decision:
    """Outcome for ``l2`` given the three set sizes and a draw ``u`` in [0, 1)."""
    if r12 == 0:
        p = Fraction(0)
    elif r2 == 0:
        p = Fraction(1)
    else:
        p = min(Fraction(r12, r2), Fraction(1))
    if Fraction(u) < p:
        return Decision.JOIN if r12 >= r1 else Decision.SINGLETON
    return Decision.DEFER


class PivotRunner:
    """Runs PivotBiCluster repeatedly on one graph.

    Phase plans (the three sets and the acceptance threshold of every
    ``l2``) depend only on the live state and the pivot, so they are cached
    across runs; Monte-Carlo loops should reuse a single runner.
    """

    def __init__(self, g: BipartiteGraph):
        self.g = g
        self._plans: dict[tuple[int, int, int], tuple] = {}
        self._alive: dict[int, list[int]] = {}

    def _alive_list(self, alive_l: int) -> list[int]:
        lst = self._alive.get(alive_l)
        if lst is None:
            lst = self._alive[alive_l] = bits(alive_l)
        return lst

    def _plan(self, alive_l: int, alive_r: int, pivot: int) -> tuple:
        key = (alive_l, alive_r, pivot)
        plan = self._plans.get(key)
        if plan is not None:
            return plan
        if len(self._plans) > _CACHE_LIMIT:
            self._plans.clear()
        rows = self.g.rows
        c_right = rows[pivot] & alive_r
        steps = []
        for l2 in self._alive_list(alive_l):
            if l2 == pivot:
                continue
            n2 = rows[l2] & alive_r
            r1 = c_right & ~n2
            r12 = c_right & n2
            r2 = n2 & ~c_right
            s1, s12, s2 = r1.bit_count(), r12.bit_count(), r2.bit_count()
            steps.append((l2, r1, r12, r2, join_threshold(s1, s12, s2), s12 >= s1))
        plan = (c_right, tuple(steps))
        self._plans[key] = plan
        return plan

    def run_raw(self, seed: int, record: bool = False):
        """Core loop.

        Returns ``(left_cluster, cluster_rights, right_cluster, phases)`` where
        ``left_cluster[l]`` is a cluster index, ``cluster_rights[c]`` the right
        mask of cluster ``c`` and ``phases`` (only when ``record``) a list of
        ``(pivot, [(key, decision, colored), ...])``.
        """
        g = self.g
        rng = SplitMix64(seed)
        alive_l = (1 << g.n_left) - 1
        alive_r = g.right_mask
        left_cluster = [-1] * g.n_left
        cluster_rights: list[int] = []
        phases = [] if record else None
        while alive_l:
            alive = self._alive_list(alive_l)
            pivot = alive[rng.randbelow(len(alive))]
            c_right, steps = self._plan(alive_l, alive_r, pivot)
            cid = len(cluster_rights)
            cluster_rights.append(c_right)
            left_cluster[pivot] = cid
            removed = 1 << pivot
            events = [] if record else None
            for l2, r1, r12, r2, thr, joins in steps:
                k = rng.next_u53()
                if k < thr:
                    removed |= 1 << l2
                    if joins:
                        left_cluster[l2] = cid
                        dec = Decision.JOIN
                    else:
                        left_cluster[l2] = len(cluster_rights)
                        cluster_rights.append(0)
                        dec = Decision.SINGLETON
                    colored = r1 | r12 | r2
                else:
                    dec = Decision.DEFER
                    colored = r1 | r12
                if record:
                    events.append((TupleKey(pivot, l2, r1, r12, r2), dec, colored))
            if record:
                phases.append((pivot, events))
            alive_l &= ~removed
            alive_r &= ~c_right
        right_cluster = [-1] * g.n_right
        for c, m in enumerate(cluster_rights):
            for r in bits(m):
                right_cluster[r] = c
        nxt = len(cluster_rights)
        for r in range(g.n_right):
            if right_cluster[r] == -1:
                right_cluster[r] = nxt
                nxt += 1
        return left_cluster, cluster_rights, right_cluster, phases

    def run(self, seed: int, trace: bool = True) -> tuple[Clustering, Trace | None]:
        left_cluster, _, right_cluster, phases = self.run_raw(seed, record=trace)
        b = normalize(Clustering(self.g.n_left, self.g.n_right, tuple(left_cluster + right_cluster)))
        if not trace:
            return b, None
        tr = Trace(
            [
                Phase(p, tuple(TupleEvent(k, d, c) for k, d, c in evs))
                for p, evs in phases
            ]
        )
        return b, tr

    def cost(self, seed: int) -> int:
        """Cost of one run, computed without building a ``Clustering``."""
        left_cluster, cluster_rights, _, _ = self.run_raw(seed)
        return sum(
            (row ^ cluster_rights[c]).bit_count() for row, c in zip(self.g.rows, left_cluster)
        )


def run(g: BipartiteGraph, seed: int, trace: bool = True) -> tuple[Clustering, Trace | None]:
    """One seeded run of PivotBiCluster; returns the normalized clustering and its trace."""
    return PivotRunner(g).run(seed, trace=trace)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    message: str = "ok"
    pair: Pair | None = None
    events: tuple[TupleEvent, ...] = ()

    def __bool__(self):
        return self.ok


def verify_trace(g: BipartiteGraph, clustering: Clustering, trace: Trace) -> Verdict:
    """Check that each pair is colored at most once and every erroneous pair exactly once."""
    seen_pivots: set[int] = set()
    owner: dict[Pair, TupleEvent] = {}
    for ph in trace.phases:
        if ph.pivot in seen_pivots:
            return Verdict(False, f"pivot L{ph.pivot} appears in two phases")
        seen_pivots.add(ph.pivot)
        for ev in ph.events:
            if ev.key.l1 != ph.pivot:
                return Verdict(False, f"event {ev.key} recorded under pivot L{ph.pivot}", events=(ev,))
            for p in sorted(ev.colored_pairs):
                prev = owner.get(p)
                if prev is not None:
                    return Verdict(
                        False,
                        f"pair (L{p.left}, R{p.right}) colored by {prev.key} and {ev.key}",
                        p,
                        (prev, ev),
                    )
                owner[p] = ev
    for l, row in enumerate(error_rows(g, clustering)):
        for r in bits(row):
            p = Pair(l, r)
            if p not in owner:
                return Verdict(False, f"erroneous pair (L{l}, R{r}) is not colored", p)
    return Verdict(True)


def event_costs(g: BipartiteGraph, clustering: Clustering, trace: Trace) -> list[tuple[TupleEvent, int]]:
    """``|colored & erroneous|`` for every event of the trace."""
    err = error_rows(g, clustering)
    return [(ev, (ev.colored & err[ev.key.l2]).bit_count()) for ev in trace.events()]


def format_trace(trace: Trace) -> str:
    """Line-oriented log: ``pivot l2 |R1| |R12| |R2| decision colored_count``."""
    lines = ["# pivot l2 r1 r12 r2 decision colored"]
    for ph in trace.phases:
        lines.append(f"# phase {ph.pivot}")
        for ev in ph.events:
            s1, s12, s2 = ev.key.sizes
            lines.append(
                f"{ev.key.l1} {ev.key.l2} {s1} {s12} {s2} {ev.decision.value} {ev.colored.bit_count()}"
            )
    return "\n".join(lines) + "\n"
