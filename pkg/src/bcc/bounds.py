"""Lower bounds on OPT and the Monte-Carlo check of the tuple dual.

Two families live here:

* combinatorial/LP lower bounds built from *bad squares* (two left and two
  right nodes spanning exactly three edges): a greedy pair-disjoint packing
  and the square-covering LP;
* the tuple machinery: event statistics gathered from many seeded
  PivotBiCluster runs, the explicit dual point ``beta(T)``, its per-pair
  feasibility slacks and the per-conjugate-pair cost bound.

Statistical tolerances are ``z`` standard errors.  Where the estimated
quantity is a sum over one conjugate pair, the standard error is exact per
run (each tuple event happens at most once per run and ``X_T``, ``X_Tbar``
exclude each other); per-pair dual sums use batch means.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import BipartiteGraph, Pair, bits
from .pivot import PivotRunner, TupleKey, conjugate
from .rng import derive_seed
from .simplex import solve_covering_lp

__all__ = [
    "BadSquare",
    "enumerate_bad_squares",
    "packing_bound",
    "square_lp_bound",
    "square_lp",
    "conjugate",
    "TupleStats",
    "estimate_tuple_stats",
    "DualSolution",
    "dual_solution",
    "alpha",
    "PairSlack",
    "check_dual_feasibility",
    "dual_objective_se",
    "Lemma3Row",
    "check_lemma3",
    "lemma3_case",
    "SymmetryRow",
    "q_symmetry",
    "slack_csv",
    "lemma3_csv",
]


class BoundsLimitError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BadSquare:
    la: int
    lb: int
    ra: int
    rb: int
    missing: Pair = field(compare=False)

    @property
    def pairs(self) -> tuple[Pair, Pair, Pair, Pair]:
        """The four pairs, the missing one last."""
        ps = [Pair(l, r) for l in (self.la, self.lb) for r in (self.ra, self.rb)]
        ps.remove(self.missing)
        return (*ps, self.missing)


def enumerate_bad_squares(g: BipartiteGraph) -> list[BadSquare]:
    """All bad squares, sorted by ``(la, lb, ra, rb)`` with ``la < lb``, ``ra < rb``."""
    out = []
    rows = g.rows
    for la in range(g.n_left):
        for lb in range(la + 1, g.n_left):
            a, b = rows[la], rows[lb]
            union = a | b
            if not union:
                continue
            for ra in range(g.n_right):
                for rb in range(ra + 1, g.n_right):
                    cells = {
                        (la, ra): a >> ra & 1,
                        (la, rb): a >> rb & 1,
                        (lb, ra): b >> ra & 1,
                        (lb, rb): b >> rb & 1,
                    }
                    if sum(cells.values()) == 3:
                        miss = next(k for k, v in cells.items() if not v)
                        out.append(BadSquare(la, lb, ra, rb, Pair(*miss)))
    return out


def packing_bound(g: BipartiteGraph) -> int:
    """Size of a greedy first-fit family of pair-disjoint bad squares."""
    used: set[Pair] = set()
    count = 0
    for sq in enumerate_bad_squares(g):
        ps = sq.pairs
        if used.isdisjoint(ps):
            used.update(ps)
            count += 1
    return count


def square_lp(g: BipartiteGraph, max_squares: int = 2000, max_pairs: int = 400):
    """Optimal fractional hitting of all bad squares.

    Returns ``(value, x)`` where ``x`` maps each pair that lies in some bad
    square to its LP value; pairs outside every square are 0 at optimum.
    """
    squares = enumerate_bad_squares(g)
    if not squares:
        return 0.0, {}
    index: dict[Pair, int] = {}
    for sq in squares:
        for p in sq.pairs:
            index.setdefault(p, len(index))
    if len(squares) > max_squares or len(index) > max_pairs:
        raise BoundsLimitError(
            f"LP has {len(squares)} constraints / {len(index)} variables, "
            f"limits are {max_squares} / {max_pairs}"
        )
    A = np.zeros((len(squares), len(index)))
    for i, sq in enumerate(squares):
        for p in sq.pairs:
            A[i, index[p]] = 1.0
    res = solve_covering_lp(np.ones(len(index)), A, np.ones(len(squares)))
    return res.value, {p: float(res.x[j]) for p, j in index.items()}


def square_lp_bound(g: BipartiteGraph, **limits) -> float:
    return square_lp(g, **limits)[0]


# --------------------------------------------------------------------------
# tuple statistics


@dataclass
class TupleStats:
    """Event census over ``runs`` seeded runs.

    ``counts[T]`` is the number of runs in which ``X_T`` occurred,
    ``cost_sums[T]`` the summed ``cost(T)`` over those runs.  ``batches``
    holds the same census for contiguous blocks of runs (batch means).
    """

    runs: int = 0
    counts: dict = field(default_factory=dict)
    cost_sums: dict = field(default_factory=dict)
    cost_sq_sums: dict = field(default_factory=dict)
    total_cost: int = 0
    total_cost_sq: int = 0
    batches: list = field(default_factory=list)

    def q_hat(self, key: TupleKey) -> float:
        return self.counts.get(key, 0) / self.runs if self.runs else 0.0

    def mean_conditional_cost(self, key: TupleKey) -> float:
        n = self.counts.get(key, 0)
        return self.cost_sums[key] / n if n else 0.0

    @property
    def mean_cost(self) -> float:
        return self.total_cost / self.runs if self.runs else 0.0

    @property
    def cost_se(self) -> float:
        if self.runs < 2:
            return 0.0
        m = self.mean_cost
        var = max(self.total_cost_sq / self.runs - m * m, 0.0)
        return math.sqrt(var / self.runs)

    def merge(self, other: "TupleStats") -> "TupleStats":
        out = TupleStats(
            self.runs + other.runs,
            dict(self.counts),
            dict(self.cost_sums),
            dict(self.cost_sq_sums),
            self.total_cost + other.total_cost,
            self.total_cost_sq + other.total_cost_sq,
            list(self.batches) + list(other.batches),
        )
        for k, v in other.counts.items():
            out.counts[k] = out.counts.get(k, 0) + v
            out.cost_sums[k] = out.cost_sums.get(k, 0) + other.cost_sums[k]
            out.cost_sq_sums[k] = out.cost_sq_sums.get(k, 0) + other.cost_sq_sums[k]
        return out


def _census(runner: PivotRunner, seeds) -> TupleStats:
    rows = runner.g.rows
    counts: dict = {}
    csum: dict = {}
    csq: dict = {}
    total = total_sq = 0
    n = 0
    for seed in seeds:
        n += 1
        left_cluster, cluster_rights, _, phases = runner.run_raw(seed, record=True)
        err = [row ^ cluster_rights[c] for row, c in zip(rows, left_cluster)]
        run_cost = 0
        for e in err:
            run_cost += e.bit_count()
        total += run_cost
        total_sq += run_cost * run_cost
        for _, events in phases:
            for key, _, colored in events:
                c = (colored & err[key.l2]).bit_count()
                if key in counts:
                    counts[key] += 1
                    csum[key] += c
                    csq[key] += c * c
                else:
                    counts[key] = 1
                    csum[key] = c
                    csq[key] = c * c
    return TupleStats(n, counts, csum, csq, total, total_sq)


def estimate_tuple_stats(
    g: BipartiteGraph, runs: int, seed: int, n_batches: int = 20
) -> TupleStats:
    """Run PivotBiCluster ``runs`` times (run ``j`` uses ``derive_seed(seed, j)``)
    and aggregate every bad event by its full tuple."""
    runner = PivotRunner(g)
    n_batches = max(1, min(n_batches, runs)) if runs else 1
    parts = [
        _census(
            runner,
            (derive_seed(seed, j) for j in range(b * runs // n_batches, (b + 1) * runs // n_batches)),
        )
        for b in range(n_batches)
    ]
    out = TupleStats()
    for part in parts:
        out = out.merge(part)
    out.batches = parts
    return out


# --------------------------------------------------------------------------
# the explicit dual point


def alpha(s1: int, s12: int, s2: int) -> Fraction:
    """``min(1, |R12| / (min(|R12|,|R1|) + min(|R12|,|R2|)))``; 0 when ``R12`` is empty."""
    if s12 == 0:
        return Fraction(0)
    den = min(s12, s1) + min(s12, s2)
    if den == 0:
        return Fraction(1)
    return min(Fraction(1), Fraction(s12, den))


@dataclass
class DualSolution:
    """``beta[T] = coef[T] * q_hat(T)`` with ``coef[T] = alpha_T * min(|R12|, |R2|)``."""

    alpha: dict
    coef: dict
    beta: dict
    objective: float


def dual_solution(stats: TupleStats) -> DualSolution:
    if not stats.counts:
        raise ValueError("no events recorded")
    al, coef, beta = {}, {}, {}
    for key in stats.counts:
        s1, s12, s2 = key.sizes
        a = alpha(s1, s12, s2)
        al[key] = float(a)
        coef[key] = float(a * min(s12, s2))
        beta[key] = coef[key] * stats.q_hat(key)
    return DualSolution(al, coef, beta, math.fsum(beta.values()))


def _batch_se(stats: TupleStats, weights: dict) -> float:
    """Batch-means standard error of ``sum_T weights[T] * q_hat(T)``."""
    if len(stats.batches) < 2:
        return 0.0
    vals = []
    for b in stats.batches:
        vals.append(sum(w * b.counts.get(k, 0) for k, w in weights.items()) / b.runs)
    return float(np.std(vals, ddof=1) / math.sqrt(len(vals)))


def dual_objective_se(dual: DualSolution, stats: TupleStats) -> float:
    return _batch_se(stats, {k: c for k, c in dual.coef.items() if c})


@dataclass(frozen=True)
class PairSlack:
    pair: Pair
    is_edge: bool
    lhs: float
    se: float
    z: float

    @property
    def slack(self) -> float:
        return 1.0 - self.lhs

    @property
    def ok(self) -> bool:
        return self.slack >= -self.z * self.se - 1e-12


def _pair_weights(g: BipartiteGraph, dual: DualSolution) -> dict:
    """For each pair, the coefficient of every ``q_hat(T)`` in its constraint's LHS."""
    w: dict = {}

    def add(l, r, key, val):
        d = w.setdefault((l, r), {})
        d[key] = d.get(key, 0.0) + val

    for key, c in dual.coef.items():
        if c == 0.0:
            continue
        s1, s12, s2 = key.sizes
        for r in bits(key.r2):
            # edge (l2, r): first sum; non-edge (l1, r): the only sum
            add(key.l2, r, key, c / s2)
            add(key.l1, r, key, c / s2)
        for r in bits(key.r12):
            add(key.l1, r, key, c / s12)
            add(key.l2, r, key, c / s12)
    return w


def check_dual_feasibility(
    g: BipartiteGraph, dual: DualSolution, stats: TupleStats, z: float = 3.0
) -> list[PairSlack]:
    """Per-pair LHS of the dual constraints for the point ``dual``.

    Edges collect ``beta/|R2|`` for tuples with ``l2 = l, r in R2`` and
    ``beta/|R12|`` for tuples with ``r in R12`` and ``l`` in either role;
    non-edges collect ``beta/|R2|`` for tuples with ``l1 = l, r in R2``.
    """
    weights = _pair_weights(g, dual)
    out = []
    for l in range(g.n_left):
        for r in range(g.n_right):
            wt = weights.get((l, r), {})
            lhs = math.fsum(v * stats.q_hat(k) for k, v in wt.items())
            out.append(PairSlack(Pair(l, r), g.has_edge(l, r), lhs, _batch_se(stats, wt), z))
    return out


# --------------------------------------------------------------------------
# per-conjugate-pair cost bound


def lemma3_case(key: TupleKey) -> str:
    s1, s12, s2 = key.sizes
    if s12 == 0:
        return "degenerate"
    if s1 <= s12 and s2 <= s12:
        return "case1"
    if s1 > s12 and s2 > s12:
        return "case3"
    return "case2"


@dataclass(frozen=True)
class Lemma3Row:
    key: TupleKey
    conj: TupleKey
    case: str
    lhs: float
    rhs: float
    se: float
    z: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + self.z * self.se + 1e-12

    @property
    def equality_ok(self) -> bool:
        return abs(self.lhs - self.rhs) <= self.z * self.se + 1e-12


def check_lemma3(stats: TupleStats, dual: DualSolution, z: float = 3.0) -> list[Lemma3Row]:
    """``q_T E[cost(T)|X_T] + q_Tbar E[cost(Tbar)|X_Tbar]`` against ``4 (beta(T) + beta(Tbar))``
    for every observed conjugate pair, each pair reported once."""
    n = stats.runs
    rows = []
    done = set()
    for key in sorted(stats.counts):
        cj = conjugate(key)
        if key in done:
            continue
        done.update((key, cj))
        lhs = rhs = ey2 = 0.0
        for k in (key, cj):
            cnt = stats.counts.get(k, 0)
            if not cnt:
                continue
            c4 = 4.0 * dual.coef[k]
            lhs += stats.cost_sums[k] / n
            rhs += c4 * cnt / n
            ey2 += (stats.cost_sq_sums[k] - 2 * c4 * stats.cost_sums[k] + c4 * c4 * cnt) / n
        mean = lhs - rhs
        se = math.sqrt(max(ey2 - mean * mean, 0.0) / n) if n > 1 else 0.0
        rows.append(Lemma3Row(key, cj, lemma3_case(key), lhs, rhs, se, z))
    return rows


@dataclass(frozen=True)
class SymmetryRow:
    key: TupleKey
    q: float
    q_conj: float
    se: float
    z: float

    @property
    def ok(self) -> bool:
        return abs(self.q - self.q_conj) <= self.z * self.se + 1e-12


def q_symmetry(stats: TupleStats, z: float = 4.0) -> list[SymmetryRow]:
    """Compare ``q_hat(T)`` with ``q_hat(Tbar)`` for every observed ``T``.

    The per-run indicators of ``X_T`` and ``X_Tbar`` are mutually exclusive,
    so the difference has variance ``q + qbar - (q - qbar)**2``.
    """
    n = stats.runs
    out = []
    for key in sorted(stats.counts):
        q, qc = stats.q_hat(key), stats.q_hat(conjugate(key))
        var = q + qc - (q - qc) ** 2
        out.append(SymmetryRow(key, q, qc, math.sqrt(max(var, 0.0) / n), z))
    return out


# --------------------------------------------------------------------------
# CSV reports


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def slack_csv(rows: list[PairSlack]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pair", "is_edge", "lhs", "bound", "slack", "se", "ok"])
    for r in rows:
        w.writerow(
            [f"L{r.pair.left}-R{r.pair.right}", int(r.is_edge), _fmt(r.lhs), 1, _fmt(r.slack), _fmt(r.se), int(r.ok)]
        )
    return buf.getvalue()


def lemma3_csv(rows: list[Lemma3Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tuple", "conjugate", "case", "lhs", "bound", "slack", "se", "ok", "equality_ok"])
    for r in rows:
        w.writerow(
            [
                str(r.key).replace(",", ";"),
                str(r.conj).replace(",", ";"),
                r.case,
                _fmt(r.lhs),
                _fmt(r.rhs),
                _fmt(r.rhs - r.lhs),
                _fmt(r.se),
                int(r.ok),
                int(r.equality_ok),
            ]
        )
    return buf.getvalue()
