from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from bcc.clustering import Clustering, cost, normalize
from bcc.graph import bits, gen_biclique_union, gen_counterexample, gen_random, new_graph
from bcc.pivot import (
    Decision,
    Phase,
    PivotRunner,
    Trace,
    TupleEvent,
    TupleKey,
    conjugate,
    decide_ell2,
    event_costs,
    format_trace,
    join_threshold,
    run,
    verify_trace,
)
from bcc.rng import SplitMix64, derive_seed
from oracles import pivot_law

from test_graph import graphs

GOLDEN = Path(__file__).parent / "golden"


def test_decide_examples():
    assert decide_ell2(1, 1, 0, 0.99) is Decision.JOIN
    assert decide_ell2(3, 1, 2, 0.49) is Decision.SINGLETON
    assert decide_ell2(3, 1, 2, 0.51) is Decision.DEFER
    for u in (0.0, 0.3, 0.999):
        assert decide_ell2(5, 0, 7, u) is Decision.DEFER


def test_decide_half_boundary_on_grid():
    # p = 1/2 exactly: accepted fraction of a uniform 1000-point grid is 500
    grid = [i / 1000 for i in range(1000)]
    acc = [decide_ell2(3, 1, 2, u) is Decision.SINGLETON for u in grid]
    assert sum(acc) == 500 and acc[499] and not acc[500]


@pytest.mark.parametrize("s1,s12,s2", [(0, 1, 3), (2, 2, 5), (1, 3, 7), (4, 1, 1), (0, 0, 0), (2, 5, 0)])
def test_threshold_matches_decision(s1, s12, s2):
    thr = join_threshold(s1, s12, s2)
    rng = SplitMix64(s1 * 100 + s12 * 10 + s2)
    for _ in range(200):
        k = rng.next_u53()
        inside = k < thr
        assert inside == (decide_ell2(s1, s12, s2, k / 2**53) is not Decision.DEFER)
    # threshold is the exact ceiling of p * 2**53
    if s12 and s2 > s12:
        assert Fraction(thr - 1, 2**53) < Fraction(s12, s2) <= Fraction(thr, 2**53)


def test_bad_square_costs_one(bad_square):
    assert {cost(bad_square, run(bad_square, s)[0]).total for s in range(1000)} == {1}


@pytest.mark.parametrize("ls,rs", [([2], [2]), ([1, 1], [1, 1]), ([2, 3], [1, 2]), ([3, 0, 1], [2, 2, 0])])
def test_biclique_union_recovered(ls, rs):
    g = gen_biclique_union(ls, rs)
    runner = PivotRunner(g)
    assert all(runner.cost(s) == 0 for s in range(1000))


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_counterexample_cost(n):
    g = gen_counterexample(n)
    runner = PivotRunner(g)
    assert {runner.cost(s) for s in range(100)} == {2 * n - 2}


def test_counterexample_first_phase_all_join():
    _, tr = run(gen_counterexample(6), 4)
    assert len(tr.phases) == 1
    assert all(ev.key.sizes == (1, 4, 1) and ev.decision is Decision.JOIN for ev in tr.phases[0].events)


def test_cost_helper_agrees_with_clustering():
    g = gen_random(6, 5, 0.5, 3)
    runner = PivotRunner(g)
    for s in range(50):
        b, _ = runner.run(s, trace=False)
        assert cost(g, b).total == runner.cost(s)


@settings(max_examples=60, deadline=None)
@given(graphs(max_side=6), st.integers(0, 2**64 - 1))
def test_run_invariants(g, seed):
    b, tr = run(g, seed)
    assert len(b.labels) == g.n_left + g.n_right
    assert normalize(b) == b
    assert verify_trace(g, b, tr).ok
    # per-run cost decomposition over colors
    assert sum(c for _, c in event_costs(g, b, tr)) == cost(g, b).total
    pivots = [ph.pivot for ph in tr.phases]
    assert len(set(pivots)) == len(pivots)
    for ph in tr.phases:
        for ev in ph.events:
            k = ev.key
            assert k.l1 == ph.pivot != k.l2
            assert not (k.r1 & k.r12 or k.r1 & k.r2 or k.r12 & k.r2)
            base = k.r1 | k.r12
            if ev.decision is Decision.DEFER:
                assert ev.colored == base
            else:
                assert ev.colored == base | k.r2


@given(graphs(max_side=5), st.integers(0, 2**64 - 1))
def test_deterministic(g, seed):
    b1, t1 = run(g, seed)
    b2, t2 = run(g, seed)
    assert b1 == b2 and t1 == t2


def _sequential_run(g, seed, order_seed):
    """Same draws per l2, but l2 visited in a shuffled order with live removal
    applied immediately; must give the same clustering."""
    rng = SplitMix64(seed)
    shuffle = SplitMix64(order_seed)
    rows = g.rows
    alive_l = set(range(g.n_left))
    alive_r = (1 << g.n_right) - 1
    labels = {}
    rights = []
    while alive_l:
        alive = sorted(alive_l)
        pivot = alive[rng.randbelow(len(alive))]
        draws = {l2: rng.random() for l2 in alive if l2 != pivot}
        order = [l for l in alive if l != pivot]
        for i in range(len(order) - 1, 0, -1):
            j = shuffle.randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        c = rows[pivot] & alive_r
        cid = len(rights)
        rights.append(c)
        labels[pivot] = cid
        alive_l.discard(pivot)
        for l2 in order:
            n2 = rows[l2] & alive_r
            d = decide_ell2((c & ~n2).bit_count(), (c & n2).bit_count(), (n2 & ~c).bit_count(), draws[l2])
            if d is Decision.JOIN:
                labels[l2] = cid
                alive_l.discard(l2)
            elif d is Decision.SINGLETON:
                labels[l2] = len(rights)
                rights.append(0)
                alive_l.discard(l2)
        alive_r &= ~c
    right_labels = []
    nxt = len(rights)
    for r in range(g.n_right):
        owner = next((i for i, m in enumerate(rights) if m >> r & 1), None)
        if owner is None:
            owner, nxt = nxt, nxt + 1
        right_labels.append(owner)
    return normalize(Clustering(g.n_left, g.n_right, tuple(labels[l] for l in range(g.n_left)) + tuple(right_labels)))


@given(graphs(max_side=6), st.integers(0, 2**32), st.integers(0, 2**32))
def test_order_independence(g, seed, order_seed):
    assert run(g, seed, trace=False)[0] == _sequential_run(g, seed, order_seed)


def test_verify_detects_double_coloring(bad_square):
    b, tr = run(bad_square, 0)
    ev = tr.phases[0].events[0]
    bad = Trace([Phase(tr.phases[0].pivot, (ev, ev))] + tr.phases[1:])
    v = verify_trace(bad_square, b, bad)
    assert not v.ok and v.pair is not None and len(v.events) == 2
    assert f"(L{v.pair.left}, R{v.pair.right})" in v.message


def test_verify_detects_uncolored_error(bad_square):
    b, tr = run(bad_square, 0)
    stripped = Trace([Phase(ph.pivot, ()) for ph in tr.phases])
    assert not verify_trace(bad_square, b, stripped).ok


def test_verify_empty_graph():
    g = new_graph(3, 2, set())
    b, tr = run(g, 1)
    v = verify_trace(g, b, tr)
    assert v.ok
    assert all(ev.colored == 0 for ev in tr.events())


def test_conjugate():
    t = TupleKey(0, 1, 0b10, 0b100, 0b1000)
    c = conjugate(t)
    assert c == TupleKey(1, 0, 0b1000, 0b100, 0b10)
    assert c.sets() == ({3}, {2}, {1})
    assert conjugate(c) == t


def test_trace_log_golden(bad_square):
    _, tr = run(bad_square, 0)
    assert format_trace(tr) == (GOLDEN / "bad_square_seed0.log").read_text()
    # counterexample(3): one phase, both others join with |R1|=|R12|=|R2|=1
    _, tr = run(gen_counterexample(3), 0)
    assert format_trace(tr) == (GOLDEN / "counterexample3_seed0.log").read_text()


def test_matches_exact_law_on_small_graph():
    g = new_graph(3, 3, {(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)})
    law = pivot_law(g.edges(), 3, 3)
    runner = PivotRunner(g)
    n = 20000
    costs = [runner.cost(derive_seed(7, j)) for j in range(n)]
    mean = sum(costs) / n
    var = sum((c - mean) ** 2 for c in costs) / (n - 1)
    assert abs(mean - float(law.expected_cost)) <= 4 * (var / n) ** 0.5
