import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.optimize import linprog

from bcc.bounds import (
    BoundsLimitError,
    TupleStats,
    alpha,
    check_dual_feasibility,
    check_lemma3,
    dual_objective_se,
    dual_solution,
    enumerate_bad_squares,
    estimate_tuple_stats,
    lemma3_case,
    lemma3_csv,
    packing_bound,
    q_symmetry,
    slack_csv,
    square_lp,
    square_lp_bound,
)
from bcc.exact import opt
from bcc.graph import Pair, all_graphs, gen_biclique_union, gen_counterexample, gen_random, new_graph
from bcc.pivot import TupleKey, conjugate
from oracles import dual_lhs, exact_dual, lp_by_vertices, pivot_law

from test_graph import graphs


def brute_squares(g):
    out = set()
    for la, lb in itertools.combinations(range(g.n_left), 2):
        for ra, rb in itertools.combinations(range(g.n_right), 2):
            quad = [(la, ra), (la, rb), (lb, ra), (lb, rb)]
            if sum(g.has_edge(*p) for p in quad) == 3:
                out.add(frozenset(quad))
    return out


def test_bad_square_examples(bad_square):
    sq = enumerate_bad_squares(bad_square)
    assert len(sq) == 1 and sq[0].pairs[-1] == Pair(1, 1)
    assert enumerate_bad_squares(gen_biclique_union([3], [3])) == []
    assert len(enumerate_bad_squares(gen_counterexample(3))) == 6


@given(graphs(max_side=5))
def test_squares_match_brute_force(g):
    sq = enumerate_bad_squares(g)
    assert {frozenset((p.left, p.right) for p in s.pairs) for s in sq} == brute_squares(g)
    assert len(sq) == len(brute_squares(g))
    assert sq == sorted(sq)
    for s in sq:
        assert not g.has_edge(s.missing.left, s.missing.right)
        assert all(g.has_edge(p.left, p.right) for p in s.pairs[:3])


def test_packing_examples(bad_square):
    assert packing_bound(bad_square) == 1
    assert packing_bound(gen_biclique_union([2, 1], [1, 3])) == 0
    # two vertex-disjoint bad squares on a 4x4 grid
    two = new_graph(4, 4, {(0, 0), (0, 1), (1, 0), (2, 2), (2, 3), (3, 2)})
    assert packing_bound(two) == 2
    assert opt(two).opt_cost == 2


def test_lp_examples(bad_square):
    assert square_lp_bound(bad_square) == pytest.approx(1.0)
    assert square_lp_bound(gen_biclique_union([2, 2], [1, 3])) == 0.0


def test_lp_counterexample3_golden():
    # frozen value; cross-checked below by scipy and by vertex enumeration
    g = gen_counterexample(3)
    value, x = square_lp(g)
    assert value == pytest.approx(2.0, abs=1e-9)
    squares = enumerate_bad_squares(g)
    idx = {p: i for i, p in enumerate(sorted({p for s in squares for p in s.pairs}))}
    A = np.zeros((len(squares), len(idx)))
    for i, s in enumerate(squares):
        for p in s.pairs:
            A[i, idx[p]] = 1
    ref = linprog(np.ones(len(idx)), A_ub=-A, b_ub=-np.ones(len(squares)), method="highs")
    assert ref.fun == pytest.approx(2.0)
    assert lp_by_vertices(A, np.ones(len(squares))) == pytest.approx(2.0)
    assert packing_bound(g) <= value <= opt(g).opt_cost


@settings(max_examples=40, deadline=None)
@given(graphs(max_side=4))
def test_bounds_chain(g):
    pb, lp, o = packing_bound(g), square_lp_bound(g), opt(g).opt_cost
    assert pb <= lp + 1e-7 and lp <= o + 1e-7
    assert (lp > 1e-9) == bool(enumerate_bad_squares(g))


def test_lp_limit():
    with pytest.raises(BoundsLimitError):
        square_lp(gen_random(6, 6, 0.5, 1), max_squares=5)


def test_alpha_formula():
    assert alpha(1, 1, 0) == 1
    assert alpha(1, 1, 1) == Fraction(1, 2)
    assert alpha(3, 0, 2) == 0
    assert alpha(0, 2, 0) == 1
    assert alpha(3, 1, 3) == Fraction(1, 2)  # case 3
    assert alpha(1, 2, 4) == Fraction(2, 3)  # case 2: |R12| / (|R1| + |R12|)


def test_conjugate_involution_and_case_symmetry():
    t = TupleKey(0, 1, 0b1, 0b10, 0b1100)
    assert conjugate(conjugate(t)) == t
    assert lemma3_case(t) == lemma3_case(conjugate(t)) == "case2"


@pytest.fixture(scope="module")
def square_stats():
    g = new_graph(2, 2, {(0, 0), (0, 1), (1, 0)})
    return g, estimate_tuple_stats(g, 100_000, seed=11)


def test_stats_bad_square(square_stats):
    g, st = square_stats
    t = TupleKey(0, 1, 0b10, 0b01, 0)
    se = math.sqrt(0.25 / st.runs)
    assert abs(st.q_hat(t) - 0.5) <= 3 * se
    assert abs(st.q_hat(t) - st.q_hat(conjugate(t))) <= 4 * math.sqrt(1.0 / st.runs)
    assert sum(st.cost_sums.values()) == st.total_cost
    assert math.isclose(
        sum(st.q_hat(k) * st.mean_conditional_cost(k) for k in st.counts), st.mean_cost
    )
    assert st.mean_cost == 1.0


def test_stats_batches_partition_runs(square_stats):
    _, st = square_stats
    assert sum(b.runs for b in st.batches) == st.runs
    merged = TupleStats()
    for b in st.batches:
        merged = merged.merge(b)
    assert merged.counts == st.counts and merged.total_cost == st.total_cost


def test_dual_bad_square(square_stats):
    g, st = square_stats
    dual = dual_solution(st)
    t = TupleKey(0, 1, 0b10, 0b01, 0)
    assert dual.beta[t] == 0.0  # min(|R12|, |R2|) = 0
    assert dual.alpha[t] == 1.0
    tc = conjugate(t)
    assert dual.beta[tc] == pytest.approx(st.q_hat(tc))
    slacks = check_dual_feasibility(g, dual, st)
    assert all(s.ok for s in slacks)
    assert dual.objective <= opt(g).opt_cost + 3 * dual_objective_se(dual, st)


def test_dual_examples_from_sizes():
    st = TupleStats(runs=10, counts={TupleKey(0, 1, 0b1, 0b10, 0b100): 4, TupleKey(2, 3, 0b1, 0, 0b10): 3},
                    cost_sums={TupleKey(0, 1, 0b1, 0b10, 0b100): 4, TupleKey(2, 3, 0b1, 0, 0b10): 0})
    d = dual_solution(st)
    assert d.beta[TupleKey(0, 1, 0b1, 0b10, 0b100)] == pytest.approx(0.4 / 2)
    assert d.beta[TupleKey(2, 3, 0b1, 0, 0b10)] == 0.0


def test_feasibility_lhs_matches_definition():
    g = gen_random(3, 3, 0.5, 5)
    st = estimate_tuple_stats(g, 3000, seed=2)
    dual = dual_solution(st)
    beta_exact = {
        (k.l1, k.l2, frozenset(k.sets()[0]), frozenset(k.sets()[1]), frozenset(k.sets()[2])):
        Fraction(dual.coef[k]).limit_denominator(1000) * Fraction(st.counts[k], st.runs)
        for k in st.counts
    }
    ref = dual_lhs(beta_exact, g.edges(), 3, 3)
    for s in check_dual_feasibility(g, dual, st):
        assert s.lhs == pytest.approx(float(ref[(s.pair.left, s.pair.right)]), abs=1e-12)


def test_biclique_union_dual_is_zero():
    g = gen_biclique_union([2, 1], [2, 2])
    st = estimate_tuple_stats(g, 2000, seed=4)
    for k in st.counts:
        s1, s12, s2 = k.sizes
        assert s12 == 0 or (s1 == 0 and s2 == 0)
    dual = dual_solution(st)
    assert all(s.lhs == 0.0 for s in check_dual_feasibility(g, dual, st))
    assert dual.objective == 0.0


def test_lemma3_case3_equality():
    g = new_graph(2, 5, {(0, 0), (0, 1), (0, 2), (1, 2), (1, 3), (1, 4)})
    st = estimate_tuple_stats(g, 50_000, seed=5)
    rows = check_lemma3(st, dual_solution(st))
    assert [r.case for r in rows] == ["case3"]
    assert rows[0].ok and rows[0].equality_ok


def test_lemma3_case1_tight():
    g = new_graph(2, 3, {(0, 0), (0, 1), (1, 1), (1, 2)})
    st = estimate_tuple_stats(g, 20_000, seed=6)
    rows = check_lemma3(st, dual_solution(st))
    assert [r.case for r in rows] == ["case1"]
    # deterministic cost 2 per event, 4 (beta + beta') = 4 * q * 1/2 * 1 summed: ratio 1
    assert rows[0].lhs == pytest.approx(rows[0].rhs)


def test_lemma3_degenerate():
    g = new_graph(2, 2, {(0, 0), (1, 1)})
    st = estimate_tuple_stats(g, 500, seed=1)
    rows = check_lemma3(st, dual_solution(st))
    assert all(r.case == "degenerate" and r.lhs == 0 == r.rhs and r.ok for r in rows)


def test_stats_match_exact_law():
    g = new_graph(3, 3, {(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2), (0, 2)})
    law = pivot_law(g.edges(), 3, 3)
    st = estimate_tuple_stats(g, 40_000, seed=8)
    exact_q = {(k[0], k[1], k[2], k[3], k[4]): v for k, v in law.q.items()}
    assert len(st.counts) == len(law.q)
    for k in st.counts:
        key = (k.l1, k.l2, *map(frozenset, k.sets()))
        q = float(exact_q[key])
        assert abs(st.q_hat(k) - q) <= 4 * math.sqrt(q * (1 - q) / st.runs) + 1e-12


@pytest.mark.parametrize("shape", [(3, 3), (2, 4), (4, 2)])
def test_exact_lemmas_on_every_small_graph(shape):
    """Exact laws: E[cost] <= 4 OPT, q_T = q_Tbar, dual feasibility, sum beta <= OPT,
    and the per-conjugate-pair bound, on every graph of the given shape."""
    nl, nr = shape
    for g in all_graphs(nl, nr):
        edges = g.edges()
        law = pivot_law(edges, nl, nr)
        o = opt(g).opt_cost
        assert law.expected_cost <= 4 * o
        for k, q in law.q.items():
            assert law.q.get((k[1], k[0], k[4], k[3], k[2]), 0) == q
        beta = exact_dual(law)
        assert sum(beta.values()) <= o
        assert all(v <= 1 for v in dual_lhs(beta, edges, nl, nr).values())
        for k in law.q:
            kc = (k[1], k[0], k[4], k[3], k[2])
            lhs = law.cost_mass[k] + law.cost_mass.get(kc, 0)
            assert lhs <= 4 * (beta[k] + beta.get(kc, 0))


def test_reports_csv(square_stats):
    g, st = square_stats
    dual = dual_solution(st)
    text = slack_csv(check_dual_feasibility(g, dual, st))
    assert text.splitlines()[0] == "pair,is_edge,lhs,bound,slack,se,ok"
    assert len(text.splitlines()) == 5
    text = lemma3_csv(check_lemma3(st, dual))
    assert text.splitlines()[0].startswith("tuple,conjugate,case,lhs,bound")
    assert all(len(line.split(",")) == 9 for line in text.splitlines())


def test_q_symmetry_rows(square_stats):
    _, st = square_stats
    rows = q_symmetry(st)
    assert len(rows) == 2 and all(r.ok for r in rows)
