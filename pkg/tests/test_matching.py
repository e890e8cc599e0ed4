import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from transduct.experiments import random_zero_one_table, star_family
from transduct.matching import (BipartiteGraph, DeficientGraphError, GraphError, LossKindError,
                                achievable_zero_one, blocking_sets, deficiency, demand_flow,
                                optimal_zero_one, problem_graph, prune_degrees, r_matching,
                                row_demands, split_graph)
from transduct.metric import metric_space, zero_one_space
from transduct.minimax import brute_force_minimax
from transduct.oig import BehaviorTable, build_problem, evaluate
from transduct.properties import random_graph

from oracles import blocking_nodes, hall_deficiency, naive_xi


def test_complete_bipartite_matched():
    g = BipartiteGraph(3, 3, ((0, 1, 2),) * 3)
    res = r_matching(g)
    assert res.matched
    assert sorted(res.matching.values()) == [0, 1, 2]


def test_pigeonhole_certificate():
    g = BipartiteGraph(1, 2, ((0, 1),))
    res = r_matching(g)
    assert res.status == "deficient"
    assert res.certificate == {0, 1}
    assert len(g.neighborhood(res.certificate)) == 1
    assert deficiency(g) == (1, frozenset({0, 1}))


def test_matchable_deficiency_zero():
    assert deficiency(BipartiteGraph(2, 2, ((0,), (1,)))) == (0, frozenset())


graphs = st.builds(lambda seed: random_graph(random.Random(seed), max_right=10),
                   st.integers(0, 2 ** 32 - 1))


@settings(max_examples=150, deadline=None)
@given(g=graphs)
def test_against_exhaustive_hall(g):
    value, _ = hall_deficiency(g.edges, g.right)
    res = r_matching(g)
    assert res.matched == (value == 0)
    got, witness = deficiency(g)
    assert got == value
    if value:
        assert len(witness) - len(g.neighborhood(witness)) == value
        assert len(g.neighborhood(res.certificate)) < len(res.certificate)
    else:
        assert len(set(res.matching.values())) == g.right
        assert all(r in g.edges[l] for l, r in res.matching.items())


@settings(max_examples=60, deadline=None)
@given(g=graphs, seed=st.integers(0, 2 ** 16))
def test_status_invariant_under_repeated_edges_and_reordering(g, seed):
    rng = random.Random(seed)
    edges = []
    for adj in g.edges:
        adj = list(adj) + [r for r in adj if rng.random() < 0.5]
        rng.shuffle(adj)
        edges.append(adj)
    rng.shuffle(edges)
    h = BipartiteGraph(len(edges), g.right, tuple(tuple(a) for a in edges))
    assert r_matching(h).matched == r_matching(g).matched
    assert deficiency(h)[0] == deficiency(g)[0]


def test_duplicating_a_left_node_can_change_status():
    g = BipartiteGraph(1, 2, ((0, 1),))
    assert not r_matching(g).matched
    assert r_matching(BipartiteGraph(2, 2, ((0, 1), (0, 1)))).matched


def test_prune_identity_unchanged():
    g = BipartiteGraph(3, 3, ((0,), (1,), (2,)))
    assert prune_degrees(g) == g


def test_prune_removes_node_outside_blocking_sets():
    g = BipartiteGraph(3, 2, ((0, 1), (0, 1), (0, 1)))
    # the oracle view: with all three nodes, no tight set exists at all
    assert blocking_nodes(g.edges, 2) == set()
    pruned = prune_degrees(g)
    assert pruned.edges == ((0, 1), (0, 1), ())
    assert blocking_nodes(pruned.edges[:2], 2) == {0, 1}


def test_prune_rejects_deficient():
    with pytest.raises(DeficientGraphError):
        prune_degrees(BipartiteGraph(1, 2, ((0, 1),)))


def test_prune_cap():
    with pytest.raises(GraphError, match="capped"):
        prune_degrees(BipartiteGraph(17, 17, tuple((i,) for i in range(17))), cap=16)


@settings(max_examples=80, deadline=None)
@given(g=st.builds(lambda seed: random_graph(random.Random(seed), max_right=8, max_left=12),
                   st.integers(0, 2 ** 32 - 1)))
def test_prune_keeps_matchability(g):
    if deficiency(g)[0]:
        return
    pruned = prune_degrees(g)
    assert r_matching(pruned).matched
    tight = blocking_sets(pruned)
    for l, adj in enumerate(pruned.edges):
        assert set(adj) <= set(g.edges[l])
        if adj:
            # all surviving edges go into one tight set containing the node
            assert any(set(adj) <= {r for r in range(g.right) if m >> r & 1} for m in tight)


def test_three_row_zero_one(three_row_problem):
    sol = optimal_zero_one(three_row_problem)
    assert sol.epsilon == Fraction(1, 3)
    assert sol.d_star == 2
    assert evaluate(three_row_problem, sol.learner).worst == Fraction(1, 3)
    cert = sol.certificate
    assert cert["neighbors"] < cert["demand"]


def test_single_row_zero(binary):
    for n in range(1, 5):
        sol = optimal_zero_one(build_problem(BehaviorTable(binary, n, ((1,) * n,))))
        assert sol.epsilon == 0 and sol.d_star == n


def test_full_cube_n2(binary):
    p = build_problem(BehaviorTable(binary, 2, ((0, 0), (0, 1), (1, 0), (1, 1))))
    assert optimal_zero_one(p).epsilon == Fraction(1, 2)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_star_family(n):
    # frozen from the naive oracle: 1, 1/2, 1/3, 1/4
    assert optimal_zero_one(build_problem(star_family(n))).epsilon == Fraction(1, n)


def test_wrong_kind():
    space = metric_space("ab", [[0, 2], [2, 0]])
    with pytest.raises(LossKindError):
        optimal_zero_one(build_problem(BehaviorTable(space, 1, ((0,), (1,)))))


def test_decision_query_rounds_demand_up(three_row_problem):
    # 1/3 achievable; anything strictly below is not, even off the grid
    assert achievable_zero_one(three_row_problem, Fraction(1, 3)).feasible
    assert not achievable_zero_one(three_row_problem, Fraction(3, 10)).feasible
    assert achievable_zero_one(three_row_problem, Fraction(2, 5)).feasible
    assert row_demands(three_row_problem, Fraction(2, 5)) == [2, 2, 2]


def test_non_uniform_targets(three_row_problem):
    from dataclasses import replace
    tight = replace(three_row_problem, targets=(Fraction(0), Fraction(1, 3), Fraction(1, 3)))
    assert achievable_zero_one(tight).feasible
    tighter = replace(three_row_problem, targets=(Fraction(0), Fraction(0), Fraction(1, 3)))
    assert not achievable_zero_one(tighter).feasible


@pytest.mark.parametrize("seed", range(40))
def test_flow_matches_literal_splitting(seed):
    rng = random.Random(seed)
    table = random_zero_one_table(rng, rng.randint(1, 4), 2, 6)
    p = build_problem(table)
    for d in range(table.n + 1):
        demands = [d] * len(p.rows)
        flow = demand_flow(p, demands)
        g, _ = split_graph(p, demands)
        assert flow.feasible == r_matching(g).matched
        if not flow.feasible:
            rows = flow.shortfall_rows
            nbrs = {v for v in range(len(p.variables))
                    if any(r in rows for r, _ in p.neighbors[v])}
            assert len(nbrs) < sum(demands[r] for r in rows)


@pytest.mark.parametrize("seed", range(40))
def test_feasibility_monotone_and_row_deletion(seed):
    rng = random.Random(seed)
    table = random_zero_one_table(rng, rng.randint(1, 4), rng.randint(2, 3), 6)
    p = build_problem(table)
    feas = [demand_flow(p, [d] * len(p.rows)).feasible for d in range(table.n + 1)]
    assert feas == sorted(feas, reverse=True)
    full = optimal_zero_one(p).epsilon
    for drop in range(len(table.rows)):
        keep = [r for r in range(len(table.rows)) if r != drop]
        if keep:
            assert optimal_zero_one(build_problem(table.project(rows=keep))).epsilon <= full


@pytest.mark.parametrize("seed", range(30))
def test_matches_naive_oracle(seed):
    rng = random.Random(seed)
    table = random_zero_one_table(rng, rng.randint(1, 3), rng.randint(2, 3), 4)
    p = build_problem(table)
    if len(p.variables) > 10:
        pytest.skip("oracle too slow")
    assert optimal_zero_one(p).epsilon == naive_xi(table.rows, table.n, p.space.loss)


def test_problem_graph_degrees(three_row_problem):
    g = problem_graph(three_row_problem)
    assert all(len(adj) == 3 for adj in g.right_adjacency())


def test_graph_json_round_trip():
    g = BipartiteGraph(2, 3, ((0, 2), (1,)))
    assert BipartiteGraph.from_dict(g.to_dict()) == g
