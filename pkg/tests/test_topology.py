import itertools

import numpy as np
import pytest

from csflock.errors import DimensionError
from csflock.topology import (
    CyclicSchedule,
    Digraph,
    ExplicitSchedule,
    SwitchingSignal,
    all_digraphs,
    compose,
    compose_arcs,
    compose_sequence,
    compose_with_self_loops,
    constant_signal,
    is_rooted,
    is_rooted_leadership,
    is_strongly_rooted,
    random_alternating_signal,
    random_rooted_leadership,
    signal_at,
)


def closure_oracle(g: Digraph) -> np.ndarray:
    """reach[u, v] iff v is reachable from u (u included), by repeated boolean products."""
    n = g.n
    step = np.zeros((n, n), dtype=bool)
    for j, i in g.arcs:
        step[j - 1, i - 1] = True
    reach = np.eye(n, dtype=bool) | step
    while True:
        nxt = reach | ((reach.astype(int) @ step.astype(int)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def small_digraphs(max_n=4):
    for n in range(1, max_n + 1):
        yield from all_digraphs(n)


# ---------------------------------------------------------------- Digraph


def test_digraph_rejects_self_loops_and_bad_vertices():
    with pytest.raises(ValueError):
        Digraph(3, frozenset({(2, 2)}))
    with pytest.raises(ValueError):
        Digraph(3, frozenset({(1, 4)}))
    with pytest.raises(ValueError):
        Digraph(0)


def test_adjacency_convention():
    g = Digraph(3, frozenset({(1, 2)}))  # 1 influences 2
    chi = g.adjacency
    assert chi[1, 0] and chi.sum() == 1
    assert Digraph.from_adjacency(chi) == g


def test_all_digraphs_count():
    assert sum(1 for _ in all_digraphs(3)) == 64
    assert len(set(all_digraphs(2))) == 4


# ---------------------------------------------------------------- rootedness


def test_is_rooted_examples(leader_graphs):
    info = is_rooted(leader_graphs[1])
    assert info.rooted and info.roots == {1}
    assert not is_rooted(Digraph.empty(3)).rooted
    cyc = Digraph(3, frozenset({(1, 2), (2, 3), (3, 1)}))
    assert is_rooted(cyc) == (True, frozenset({1, 2, 3}))


def test_is_rooted_matches_closure_oracle():
    for g in small_digraphs(4):
        reach = closure_oracle(g)
        expected = frozenset(v + 1 for v in range(g.n) if reach[v].all())
        assert is_rooted(g).roots == expected, g


def test_rooted_leadership_examples(leader_graphs):
    assert is_rooted_leadership(leader_graphs[1])[:2] == (True, 1)
    two_cycle = Digraph(2, frozenset({(1, 2), (2, 1)}))
    assert not is_rooted_leadership(two_cycle).valid
    chain = Digraph(3, frozenset({(1, 2), (2, 3)}))
    assert is_rooted_leadership(chain)[:2] == (True, 1)


def test_single_vertex_is_its_own_leader():
    assert is_rooted_leadership(Digraph(1))[:2] == (True, 1)


def test_leadership_readings_agree():
    # "no incoming path from others" vs "no incoming arc": equivalent for a vertex
    # that must also reach everyone, since any path into r ends with an arc into r
    for g in small_digraphs(4):
        roots = is_rooted(g).roots
        arc_reading = [r for r in roots if not any(i == r for _, i in g.arcs)]
        reach = closure_oracle(g)
        path_reading = [
            r for r in roots if not any(reach[u, r - 1] for u in range(g.n) if u != r - 1)
        ]
        assert sorted(arc_reading) == sorted(path_reading)
        info = is_rooted_leadership(g)
        if len(path_reading) == 1:
            assert info.valid and info.leader == path_reading[0]
        else:
            assert not info.valid and info.leader is None


def test_strongly_rooted_examples(leader_graphs):
    assert is_strongly_rooted(leader_graphs[1]) == (True, frozenset({1}))
    chain = Digraph(3, frozenset({(1, 2), (2, 3)}))
    assert not is_strongly_rooted(chain).strongly_rooted
    assert is_strongly_rooted(Digraph.complete(4)).strong_roots == {1, 2, 3, 4}


def test_strong_roots_are_roots():
    for g in small_digraphs(4):
        assert is_strongly_rooted(g).strong_roots <= is_rooted(g).roots


# ---------------------------------------------------------------- composition


def compose_oracle(gq, gp):
    return {
        (i, j)
        for i in range(1, gp.n + 1)
        for j in range(1, gp.n + 1)
        for k in range(1, gp.n + 1)
        if i != j and (i, k) in gp.arcs and (k, j) in gq.arcs
    }


def test_compose_examples():
    gp = Digraph(3, frozenset({(1, 2)}))
    gq = Digraph(3, frozenset({(2, 3)}))
    assert (1, 3) in compose(gq, gp).arcs
    k3 = Digraph.complete(3)
    assert compose(k3, k3) == k3
    assert compose(Digraph(3, frozenset({(3, 1)})), gp).arcs == frozenset()


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionError):
        compose(Digraph(2), Digraph(3))
    with pytest.raises(DimensionError):
        compose_with_self_loops(Digraph(2), Digraph(3))


def test_compose_matches_definition_exhaustively_n3():
    graphs = list(all_digraphs(3))
    for gq, gp in itertools.product(graphs, graphs):
        assert compose(gq, gp).arcs == compose_oracle(gq, gp)


def test_relational_composition_associative_all_n_le_3():
    for n in (1, 2, 3):
        graphs = [g.arcs for g in all_digraphs(n)]
        pairs = {}
        for g2, g1 in itertools.product(graphs, repeat=2):
            pairs[g2, g1] = compose_arcs(g2, g1)
        for g1, g2, g3 in itertools.product(graphs, repeat=3):
            assert compose_arcs(pairs[g3, g2], g1) == compose_arcs(g3, pairs[g2, g1])


def test_dropping_self_pairs_breaks_associativity():
    g1 = Digraph(3, frozenset({(1, 2)}))
    g2 = Digraph(3, frozenset({(2, 1)}))
    g3 = Digraph(3, frozenset({(1, 3)}))
    assert compose(compose(g3, g2), g1).arcs == {(1, 3)}
    assert compose(g3, compose(g2, g1)).arcs == frozenset()
    # the relational composition keeps (1, 1) and agrees on both sides
    left = compose_arcs(compose_arcs(g3.arcs, g2.arcs), g1.arcs)
    right = compose_arcs(g3.arcs, compose_arcs(g2.arcs, g1.arcs))
    assert left == right == {(1, 3)}


def test_compose_is_relation_without_self_pairs():
    graphs = list(all_digraphs(3))
    for gq, gp in itertools.product(graphs, repeat=2):
        rel = compose_arcs(gq.arcs, gp.arcs)
        assert compose(gq, gp).arcs == {(i, j) for i, j in rel if i != j}


def test_compose_with_self_loops_is_flocking_product_support():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(2, 6))
        gp = Digraph.from_adjacency(rng.random((n, n)) < 0.3)
        gq = Digraph.from_adjacency(rng.random((n, n)) < 0.3)
        Fp = 0.1 * gp.adjacency + np.eye(n)
        Fq = 0.1 * gq.adjacency + np.eye(n)
        assert compose_with_self_loops(gq, gp) == Digraph.from_adjacency(Fq @ Fp > 0)


def _strong_roots_by_paths(graphs):
    """Vertices j that reach every i through one step (stay or arc) per graph, in time order."""
    n = graphs[0].n
    strong = set()
    for j in range(1, n + 1):
        frontier = {j}
        for g in graphs:
            frontier = frontier | {i for (k, i) in g.arcs if k in frontier}
        if len(frontier) == n:
            strong.add(j)
    return strong


def test_literal_composition_loses_strong_rootedness(leader_graphs):
    g1 = leader_graphs[1]
    assert compose_sequence([g1] * 4, self_loops=False).arcs == frozenset()
    assert is_strongly_rooted(compose_sequence([g1] * 4)).strong_roots == {1}


def test_block_composition_strongly_rooted_exhaustive_n3():
    # every sequence of 4 rooted graphs on 3 vertices; distinct partial compositions
    # are tracked as boolean supports so the whole sequence space is covered
    rooted = [g for g in all_digraphs(3) if is_rooted(g).rooted]
    eye = np.eye(3, dtype=bool)
    supports = {tuple(map(tuple, eye))}
    for _ in range(4):
        nxt = set()
        for s in supports:
            S = np.array(s)
            for g in rooted:
                A = g.adjacency | eye
                nxt.add(tuple(map(tuple, (A.astype(int) @ S.astype(int)) > 0)))
        supports = nxt
    for s in supports:
        S = np.array(s)
        assert S.all(axis=0).any(), S


def test_block_composition_strongly_rooted_n2_exhaustive_and_n4_random():
    rooted2 = [g for g in all_digraphs(2) if is_rooted(g).rooted]
    for g in rooted2:
        assert is_strongly_rooted(g).strongly_rooted
    rooted4 = [g for g in all_digraphs(4) if is_rooted(g).rooted]
    rng = np.random.default_rng(7)
    for _ in range(300):
        seq = [rooted4[int(k)] for k in rng.integers(len(rooted4), size=9)]
        comp = compose_sequence(seq)
        info = is_strongly_rooted(comp)
        assert info.strongly_rooted
        assert info.strong_roots == _strong_roots_by_paths(seq)


# ---------------------------------------------------------------- signals


def test_signal_at_rotating(rotating_signal, leader_graphs):
    assert signal_at(rotating_signal, 0) == leader_graphs[1]
    assert signal_at(rotating_signal, 1) == leader_graphs[2]
    assert signal_at(rotating_signal, 5) == leader_graphs[3]


def test_constant_signal(leader_graphs):
    sig = constant_signal(leader_graphs[2])
    assert all(signal_at(sig, t) == leader_graphs[2] for t in (0, 1, 17, 1000))


def test_dwell_schedule(leader_graphs):
    sig = SwitchingSignal(leader_graphs, CyclicSchedule((1, 2, 3), 5))
    assert signal_at(sig, 7) == leader_graphs[2]
    assert sig.index_at(14) == 3 and sig.index_at(15) == 1


def test_explicit_schedule_holds_last(leader_graphs):
    sig = SwitchingSignal(leader_graphs, ExplicitSchedule(((0, 1), (3, 3), (10, 2))))
    assert [sig.index_at(t) for t in (0, 2, 3, 9, 10, 10**6)] == [1, 1, 3, 3, 2, 2]
    with pytest.raises(ValueError):
        ExplicitSchedule(((1, 1),))


def test_signal_validation(leader_graphs):
    with pytest.raises(KeyError):
        SwitchingSignal(leader_graphs, CyclicSchedule((1, 4), 1))
    with pytest.raises(DimensionError):
        SwitchingSignal({1: Digraph(2), 2: Digraph(3)}, CyclicSchedule((1, 2)))
    with pytest.raises(ValueError):
        CyclicSchedule((1,), 0)
    with pytest.raises(ValueError):
        signal_at(constant_signal(Digraph(2)), -1)


def test_random_rooted_leadership_generator():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        leader = int(rng.integers(1, n + 1))
        info = is_rooted_leadership(random_rooted_leadership(n, leader, rng))
        assert info.valid and info.leader == leader


def test_random_alternating_signal_changes_leader():
    rng = np.random.default_rng(5)
    sig = random_alternating_signal(4, 200, rng)
    leaders = {is_rooted_leadership(sig(t)).leader for t in range(200)}
    assert len(leaders) > 1
    assert all(is_rooted_leadership(g).valid for g in sig.graphs.values())
