import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapnet.graph import (
    ConnectivityGraph,
    complete_graph,
    grid_graph,
    init_history,
    line_graph,
    ring_graph,
    update_history,
)
from swapnet.router import (
    AnnealConfig,
    RoutingError,
    SwapProtocol,
    anneal_block,
    brute_force_network,
    cost,
    empty_block,
    matchings,
    optimize_network,
    propose_move,
    replay,
)

FAST = AnnealConfig(k=2, steps=300, restarts=2, seed=3)


def cost_oracle(g, h):
    """Pairwise loop over labels with networkx hop distances."""
    nxg = nx.Graph(list(g.edges))
    sp = dict(nx.all_pairs_shortest_path_length(nxg))
    pos = g.positions
    total = 0
    for i, j in itertools.combinations(range(g.n), 2):
        total += int(h[i, j]) * sp[pos[i]][pos[j]] ** 2
    return total


def test_cost_examples():
    assert cost(line_graph(3), init_history(line_graph(3))) == 4
    assert cost(line_graph(4), init_history(line_graph(4))) == 17
    g = ring_graph(5)
    assert cost(g, np.zeros((5, 5), dtype=np.uint8)) == 0


def test_cost_matches_oracle_on_grid():
    g = grid_graph(3, 3).relabel([4, 0, 8, 2, 6, 1, 3, 5, 7])
    h = init_history(grid_graph(3, 3))
    assert cost(g, h) == cost_oracle(g, h)


def test_cost_shape_mismatch():
    with pytest.raises(RoutingError):
        cost(line_graph(3), np.zeros((4, 4)))


def test_anneal_config_validation():
    for bad in (dict(k=0), dict(alpha=1.0), dict(p_add=0.0), dict(restarts=0), dict(steps=0)):
        with pytest.raises(ValueError):
            AnnealConfig(**bad)
    assert AnnealConfig(k=3).n_steps == 6000


def test_propose_remove_single_swap():
    cfg = AnnealConfig(k=1, p_add=1e-9)
    out = propose_move((((0, 1),),), line_graph(3), cfg, np.random.default_rng(0))
    assert out == ((),)


def test_propose_add_falls_back_to_removal():
    # (v1,v2),(v3,v4) is a perfect matching of the 4-path: nothing can be added
    cfg = AnnealConfig(k=1, p_add=1 - 1e-9)
    block = (((0, 1), (2, 3)),)
    out = propose_move(block, line_graph(4), cfg, np.random.default_rng(0))
    assert len(out[0]) == 1 and set(out[0]) < set(block[0])


def test_propose_golden():
    cfg = AnnealConfig(k=2, seed=7)
    rng = np.random.default_rng(7)
    b = empty_block(2)
    for _ in range(5):
        b = propose_move(b, line_graph(4), cfg, rng)
    assert b == (((2, 3),), ((0, 1), (2, 3)))


def test_propose_rejects_wrong_depth():
    with pytest.raises(RoutingError):
        propose_move(empty_block(1), line_graph(3), AnnealConfig(k=2), np.random.default_rng(0))


def test_anneal_path3():
    g = line_graph(3)
    block, new_g, new_h, c = anneal_block(g, init_history(g), AnnealConfig(k=1, steps=200, seed=1))
    assert block in ((((0, 1),),), (((1, 2),),))
    assert c == 0 and not new_h.any()


def test_anneal_single_far_pair():
    g = line_graph(3)
    h = np.zeros((3, 3), dtype=np.uint8)
    h[0, 2] = h[2, 0] = 1
    *_, c = anneal_block(g, h, AnnealConfig(k=2, steps=200, seed=0))
    assert c == 0


def test_anneal_nothing_to_route():
    g = line_graph(3)
    with pytest.raises(RoutingError, match="nothing to route"):
        anneal_block(g, np.zeros((3, 3), dtype=np.uint8), FAST)


def test_complete_graph_empty_protocol():
    for g in (complete_graph(5), line_graph(2)):
        p = optimize_network(g, FAST)
        assert p.blocks == () and p.complete


def test_path4_two_layers():
    p = optimize_network(line_graph(4), AnnealConfig(k=1, seed=0))
    assert p.complete and p.total_layers == 2
    assert p.cost_trace[-1] == 0 and p.initial_cost == 17


@pytest.mark.parametrize("n", [4, 5, 6])
def test_path_swap_bound(n):
    p = optimize_network(line_graph(n), AnnealConfig(k=1, seed=0))
    assert p.complete and p.total_swaps <= n * (n - 1) // 2


def test_partial_network():
    g = line_graph(7)
    p = optimize_network(g, AnnealConfig(k=1, seed=0, max_blocks=1))
    assert not p.complete and len(p.blocks) == 1
    _, h = replay(g, p)
    assert h.any()


def test_protocol_replay_and_roundtrip():
    g = ring_graph(6).relabel([2, 0, 1, 5, 4, 3])
    p = optimize_network(g, FAST)
    trace, h = replay(g, p)
    assert trace == p.labelling_trace and not h.any()
    q = SwapProtocol.from_json(p.to_json())
    assert q == p and q.to_json() == p.to_json()
    # cost trace entries are the costs of the accepted graph/history pairs
    cur, hist = g, init_history(g)
    for block, c in zip(p.blocks, p.cost_trace):
        for layer in block:
            lab = list(cur.labels)
            for u, v in layer:
                lab[u], lab[v] = lab[v], lab[u]
            cur = cur.relabel(lab)
        hist = update_history(hist, cur)
        assert cost(cur, hist) == c


def test_no_empty_layers_in_protocol():
    p = optimize_network(grid_graph(3, 3), AnnealConfig(k=3, seed=2, steps=1500))
    assert all(layer for block in p.blocks for layer in block)
    assert all(len(block) <= 3 for block in p.blocks)


def test_optimize_deterministic():
    g = grid_graph(2, 3)
    assert optimize_network(g, FAST).to_json() == optimize_network(g, FAST).to_json()


def test_brute_force_examples():
    assert brute_force_network(line_graph(3), 1, 5).total_layers == 1
    assert brute_force_network(line_graph(4), 1, 5).total_layers == 2
    assert brute_force_network(complete_graph(4), 2, 5).total_layers == 0
    assert brute_force_network(line_graph(5), 1, 1) is None


def test_brute_force_protocol_replays():
    g = ring_graph(5)
    p = brute_force_network(g, 2, 8)
    _, h = replay(g, p)
    assert p.complete and not h.any()


def test_matchings_count():
    # the 4-path has matchings {a}, {b}, {c}, {a, c}
    assert len(matchings(line_graph(4))) == 4


@st.composite
def graph_history(draw):
    n = draw(st.integers(3, 6))
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    g = ConnectivityGraph(n, sorted(edges), draw(st.permutations(range(n))))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    h = np.triu(np.array(bits, dtype=np.uint8).reshape(n, n), 1)
    return g, h + h.T


@settings(max_examples=50, deadline=None)
@given(graph_history(), st.permutations(range(6)))
def test_cost_oracle_and_equivariance(gh, perm):
    g, h = gh
    assert cost(g, h) == cost_oracle(g, h)
    # rename labels i -> p[i] in both the labelling and the history
    p = np.array([x for x in perm if x < g.n])
    g2 = g.relabel([int(p[x]) for x in g.labels])
    h2 = np.empty_like(h)
    h2[np.ix_(p, p)] = h
    assert cost(g2, h2) == cost(g, h)


@settings(max_examples=25, deadline=None)
@given(graph_history(), st.integers(0, 50))
def test_anneal_never_worse_than_empty(gh, seed):
    g, h = gh
    if not h.any():
        return
    cfg = AnnealConfig(k=2, steps=100, restarts=1, seed=seed)
    block, new_g, new_h, c = anneal_block(g, h, cfg)
    empty_cost = cost(g, update_history(h, g))
    assert c <= empty_cost
    assert c == cost(new_g, new_h)
