"""Swap-network synthesis by simulated annealing over swap-relabelling blocks.

Each outer step searches for a block of at most ``k`` swap layers that
minimises ``sum_{i<j} H_ij * d_ij**2`` on the relabelled graph with the
history already updated for the new adjacencies. Blocks are appended until
every label pair has been adjacent once.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field, replace
from itertools import count

import numpy as np

from .graph import (
    ConnectivityGraph,
    SwapBlock,
    SwapLayer,
    init_history,
    permute_labels,
    update_history,
    validate_layer,
)


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class AnnealConfig:
    k: int = 2
    steps: int | None = None  # None -> 2000 * k
    t0: float | None = None  # None -> mean |dC| over 50 probe moves
    alpha: float = 0.995
    p_add: float = 0.5
    restarts: int = 4
    seed: int = 0
    max_blocks: int | None = None
    exponent: float = 2

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.steps is not None and self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.t0 is not None and self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.p_add < 1:
            raise ValueError("p_add must lie in (0, 1)")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.max_blocks is not None and self.max_blocks < 0:
            raise ValueError("max_blocks must be non-negative")

    @property
    def n_steps(self) -> int:
        return self.steps if self.steps is not None else 2000 * self.k


def _as_number(x: float) -> int | float:
    return int(round(x)) if float(x).is_integer() else float(x)


def cost(g: ConnectivityGraph, h: np.ndarray, exponent: float = 2) -> int | float:
    """Sum over unordered label pairs of ``H_ij * d_ij**exponent``."""
    h = np.asarray(h)
    if h.shape != (g.n, g.n):
        raise RoutingError(f"history shape {h.shape} does not match n={g.n}")
    pos = np.asarray(g.positions)
    d = g.vertex_distances[np.ix_(pos, pos)].astype(float)
    total = np.triu(h * d**exponent, 1).sum()
    return _as_number(total)


class _Scorer:
    """Vectorised cost of a candidate block relative to fixed (g, h)."""

    def __init__(self, g: ConnectivityGraph, h: np.ndarray, exponent: float):
        self.g = g
        self.h = np.asarray(h, dtype=float)
        w = g.vertex_distances.astype(float) ** exponent
        w[g.adjacency] = 0.0
        self.w = np.triu(w, 1)

    def labels_after(self, block) -> tuple[int, ...]:
        return permute_labels(self.g.labels, block)

    def __call__(self, block) -> float:
        lab = np.asarray(self.labels_after(block))
        return float((self.h[np.ix_(lab, lab)] * self.w).sum())


def _n_swaps(block) -> int:
    return sum(len(layer) for layer in block)


def empty_block(k: int) -> SwapBlock:
    return tuple(() for _ in range(k))


def propose_move(block: SwapBlock, g: ConnectivityGraph, cfg: AnnealConfig, rng: np.random.Generator) -> SwapBlock:
    """Add or remove one swap in a uniformly chosen layer.

    Add candidates are edges sharing no vertex with the layer's swaps. When
    the chosen branch is impossible the other one is taken; with neither
    possible the block is returned unchanged.
    """
    if len(block) != cfg.k:
        raise RoutingError(f"block has {len(block)} layers, expected {cfg.k}")
    li = int(rng.integers(cfg.k))
    layer = block[li]
    want_add = rng.random() < cfg.p_add

    def candidates():
        used = {x for e in layer for x in e}
        return [e for e in g.edges if e[0] not in used and e[1] not in used]

    new_layer: SwapLayer | None = None
    if want_add:
        cands = candidates()
        if cands:
            new_layer = tuple(sorted(layer + (cands[int(rng.integers(len(cands)))],)))
        elif layer:
            drop = int(rng.integers(len(layer)))
            new_layer = layer[:drop] + layer[drop + 1:]
    else:
        if layer:
            drop = int(rng.integers(len(layer)))
            new_layer = layer[:drop] + layer[drop + 1:]
        else:
            cands = candidates()
            if cands:
                new_layer = (cands[int(rng.integers(len(cands)))],)
    if new_layer is None:
        return block
    return block[:li] + (new_layer,) + block[li + 1:]


def _probe_temperature(g, score, cfg: AnnealConfig, n_probe: int = 50) -> float:
    rng = np.random.default_rng([cfg.seed, 1])
    block = empty_block(cfg.k)
    c = score(block)
    deltas = []
    for _ in range(n_probe):
        cand = propose_move(block, g, cfg, rng)
        cc = score(cand)
        deltas.append(abs(cc - c))
        block, c = cand, cc
    t0 = float(np.mean(deltas)) if deltas else 0.0
    return t0 if t0 > 0 else 1.0


def anneal_block(g: ConnectivityGraph, h: np.ndarray, cfg: AnnealConfig):
    """Metropolis search for the best depth-``k`` block from the empty block.

    Returns ``(block, new_graph, new_history, cost)``. Chains are seeded
    ``cfg.seed + restart``; ties keep the block with fewer swaps, then the
    first one seen.
    """
    if not np.asarray(h).any():
        raise RoutingError("nothing to route")
    score = _Scorer(g, h, cfg.exponent)
    t0 = cfg.t0 if cfg.t0 is not None else _probe_temperature(g, score, cfg)

    best = empty_block(cfg.k)
    empty_cost = score(best)
    best_key = (empty_cost, 0)
    for r in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + r)
        cur, cur_cost = empty_block(cfg.k), empty_cost
        temp = t0
        for _ in range(cfg.n_steps):
            cand = propose_move(cur, g, cfg, rng)
            c = score(cand)
            key = (c, _n_swaps(cand))
            if key < best_key:
                best, best_key = cand, key
            dc = c - cur_cost
            if dc <= 0 or rng.random() < math.exp(-dc / temp):
                cur, cur_cost = cand, c
            temp *= cfg.alpha

    new_g = g.relabel(score.labels_after(best))
    new_h = update_history(h, new_g)
    return best, new_g, new_h, _as_number(best_key[0])


@dataclass(frozen=True)
class SwapProtocol:
    """An optimised swap network: blocks of swap layers plus traces."""

    n: int
    k: int
    seed: int
    initial_labels: tuple[int, ...]
    blocks: tuple[SwapBlock, ...] = ()
    labelling_trace: tuple[tuple[int, ...], ...] = ()
    cost_trace: tuple[int | float, ...] = ()
    initial_cost: int | float = 0
    complete: bool = True
    fallback_blocks: tuple[int, ...] = field(default=(), compare=False)

    @property
    def layers(self) -> list[SwapLayer]:
        return [layer for block in self.blocks for layer in block]

    @property
    def total_layers(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def total_swaps(self) -> int:
        return sum(_n_swaps(b) for b in self.blocks)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "complete": self.complete,
            "initial_cost": self.initial_cost,
            "cost_trace": list(self.cost_trace),
            "initial_labels": [x + 1 for x in self.initial_labels],
            "blocks": [[[[u + 1, v + 1] for u, v in layer] for layer in block] for block in self.blocks],
            "labelling_trace": [[x + 1 for x in lab] for lab in self.labelling_trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "SwapProtocol":
        blocks = tuple(
            tuple(tuple((u - 1, v - 1) for u, v in layer) for layer in block) for block in d["blocks"]
        )
        return cls(
            n=d["n"],
            k=d["k"],
            seed=d["seed"],
            initial_labels=tuple(x - 1 for x in d["initial_labels"]),
            blocks=blocks,
            labelling_trace=tuple(tuple(x - 1 for x in lab) for lab in d["labelling_trace"]),
            cost_trace=tuple(d["cost_trace"]),
            initial_cost=d["initial_cost"],
            complete=d["complete"],
        )

    @classmethod
    def from_json(cls, text: str) -> "SwapProtocol":
        return cls.from_dict(json.loads(text))


def replay(g: ConnectivityGraph, protocol: SwapProtocol):
    """Re-apply a protocol from its initial labelling.

    Returns ``(labelling_trace, final_history)`` with history updated at
    block boundaries only.
    """
    if protocol.n != g.n:
        raise RoutingError(f"protocol is for n={protocol.n}, graph has n={g.n}")
    cur = g.relabel(protocol.initial_labels)
    h = init_history(cur)
    trace = []
    for block in protocol.blocks:
        layers = [validate_layer(g, layer) for layer in block]
        cur = cur.relabel(permute_labels(cur.labels, layers))
        h = update_history(h, cur)
        trace.append(cur.labels)
    return tuple(trace), h


def _prune(block: SwapBlock) -> SwapBlock:
    return tuple(layer for layer in block if layer)


def _forced_block(g: ConnectivityGraph, pair: tuple[int, int], k: int) -> SwapBlock:
    """Walk label ``pair[0]`` toward ``pair[1]`` along a shortest path."""
    path = g.shortest_path(g.positions[pair[0]], g.positions[pair[1]])
    hops = min(k, len(path) - 2)
    return tuple(((min(path[i], path[i + 1]), max(path[i], path[i + 1])),) for i in range(hops))


def optimize_network(g: ConnectivityGraph, cfg: AnnealConfig) -> SwapProtocol:
    """Append annealed blocks until the history is all zero or ``max_blocks``.

    If a block brings no progress (no new adjacency and no cost decrease) the
    loop switches to deterministic shortest-path moves for the closest
    unvisited pair until that pair becomes adjacent, which bounds the run.
    """
    h = init_history(g)
    cur = g
    c_prev = cost(cur, h, cfg.exponent)
    blocks, labs, costs, forced = [], [], [], []
    target: tuple[int, int] | None = None
    t = 0
    while h.any():
        if cfg.max_blocks is not None and t >= cfg.max_blocks:
            break
        if target is None:
            block_cfg = replace(cfg, seed=cfg.seed + t * cfg.restarts)
            block, new_g, new_h, c = anneal_block(cur, h, block_cfg)
            if not (new_h != h).any() and c >= c_prev:
                target = _closest_unvisited(cur, h)
        if target is not None:
            block = _forced_block(cur, target, cfg.k)
            new_g = cur.relabel(permute_labels(cur.labels, block))
            new_h = update_history(h, new_g)
            c = cost(new_g, new_h, cfg.exponent)
            forced.append(t)
            if new_h[target] == 0:
                target = None
        blocks.append(_prune(block))
        labs.append(new_g.labels)
        costs.append(c)
        cur, h, c_prev = new_g, new_h, c
        t += 1
    return SwapProtocol(
        n=g.n,
        k=cfg.k,
        seed=cfg.seed,
        initial_labels=g.labels,
        blocks=tuple(blocks),
        labelling_trace=tuple(labs),
        cost_trace=tuple(costs),
        initial_cost=cost(g, init_history(g), cfg.exponent),
        complete=not h.any(),
        fallback_blocks=tuple(forced),
    )


def _closest_unvisited(g: ConnectivityGraph, h: np.ndarray) -> tuple[int, int]:
    d = g.vertex_distances
    pos = g.positions
    best = None
    for i, j in zip(*np.nonzero(np.triu(h, 1))):
        key = (int(d[pos[i], pos[j]]), int(i), int(j))
        if best is None or key < best:
            best = key
    return best[1], best[2]


def matchings(g: ConnectivityGraph) -> list[SwapLayer]:
    """All non-empty matchings of ``g`` in a deterministic order."""
    out: list[SwapLayer] = []

    def grow(start: int, used: frozenset, cur: tuple):
        for idx in range(start, len(g.edges)):
            u, v = g.edges[idx]
            if u in used or v in used:
                continue
            nxt = cur + ((u, v),)
            out.append(nxt)
            grow(idx + 1, used | {u, v}, nxt)

    grow(0, frozenset(), ())
    return out


def _history_bits(g: ConnectivityGraph, h: np.ndarray) -> int:
    bits = 0
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if h[i, j]:
                bits |= 1 << (i * g.n + j)
    return bits


def _clear_adjacent(g: ConnectivityGraph, labels, bits: int) -> int:
    n = g.n
    for u, v in g.edges:
        a, b = labels[u], labels[v]
        if a > b:
            a, b = b, a
        bits &= ~(1 << (a * n + b))
    return bits


def brute_force_network(g: ConnectivityGraph, k: int, max_layers: int) -> SwapProtocol | None:
    """Minimum-total-layer complete protocol by uniform-cost search.

    Blocks hold 1..k non-empty layers and the history is updated only at
    block boundaries, mirroring :func:`optimize_network`. Returns ``None``
    when no complete protocol exists within ``max_layers``.
    """
    if g.n > 6:
        raise RoutingError("brute force limited to n <= 6")
    mats = matchings(g)
    start_bits = _history_bits(g, init_history(g))
    start = (g.labels, start_bits)
    best = {start: 0}
    parent: dict = {start: None}
    tie = count()
    heap = [(0, next(tie), start)]
    goal = None
    while heap:
        layers_used, _, state = heapq.heappop(heap)
        if layers_used > best.get(state, math.inf):
            continue
        labels, bits = state
        if bits == 0:
            goal = state
            break
        # enumerate blocks of depth 1..k (non-empty layers only)
        frontier = [((), labels)]
        for depth in range(1, k + 1):
            nxt_frontier = []
            for seq, lab in frontier:
                for m in mats:
                    lab2 = permute_labels(lab, [m])
                    seq2 = seq + (m,)
                    nxt_frontier.append((seq2, lab2))
                    cost2 = layers_used + depth
                    if cost2 > max_layers:
                        continue
                    nstate = (lab2, _clear_adjacent(g, lab2, bits))
                    if cost2 < best.get(nstate, math.inf):
                        best[nstate] = cost2
                        parent[nstate] = (state, seq2)
                        heapq.heappush(heap, (cost2, next(tie), nstate))
            frontier = nxt_frontier
    if goal is None:
        return None
    blocks, labs = [], []
    node = goal
    while parent[node] is not None:
        prev, seq = parent[node]
        blocks.append(seq)
        labs.append(node[0])
        node = prev
    blocks.reverse()
    labs.reverse()
    hist = init_history(g)
    cur = g
    costs = []
    for lab in labs:
        cur = cur.relabel(lab)
        hist = update_history(hist, cur)
        costs.append(cost(cur, hist))
    return SwapProtocol(
        n=g.n,
        k=k,
        seed=0,
        initial_labels=g.labels,
        blocks=tuple(blocks),
        labelling_trace=tuple(labs),
        cost_trace=tuple(costs),
        initial_cost=cost(g, init_history(g)),
        complete=True,
    )
