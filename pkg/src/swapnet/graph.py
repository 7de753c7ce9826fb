"""Labelled connectivity graphs and swap-relabelling bookkeeping.

Vertices and labels are 0-based inside the library. The text graph format
(``n``/``e``/``l`` lines) is 1-based; conversion happens only in
:func:`parse_graph` and :func:`format_graph`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]
SwapLayer = tuple[Edge, ...]
SwapBlock = tuple[SwapLayer, ...]


class GraphError(ValueError):
    """Raised for malformed graphs, layers or coarsening requests."""


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class ConnectivityGraph:
    """Fixed topology plus a label permutation.

    ``labels[v]`` is the label held by vertex ``v``. Edges are stored sorted
    with ``u < v``. Disconnected graphs are rejected at construction.
    """

    n: int
    edges: tuple[Edge, ...]
    labels: tuple[int, ...]

    def __init__(self, n: int, edges: Iterable[Sequence[int]], labels: Sequence[int] | None = None):
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            norm.append(_edge(u, v))
        if len(set(norm)) != len(norm):
            raise GraphError("duplicate edge")
        labels = tuple(range(n)) if labels is None else tuple(int(x) for x in labels)
        if sorted(labels) != list(range(n)):
            raise GraphError("labelling is not a permutation")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        object.__setattr__(self, "labels", labels)
        if not self._connected():
            raise GraphError("graph not connected")

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in self.neighbors[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return tuple(tuple(sorted(x)) for x in nb)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        a.flags.writeable = False
        return a

    @cached_property
    def vertex_distances(self) -> np.ndarray:
        """BFS hop distances between vertices (topology only)."""
        d = np.full((self.n, self.n), -1, dtype=np.int64)
        for s in range(self.n):
            d[s, s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.neighbors[u]:
                    if d[s, w] < 0:
                        d[s, w] = d[s, u] + 1
                        queue.append(w)
        d.flags.writeable = False
        return d

    @cached_property
    def positions(self) -> tuple[int, ...]:
        """Inverse labelling: ``positions[label]`` is the vertex holding it."""
        pos = [0] * self.n
        for v, lab in enumerate(self.labels):
            pos[lab] = v
        return tuple(pos)

    @property
    def max_degree(self) -> int:
        return max((len(x) for x in self.neighbors), default=0)

    def relabel(self, labels: Sequence[int]) -> "ConnectivityGraph":
        return ConnectivityGraph(self.n, self.edges, labels)

    def shortest_path(self, src: int, dst: int) -> list[int]:
        """Vertex path from ``src`` to ``dst``, lowest-index neighbours first."""
        parent = {src: src}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if u == dst:
                break
            for w in self.neighbors[u]:
                if w not in parent:
                    parent[w] = u
                    queue.append(w)
        path = [dst]
        while path[-1] != src:
            path.append(parent[path[-1]])
        return path[::-1]


def all_pairs_distances(g: ConnectivityGraph) -> np.ndarray:
    """Label-level distance matrix: entry (i, j) is the hop count between the
    vertices currently holding labels i and j."""
    vd = g.vertex_distances
    if (vd < 0).any():
        raise GraphError("graph not connected")
    pos = np.asarray(g.positions)
    return vd[np.ix_(pos, pos)].copy()


def validate_layer(g: ConnectivityGraph, layer: Iterable[Sequence[int]]) -> SwapLayer:
    """Normalise a swap layer and check it is a matching of ``g``."""
    used: set[int] = set()
    out = []
    for pair in layer:
        e = _edge(int(pair[0]), int(pair[1]))
        if e not in g.edge_set:
            raise GraphError(f"swap {e} is not an edge")
        if e[0] in used or e[1] in used:
            raise GraphError(f"vertex repeated in swap layer at {e}")
        used.update(e)
        out.append(e)
    return tuple(sorted(out))


def permute_labels(labels: Sequence[int], layers: Iterable[Iterable[Edge]]) -> tuple[int, ...]:
    lab = list(labels)
    for layer in layers:
        for u, v in layer:
            lab[u], lab[v] = lab[v], lab[u]
    return tuple(lab)


def apply_swap_layer(g: ConnectivityGraph, layer: Iterable[Sequence[int]]) -> ConnectivityGraph:
    layer = validate_layer(g, layer)
    return g.relabel(permute_labels(g.labels, [layer]))


def apply_swap_block(g: ConnectivityGraph, block: Iterable[Iterable[Sequence[int]]]) -> ConnectivityGraph:
    layers = [validate_layer(g, layer) for layer in block]
    return g.relabel(permute_labels(g.labels, layers))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def init_history(g: ConnectivityGraph) -> np.ndarray:
    """Ones for label pairs that are not (yet) adjacent, zeros elsewhere."""
    h = np.ones((g.n, g.n), dtype=np.uint8)
    np.fill_diagonal(h, 0)
    return update_history(h, g)


def update_history(h: np.ndarray, g: ConnectivityGraph) -> np.ndarray:
    """Clear the entries of every label pair that sits on an edge of ``g``."""
    h = np.array(h, dtype=np.uint8)
    if h.shape != (g.n, g.n):
        raise GraphError(f"history shape {h.shape} does not match n={g.n}")
    lab = g.labels
    for u, v in g.edges:
        h[lab[u], lab[v]] = 0
        h[lab[v], lab[u]] = 0
    return _frozen(h)


def coarsen(g: ConnectivityGraph, pairs: Sequence[Sequence[int]]) -> ConnectivityGraph:
    """Merge each vertex pair into one node (spin-orbitals -> molecular orbital).

    Coarse node ``i`` corresponds to ``pairs[i]``; the coarse graph gets the
    identity labelling.
    """
    owner = [-1] * g.n
    for idx, pair in enumerate(pairs):
        if len(pair) != 2:
            raise GraphError(f"pair {idx} does not have two vertices")
        u, v = int(pair[0]), int(pair[1])
        if _edge(u, v) not in g.edge_set:
            raise GraphError(f"pair ({u}, {v}) is not an edge")
        for x in (u, v):
            if owner[x] != -1:
                raise GraphError(f"vertex {x} appears in two pairs")
            owner[x] = idx
    if -1 in owner:
        raise GraphError("pairs do not cover every vertex")
    coarse = {_edge(owner[u], owner[v]) for u, v in g.edges if owner[u] != owner[v]}
    return ConnectivityGraph(len(pairs), sorted(coarse))


def parse_graph(text: str) -> ConnectivityGraph:
    n = None
    edges = []
    label_over: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "n" and len(tok) == 2:
                n = int(tok[1])
            elif tok[0] == "e" and len(tok) == 3:
                edges.append((int(tok[1]) - 1, int(tok[2]) - 1))
            elif tok[0] == "l" and len(tok) == 3:
                label_over[int(tok[1]) - 1] = int(tok[2]) - 1
            else:
                raise GraphError(f"line {lineno}: cannot parse {raw!r}")
        except ValueError as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"line {lineno}: {exc}") from None
    if n is None:
        raise GraphError("missing 'n <count>' line")
    labels = list(range(n))
    for v, lab in label_over.items():
        if not 0 <= v < n:
            raise GraphError(f"label line for vertex {v + 1} out of range")
        labels[v] = lab
    return ConnectivityGraph(n, edges, labels)


def load_graph(path: str | Path) -> ConnectivityGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(g: ConnectivityGraph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges]
    lines += [f"l {v + 1} {lab + 1}" for v, lab in enumerate(g.labels) if v != lab]
    return "\n".join(lines) + "\n"


def line_graph(n: int) -> ConnectivityGraph:
    return ConnectivityGraph(n, [(i, i + 1) for i in range(n - 1)])


def ring_graph(n: int) -> ConnectivityGraph:
    if n < 3:
        return line_graph(n)
    return ConnectivityGraph(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(rows: int, cols: int) -> ConnectivityGraph:
    """Row-major square lattice patch."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return ConnectivityGraph(rows * cols, edges)


def complete_graph(n: int) -> ConnectivityGraph:
    return ConnectivityGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
