"""Layered ansatz builders and swap-network embedding.

Entangling layers follow an edge colouring of the connectivity graph: one
matching per sub-layer, one entangler per edge. The CRy-HEA entangler on an
edge ``(u, v)`` is ``RY(u) RY(v) CRY(u -> v)``; the excitation entangler on
molecular orbitals ``a, b`` is ``DE`` then ``SE`` on qubits
``(2a, 2a+1, 2b, 2b+1)``.
"""

from __future__ import annotations

from typing import Literal, Sequence

from .circuit import Circuit, CircuitBuilder, CircuitError
from .graph import ConnectivityGraph, Edge, permute_labels, validate_layer
from .router import SwapProtocol

Flavor = Literal["qubit", "fermionic"]

_BACKTRACK_BUDGET = 200_000


def edge_color(g: ConnectivityGraph) -> list[tuple[Edge, ...]]:
    """Partition the edges into matchings.

    Greedy first-fit in sorted edge order; if that needs more than the
    maximum degree, an exact max-degree colouring is searched for within a
    node budget, and Misra-Gries (at most max degree + 1) is the fallback.
    """
    if not g.edges:
        return []
    delta = g.max_degree
    colors = _greedy_colors(g)
    if max(colors.values()) + 1 > delta:
        colors = _exact_colors(g, delta) or _misra_gries(g)
    n_colors = max(colors.values()) + 1
    groups: list[list[Edge]] = [[] for _ in range(n_colors)]
    for e, c in colors.items():
        groups[c].append(e)
    return [tuple(sorted(m)) for m in groups if m]


def _greedy_colors(g: ConnectivityGraph) -> dict[Edge, int]:
    at: list[set[int]] = [set() for _ in range(g.n)]
    colors = {}
    for u, v in g.edges:
        c = 0
        while c in at[u] or c in at[v]:
            c += 1
        colors[(u, v)] = c
        at[u].add(c)
        at[v].add(c)
    return colors


def _exact_colors(g: ConnectivityGraph, n_colors: int) -> dict[Edge, int] | None:
    edges = list(g.edges)
    at: list[set[int]] = [set() for _ in range(g.n)]
    colors: dict[Edge, int] = {}
    budget = [_BACKTRACK_BUDGET]

    def search(i: int) -> bool:
        if i == len(edges):
            return True
        budget[0] -= 1
        if budget[0] < 0:
            return False
        u, v = edges[i]
        for c in range(n_colors):
            if c in at[u] or c in at[v]:
                continue
            colors[(u, v)] = c
            at[u].add(c)
            at[v].add(c)
            if search(i + 1):
                return True
            at[u].discard(c)
            at[v].discard(c)
            del colors[(u, v)]
        return False

    return dict(colors) if search(0) else None


def _misra_gries(g: ConnectivityGraph) -> dict[Edge, int]:
    palette = range(g.max_degree + 1)
    col: dict[frozenset, int] = {}
    at: list[dict[int, int]] = [dict() for _ in range(g.n)]  # vertex -> {color: neighbour}

    def free(x, c):
        return c not in at[x]

    def set_color(x, y, c):
        old = col.get(frozenset((x, y)))
        if old is not None:
            del at[x][old]
            del at[y][old]
        col[frozenset((x, y))] = c
        at[x][c] = y
        at[y][c] = x

    def first_free(x):
        return next(c for c in palette if free(x, c))

    for u, v in g.edges:
        fan = [v]
        while True:
            last = fan[-1]
            ext = next(
                (w for w in g.neighbors[u]
                 if w not in fan and frozenset((u, w)) in col and free(last, col[frozenset((u, w))])),
                None,
            )
            if ext is None:
                break
            fan.append(ext)
        c = first_free(u)
        d = first_free(fan[-1])
        # invert the c/d alternating path that starts at u with colour d
        path = []
        x, want = u, d
        while want in at[x]:
            y = at[x][want]
            path.append((x, y, want))
            x, want = y, (c if want == d else d)
        for x, y, cc in path:
            del at[x][cc]
            del at[y][cc]
        for x, y, cc in path:
            nc = c if cc == d else d
            col[frozenset((x, y))] = nc
            at[x][nc] = y
            at[y][nc] = x
        # shortest fan prefix whose tip has d free
        for idx, w in enumerate(fan):
            if free(w, d) and all(
                free(fan[i], col[frozenset((u, fan[i + 1]))]) for i in range(idx)
            ):
                break
        shifted = [col[frozenset((u, fan[i + 1]))] for i in range(idx)] + [d]
        for w in fan[: idx + 1]:
            old = col.pop(frozenset((u, w)), None)
            if old is not None:
                del at[u][old]
                del at[w][old]
        for w, cc in zip(fan, shifted):
            set_color(u, w, cc)
    return {tuple(sorted(e)): c for e, c in col.items()}


def _hea_layer(b: CircuitBuilder, colouring) -> None:
    for matching in colouring:
        for u, v in matching:
            b.add("RY", u)
            b.add("RY", v)
            b.add("CRY", u, v)


def _excitation_layer(b: CircuitBuilder, colouring) -> None:
    for matching in colouring:
        for a, c in matching:
            qs = (2 * a, 2 * a + 1, 2 * c, 2 * c + 1)
            b.add("DE", *qs)
            b.add("SE", *qs)


def build_cry_hea(g: ConnectivityGraph, layers: int) -> Circuit:
    if layers < 0:
        raise CircuitError("layers must be >= 0")
    b = CircuitBuilder(g.n)
    colouring = edge_color(g)
    for _ in range(layers):
        _hea_layer(b, colouring)
    return b.build()


def build_excitation_ansatz(g_mo: ConnectivityGraph, layers: int, reference: Sequence[int] = ()) -> Circuit:
    """Excitation-based ansatz on ``2 * g_mo.n`` qubits.

    ``reference`` lists qubits flipped by X before the first layer, e.g. the
    occupied spin-orbitals of a Hartree-Fock determinant.
    """
    if layers < 0:
        raise CircuitError("layers must be >= 0")
    b = CircuitBuilder(2 * g_mo.n)
    for q in reference:
        b.add("X", q)
    colouring = edge_color(g_mo)
    for _ in range(layers):
        _excitation_layer(b, colouring)
    return b.build()


def embed_swap_network(
    g: ConnectivityGraph,
    protocol: SwapProtocol,
    layers_per_slot: int = 1,
    repetitions: int = 1,
    flavor: Flavor = "qubit",
    reference: Sequence[int] = (),
) -> Circuit:
    """Interleave entangling slots with the protocol's swap blocks.

    Pattern per repetition: slot, block, slot, block, ..., slot. Qubit
    flavour swaps with SWAP on the qubit graph; fermionic flavour treats
    ``g`` as the molecular-orbital graph and swaps orbitals with OSWAP.
    """
    if flavor not in ("qubit", "fermionic"):
        raise CircuitError(f"unknown flavor {flavor!r}")
    if protocol.n != g.n:
        raise CircuitError(
            f"protocol built for {protocol.n} nodes but {flavor} graph has {g.n}; flavor/protocol mismatch"
        )
    if layers_per_slot < 0 or repetitions < 0:
        raise CircuitError("layers_per_slot and repetitions must be >= 0")
    try:
        blocks = [[validate_layer(g, layer) for layer in block] for block in protocol.blocks]
    except ValueError as exc:
        raise CircuitError(f"flavor/protocol mismatch: {exc}") from None

    fermionic = flavor == "fermionic"
    b = CircuitBuilder(2 * g.n if fermionic else g.n)
    if fermionic:
        for q in reference:
            b.add("X", q)
    elif reference:
        raise CircuitError("reference occupation only applies to the fermionic flavor")
    colouring = edge_color(g)
    layer_fn = _excitation_layer if fermionic else _hea_layer

    def slot():
        for _ in range(layers_per_slot):
            layer_fn(b, colouring)

    for _ in range(repetitions):
        for block in blocks:
            slot()
            for layer in block:
                for u, v in layer:
                    if fermionic:
                        b.add("OSWAP", 2 * u, 2 * u + 1, 2 * v, 2 * v + 1)
                    else:
                        b.add("SWAP", u, v)
        slot()
    return b.build()


def final_labels(g: ConnectivityGraph, protocol: SwapProtocol, repetitions: int = 1) -> tuple[int, ...]:
    """Labelling after ``repetitions`` passes of the protocol."""
    lab = protocol.initial_labels
    for _ in range(repetitions):
        lab = permute_labels(lab, protocol.layers)
    return lab
