"""Gate-level circuit IR, decomposition to native gates, and resource metrics.

Two-qubit gates list operands as ``(control, target)``. ``MCRY`` (only
produced by decomposing ``DE``) lists its controls first and the target
last. Four-qubit gates act on ``(p_alpha, p_beta, q_alpha, q_beta)``.

A parametrized gate's angle is ``scale * params[param]``; builders always
emit ``scale == 1`` and decomposition introduces the fractional scales.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

ARITY = {
    "RY": 1, "H": 1, "X": 1,
    "CNOT": 2, "CZ": 2, "CRY": 2, "SWAP": 2, "FSWAP": 2,
    "OSWAP": 4, "SE": 4, "DE": 4,
}
PARAMETRIZED = frozenset({"RY", "CRY", "SE", "DE", "MCRY"})
NATIVE = frozenset({"RY", "H", "X", "CNOT", "CZ", "MCRY"})

# DE books 13 CNOTs in total; its decomposition spells out 6 of them
# explicitly, so the triple-controlled RY carries the remaining 7.
MCRY_CNOT_COST = 7


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind == "MCRY":
            if len(self.qubits) < 2:
                raise CircuitError("MCRY needs at least one control")
        elif self.kind in ARITY:
            if len(self.qubits) != ARITY[self.kind]:
                raise CircuitError(f"{self.kind} takes {ARITY[self.kind]} qubits, got {len(self.qubits)}")
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} has repeated operands {self.qubits}")
        if (self.kind in PARAMETRIZED) != (self.param is not None):
            raise CircuitError(f"{self.kind} parameter mismatch")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.param is not None:
            d["param"] = self.param
        if self.scale != 1.0:
            d["scale"] = self.scale
        return d


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    n_params: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits or min(g.qubits) < 0:
                raise CircuitError(f"{g.kind} on {g.qubits} outside {self.n_qubits} qubits")
            if g.param is not None and not 0 <= g.param < self.n_params:
                raise CircuitError(f"parameter index {g.param} outside table of {self.n_params}")

    def __len__(self):
        return len(self.gates)

    def has_independent_params(self) -> bool:
        """Every parameter index used by exactly one gate."""
        used = [g.param for g in self.gates if g.param is not None]
        return sorted(used) == list(range(self.n_params))

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_params": self.n_params,
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        gates = [Gate(x["kind"], tuple(x["qubits"]), x.get("param"), x.get("scale", 1.0)) for x in d["gates"]]
        return cls(d["n_qubits"], tuple(gates), d["n_params"])

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def concat(*circuits: Circuit) -> Circuit:
    """Sequential composition with parameter tables stacked in order."""
    if not circuits:
        raise CircuitError("nothing to concatenate")
    n = circuits[0].n_qubits
    gates: list[Gate] = []
    offset = 0
    for c in circuits:
        if c.n_qubits != n:
            raise CircuitError("qubit counts differ")
        for g in c.gates:
            p = None if g.param is None else g.param + offset
            gates.append(Gate(g.kind, g.qubits, p, g.scale))
        offset += c.n_params
    return Circuit(n, tuple(gates), offset)


class CircuitBuilder:
    """Accumulates gates and hands out fresh parameter indices."""

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.gates: list[Gate] = []
        self.n_params = 0

    def add(self, kind: str, *qubits: int) -> Gate:
        param = None
        if kind in PARAMETRIZED:
            param = self.n_params
            self.n_params += 1
        g = Gate(kind, qubits, param)
        self.gates.append(g)
        return g

    def build(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(self.gates), self.n_params)


def _swap(a, b):
    return [Gate("CNOT", (b, a)), Gate("CNOT", (a, b)), Gate("CNOT", (b, a))]


def _fswap(a, b):
    return [Gate("SWAP", (a, b)), Gate("CZ", (a, b))]


def _rule(g: Gate) -> list[Gate] | None:
    q, p, s = g.qubits, g.param, g.scale
    if g.kind == "SWAP":
        return _swap(*q)
    if g.kind == "CRY":
        c, t = q
        return [Gate("RY", (t,), p, s / 2), Gate("CNOT", (c, t)),
                Gate("RY", (t,), p, -s / 2), Gate("CNOT", (c, t))]
    if g.kind == "FSWAP":
        return _fswap(*q)
    if g.kind == "OSWAP":
        a0, a1, b0, b1 = q
        return [Gate("FSWAP", (a1, b0)), Gate("FSWAP", (a0, a1)),
                Gate("FSWAP", (b0, b1)), Gate("FSWAP", (a1, b0))]
    if g.kind == "SE":
        a0, a1, b0, b1 = q
        return ([Gate("H", (a0,)), Gate("H", (a1,)), Gate("CNOT", (a0, b0)), Gate("CNOT", (a1, b1))]
                + [Gate("RY", (x,), p, -s / 2) for x in q]
                + [Gate("CNOT", (a1, b1)), Gate("CNOT", (a0, b0)), Gate("H", (a0,)), Gate("H", (a1,))])
    if g.kind == "DE":
        a0, a1, b0, b1 = q
        return [Gate("CNOT", (a0, a1)), Gate("CNOT", (b0, b1)), Gate("CNOT", (a0, b0)),
                Gate("X", (a1,)), Gate("X", (b1,)),
                Gate("MCRY", (a1, b0, b1, a0), p, -2 * s),
                Gate("X", (a1,)), Gate("X", (b1,)),
                Gate("CNOT", (a0, b0)), Gate("CNOT", (a0, a1)), Gate("CNOT", (b0, b1))]
    return None


def _expand(gates: Iterable[Gate]) -> list[Gate]:
    out = []
    for g in gates:
        sub = _rule(g)
        if sub is None:
            out.append(g)
        else:
            out.extend(_expand(sub))
    return out


def decompose(c: Circuit) -> Circuit:
    """Rewrite to {RY, H, X, CNOT, CZ, MCRY}, preserving the unitary."""
    return Circuit(c.n_qubits, tuple(_expand(c.gates)), c.n_params)


@dataclass(frozen=True)
class Metrics:
    cnot_count: int
    depth: int
    n_params: int

    def to_dict(self) -> dict:
        return {"cnot_count": self.cnot_count, "depth": self.depth, "n_params": self.n_params}


def _cnot_cost(g: Gate) -> int:
    if g.kind == "MCRY":
        return MCRY_CNOT_COST
    return 1 if len(g.qubits) == 2 else 0


def metrics(c: Circuit) -> Metrics:
    """CNOT count and greedy depth of the decomposed circuit.

    Every decomposed gate, single-qubit ones included, occupies one time
    step on each of its operands.
    """
    level = [0] * c.n_qubits
    cnots = 0
    for g in _expand(c.gates):
        cnots += _cnot_cost(g)
        t = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = t
    return Metrics(cnots, max(level, default=0), c.n_params)
