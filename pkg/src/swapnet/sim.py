"""Dense statevector simulation.

Little-endian: qubit ``q`` is bit ``q`` of the basis index. Rotation
convention ``RY(a) = exp(-i a Y / 2)``. SE and DE are applied as products
of commuting Pauli-string exponentials; the decomposed circuits in
:mod:`swapnet.circuit` are only an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Gate
from .hamiltonian import PauliSum

MAX_QUBITS = 20

# (coefficient, Pauli string) over operands (p_alpha, p_beta, q_alpha, q_beta)
SE_STRINGS = ((1, "XIYI"), (-1, "YIXI"), (1, "IXIY"), (-1, "IYIX"))
DE_STRINGS = (
    (1, "YXXX"), (1, "XYXX"), (-1, "XXYX"), (-1, "XXXY"),
    (1, "YYXY"), (1, "YYYX"), (-1, "XYYY"), (-1, "YXYY"),
)
SE_PREFACTOR = 1 / 4
DE_PREFACTOR = 1 / 8


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class State:
    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(n: int) -> State:
    if not 0 < n <= MAX_QUBITS:
        raise SimulationError(f"simulation supports 1..{MAX_QUBITS} qubits, got {n}")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    return State(n, psi)


def _ry(a: float) -> np.ndarray:
    c, s = np.cos(a / 2), np.sin(a / 2)
    return np.array([[c, -s], [s, c]])


_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]])


def _single(psi: np.ndarray, n: int, q: int, m: np.ndarray, controls=()) -> np.ndarray:
    t = psi.reshape((2,) * n)
    base = [slice(None)] * n
    for c in controls:
        base[n - 1 - c] = 1
    i0 = list(base)
    i1 = list(base)
    i0[n - 1 - q] = 0
    i1[n - 1 - q] = 1
    i0, i1 = tuple(i0), tuple(i1)
    a = t[i0].copy()
    b = t[i1]
    t[i0] = m[0, 0] * a + m[0, 1] * b
    t[i1] = m[1, 0] * a + m[1, 1] * b
    return psi


@lru_cache(maxsize=4096)
def _perm_sign(n: int, kind: str, qubits: tuple[int, ...]):
    """Index map ``src`` and sign so that ``new = sign * psi[src]``."""
    idx = np.arange(1 << n)
    bit = [(idx >> q) & 1 for q in qubits]
    src = idx.copy()
    sign = None
    if kind == "CNOT":
        src = idx ^ (bit[0] << qubits[1])
    elif kind in ("SWAP", "FSWAP"):
        a, b = qubits
        src = idx ^ ((bit[0] ^ bit[1]) * ((1 << a) | (1 << b)))
        if kind == "FSWAP":
            sign = 1 - 2 * (bit[0] & bit[1])
    elif kind == "CZ":
        sign = 1 - 2 * (bit[0] & bit[1])
    elif kind == "OSWAP":
        a0, a1, b0, b1 = qubits
        # state bits of orbital b move to orbital a and vice versa
        src = idx & ~((1 << a0) | (1 << a1) | (1 << b0) | (1 << b1))
        src = src | (bit[2] << a0) | (bit[3] << a1) | (bit[0] << b0) | (bit[1] << b1)
        na = bit[0] + bit[1]
        nb = bit[2] + bit[3]
        sign = 1 - 2 * ((na * nb) & 1)
    else:
        raise SimulationError(f"no permutation rule for {kind}")
    return src, sign


@lru_cache(maxsize=4096)
def _pauli_action(n: int, qubits: tuple[int, ...], string: str):
    """``(src, factor)`` with ``P psi = factor * psi[src]``."""
    flip = phase = ny = 0
    for q, p in zip(qubits, string):
        if p in "XY":
            flip |= 1 << q
        if p in "YZ":
            phase |= 1 << q
        ny += p == "Y"
    idx = np.arange(1 << n)
    src = idx ^ flip
    factor = (1j) ** ny * (1 - 2 * (np.bitwise_count(src & phase).astype(np.int64) & 1))
    return src, factor


def _pauli_exp(psi, n, qubits, strings, prefactor, angle):
    for coef, s in strings:
        a = prefactor * coef * angle
        src, factor = _pauli_action(n, qubits, s)
        psi = np.cos(a) * psi + 1j * np.sin(a) * factor * psi[src]
    return psi


def _apply(psi: np.ndarray, n: int, g: Gate, angle: float | None) -> np.ndarray:
    k, q = g.kind, g.qubits
    if k == "RY":
        return _single(psi, n, q[0], _ry(angle))
    if k == "CRY":
        return _single(psi, n, q[1], _ry(angle), controls=q[:1])
    if k == "MCRY":
        return _single(psi, n, q[-1], _ry(angle), controls=q[:-1])
    if k == "H":
        return _single(psi, n, q[0], _H)
    if k == "X":
        return _single(psi, n, q[0], _X)
    if k == "SE":
        return _pauli_exp(psi, n, q, SE_STRINGS, SE_PREFACTOR, angle)
    if k == "DE":
        return _pauli_exp(psi, n, q, DE_STRINGS, DE_PREFACTOR, angle)
    src, sign = _perm_sign(n, k, q)
    out = psi[src]
    if sign is not None:
        out *= sign
    return out


def _angle(g: Gate, params) -> float | None:
    return None if g.param is None else g.scale * float(params[g.param])


def apply_gate(s: State, gate: Gate, params=()) -> State:
    if max(gate.qubits) >= s.n_qubits:
        raise SimulationError(f"{gate.kind} on {gate.qubits} outside {s.n_qubits} qubits")
    if gate.param is not None and gate.param >= len(params):
        raise SimulationError(f"missing parameter {gate.param}")
    psi = _apply(s.amplitudes.copy(), s.n_qubits, gate, _angle(gate, params))
    return State(s.n_qubits, psi)


def simulate(c: Circuit, params=()) -> State:
    """Apply ``c`` to ``|0...0>``."""
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.shape[0] != c.n_params:
        raise SimulationError(f"expected {c.n_params} parameters, got {params.shape[0]}")
    n = c.n_qubits
    psi = zero_state(n).amplitudes
    for g in c.gates:
        psi = _apply(psi, n, g, _angle(g, params))
    return State(n, psi)


def expectation(s: State, hm: PauliSum) -> float:
    if s.n_qubits != hm.n_qubits:
        raise SimulationError(f"state has {s.n_qubits} qubits, Hamiltonian {hm.n_qubits}")
    psi = s.amplitudes
    val = np.vdot(psi, hm.apply(psi))
    scale = 1.0 + sum(abs(t.coefficient) for t in hm.terms)
    if abs(val.imag) > 1e-10 * scale:
        raise SimulationError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def _pair_indices(n: int, target: int, controls=()) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << n)
    mask = ((idx >> target) & 1) == 0
    for c in controls:
        mask &= ((idx >> c) & 1) == 1
    i0 = idx[mask]
    return i0, i0 | (1 << target)


def compile_circuit(c: Circuit):
    """Return ``params -> amplitudes`` (float64) for repeated evaluation.

    Every supported gate has a real matrix in the computational basis, so
    the compiled path runs in real arithmetic. Index tables are built once;
    results agree with :func:`simulate` to rounding.
    """
    n = c.n_qubits
    zero_state(n)
    ops = []
    for g in c.gates:
        k, q = g.kind, g.qubits
        if k in ("RY", "CRY", "MCRY"):
            i0, i1 = _pair_indices(n, q[-1], q[:-1])
            ops.append(("rot", i0, i1, g.param, g.scale))
        elif k in ("H", "X"):
            i0, i1 = _pair_indices(n, q[0])
            ops.append((k, i0, i1, None, None))
        elif k in ("SE", "DE"):
            strings, pre = (SE_STRINGS, SE_PREFACTOR) if k == "SE" else (DE_STRINGS, DE_PREFACTOR)
            for coef, string in strings:
                src, factor = _pauli_action(n, q, string)
                f = (1j * factor)
                assert not np.any(f.imag)
                ops.append(("exp", src, f.real.copy(), g.param, g.scale * pre * coef))
        else:
            src, sign = _perm_sign(n, k, q)
            ops.append(("perm", src, None if sign is None else sign.astype(float), None, None))
    r2 = 1 / math.sqrt(2)

    def run(params) -> np.ndarray:
        params = np.asarray(params, dtype=float).reshape(-1)
        if params.shape[0] != c.n_params:
            raise SimulationError(f"expected {c.n_params} parameters, got {params.shape[0]}")
        psi = np.zeros(1 << n)
        psi[0] = 1.0
        for kind, a, b, p, s in ops:
            if kind == "rot":
                half = 0.5 * s * params[p]
                co, si = math.cos(half), math.sin(half)
                u, v = psi[a], psi[b]
                psi[a] = co * u - si * v
                psi[b] = si * u + co * v
            elif kind == "exp":
                ang = s * params[p]
                psi = math.cos(ang) * psi + math.sin(ang) * b * psi[a]
            elif kind == "perm":
                psi = psi[a] if b is None else b * psi[a]
            elif kind == "X":
                psi[a], psi[b] = psi[b], psi[a].copy()
            else:
                u, v = psi[a], psi[b]
                psi[a] = r2 * (u + v)
                psi[b] = r2 * (u - v)
        return psi

    return run
