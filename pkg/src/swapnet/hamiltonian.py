"""Pauli-sum Hamiltonians, spin-glass instances and exact ground energies.

Basis convention: little-endian, qubit 0 is the least significant bit of a
basis-state index.

Pauli file format, one term per line::

    # comment
    qubits 4            (optional header, overrides 1 + max index)
    0.5 X 0 X 3
    -1.25 Z 2
    0.1                 (identity term)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, eigsh

DENSE_LIMIT = 10
EXACT_LIMIT = 14


class PauliFileError(ValueError):
    pass


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    paulis: tuple[tuple[int, str], ...] = ()

    def __init__(self, coefficient: float, paulis: Mapping[int, str] | Iterable[tuple[int, str]] = ()):
        items = paulis.items() if isinstance(paulis, Mapping) else paulis
        ops: dict[int, str] = {}
        for q, p in items:
            q, p = int(q), str(p).upper()
            if p not in ("X", "Y", "Z"):
                raise ValueError(f"unknown Pauli {p!r}")
            if q < 0:
                raise ValueError("negative qubit index")
            if q in ops:
                raise ValueError(f"qubit {q} appears twice in one term")
            ops[q] = p
        coefficient = float(coefficient)
        if not math.isfinite(coefficient):
            raise ValueError("coefficient must be finite")
        object.__setattr__(self, "coefficient", coefficient)
        object.__setattr__(self, "paulis", tuple(sorted(ops.items())))

    @property
    def max_qubit(self) -> int:
        return max((q for q, _ in self.paulis), default=-1)

    def masks(self) -> tuple[int, int, int]:
        """``(flip, phase, n_y)``: bits flipped, bits contributing a sign, Y count."""
        flip = phase = ny = 0
        for q, p in self.paulis:
            if p in "XY":
                flip |= 1 << q
            if p in "YZ":
                phase |= 1 << q
            ny += p == "Y"
        return flip, phase, ny


@dataclass(frozen=True)
class PauliSum:
    n_qubits: int
    terms: tuple[PauliTerm, ...] = ()

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm] = ()):
        merged: dict[tuple, float] = {}
        for t in terms:
            if t.max_qubit >= n_qubits:
                raise ValueError(f"term acts on qubit {t.max_qubit} outside {n_qubits} qubits")
            merged[t.paulis] = merged.get(t.paulis, 0.0) + t.coefficient
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "terms", tuple(PauliTerm(c, p) for p, c in merged.items()))

    def __mul__(self, c: float) -> "PauliSum":
        return PauliSum(self.n_qubits, [PauliTerm(c * t.coefficient, t.paulis) for t in self.terms])

    __rmul__ = __mul__

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Matrix-free ``H @ psi``."""
        psi = np.asarray(psi, dtype=complex)
        out = np.zeros_like(psi)
        idx = np.arange(psi.shape[0])
        for t in self.terms:
            flip, phase, ny = t.masks()
            sign = 1 - 2 * (np.bitwise_count(idx & phase).astype(np.int64) & 1)
            out[idx ^ flip] += (t.coefficient * (1j) ** ny) * sign * psi
        return out

    @cached_property
    def sparse(self) -> sp.csr_matrix:
        dim = 1 << self.n_qubits
        idx = np.arange(dim)
        rows, cols, data = [], [], []
        for t in self.terms:
            flip, phase, ny = t.masks()
            sign = 1 - 2 * (np.bitwise_count(idx & phase).astype(np.int64) & 1)
            rows.append(idx ^ flip)
            cols.append(idx)
            data.append((t.coefficient * (1j) ** ny) * sign)
        if not rows:
            return sp.csr_matrix((dim, dim), dtype=complex)
        m = sp.coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))
        return m.tocsr()

    def to_dense(self) -> np.ndarray:
        return self.sparse.toarray()


def exact_ground_energy(hm: PauliSum) -> float:
    """Lowest eigenvalue: dense solve up to 10 qubits, Lanczos up to 14."""
    n = hm.n_qubits
    if n > EXACT_LIMIT:
        raise ValueError(f"{n} qubits exceeds the exact-diagonalisation budget of {EXACT_LIMIT}")
    if n <= DENSE_LIMIT:
        return float(np.linalg.eigvalsh(hm.to_dense())[0])
    dim = 1 << n
    op = LinearOperator((dim, dim), matvec=hm.apply, dtype=complex)
    v0 = np.random.default_rng(0).standard_normal(dim).astype(complex)
    vals = eigsh(op, k=1, which="SA", v0=v0, tol=1e-13, ncv=min(dim, 40), return_eigenvectors=False)
    return float(vals[0])


@dataclass(frozen=True)
class SpinGlassInstance:
    """All-to-all XX couplings plus Z fields, values uniform in [-1, 1].

    ``j`` holds the couplings for pairs ``i < j`` in row-major order.
    """

    n: int
    j: tuple[float, ...]
    h: tuple[float, ...]
    seed: int

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in range(a + 1, self.n)]

    def hamiltonian(self) -> PauliSum:
        terms = [PauliTerm(c, {a: "X", b: "X"}) for (a, b), c in zip(self.pairs, self.j)]
        terms += [PauliTerm(c, {a: "Z"}) for a, c in enumerate(self.h)]
        return PauliSum(self.n, terms)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "seed": self.seed, "j": list(self.j), "h": list(self.h)}) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SpinGlassInstance":
        d = json.loads(text)
        return cls(d["n"], tuple(d["j"]), tuple(d["h"]), d["seed"])


def gen_spin_glass(n: int, seed: int) -> tuple[SpinGlassInstance, PauliSum]:
    """Random instance from numpy's PCG64 stream: couplings first, then fields."""
    if n < 2:
        raise ValueError("spin glass needs n >= 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    j = rng.uniform(-1.0, 1.0, size=n * (n - 1) // 2)
    h = rng.uniform(-1.0, 1.0, size=n)
    inst = SpinGlassInstance(n, tuple(float(x) for x in j), tuple(float(x) for x in h), seed)
    return inst, inst.hamiltonian()


def parse_pauli_text(text: str) -> PauliSum:
    header = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "qubits":
            if len(tok) != 2 or not tok[1].isdigit():
                raise PauliFileError(f"line {lineno}: malformed header {raw!r}")
            header = int(tok[1])
            continue
        try:
            coef = float(tok[0])
        except ValueError:
            raise PauliFileError(f"line {lineno}: non-numeric coefficient {tok[0]!r}") from None
        rest = tok[1:]
        if len(rest) % 2:
            raise PauliFileError(f"line {lineno}: expected Pauli/qubit pairs, got {raw!r}")
        try:
            ops = [(int(rest[i + 1]), rest[i]) for i in range(0, len(rest), 2)]
            terms.append(PauliTerm(coef, ops))
        except ValueError as exc:
            raise PauliFileError(f"line {lineno}: {exc}") from None
    n = header if header is not None else 1 + max((t.max_qubit for t in terms), default=0)
    try:
        return PauliSum(n, terms)
    except ValueError as exc:
        raise PauliFileError(str(exc)) from None


def parse_pauli_file(path: str | Path) -> PauliSum:
    return parse_pauli_text(Path(path).read_text(encoding="utf-8"))


def format_pauli_sum(hm: PauliSum) -> str:
    lines = [f"qubits {hm.n_qubits}"]
    for t in hm.terms:
        ops = " ".join(f"{p} {q}" for q, p in t.paulis)
        lines.append(f"{t.coefficient:.17g} {ops}".rstrip())
    return "\n".join(lines) + "\n"


def write_pauli_file(hm: PauliSum, path: str | Path) -> None:
    Path(path).write_text(format_pauli_sum(hm), encoding="utf-8")
