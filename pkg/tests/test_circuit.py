import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapnet.circuit import (
    ARITY,
    Circuit,
    CircuitBuilder,
    CircuitError,
    Gate,
    concat,
    decompose,
    metrics,
)


def one(kind, n=4):
    b = CircuitBuilder(n)
    b.add(kind, *range(ARITY[kind]))
    return b.build()


def two_qubit(c):
    return [g for g in decompose(c).gates if len(g.qubits) == 2]


def test_swap_three_cnots():
    d = decompose(one("SWAP", 2))
    assert [g.kind for g in d.gates] == ["CNOT"] * 3


def test_cry_two_cnots():
    d = decompose(one("CRY", 2))
    assert d.count("CNOT") == 2 and d.count("RY") == 2


def test_se_four_cnots():
    assert len(two_qubit(one("SE"))) == 4
    assert all(g.kind == "CNOT" for g in two_qubit(one("SE")))


def test_fswap_three_cnots_one_cz():
    d = decompose(one("FSWAP", 2))
    assert d.count("CNOT") == 3 and d.count("CZ") == 1


def test_oswap_expands_to_fswaps():
    c = one("OSWAP")
    d = decompose(c)
    # each FSWAP leaves 3 CNOT + 1 CZ
    assert d.count("CZ") * 3 == d.count("CNOT")
    assert metrics(c).cnot_count == 4 * d.count("CZ")


def test_de_booked_at_thirteen():
    c = one("DE")
    d = decompose(c)
    assert d.count("MCRY") == 1 and d.count("CNOT") == 6
    assert metrics(c).cnot_count == 13


def test_empty_circuit():
    c = Circuit(3)
    assert decompose(c) == c
    m = metrics(c)
    assert (m.cnot_count, m.depth, m.n_params) == (0, 0, 0)


def test_swap_metrics():
    m = metrics(one("SWAP", 2))
    assert (m.cnot_count, m.depth) == (3, 3)


def test_eg_metrics():
    b = CircuitBuilder(2)
    b.add("RY", 0)
    b.add("RY", 1)
    b.add("CRY", 0, 1)
    m = metrics(b.build())
    assert m.cnot_count == 2 and m.n_params == 3


def test_depth_counts_single_qubit_gates():
    b = CircuitBuilder(2)
    b.add("H", 0)
    b.add("H", 0)
    b.add("CNOT", 0, 1)
    b.add("X", 1)
    assert metrics(b.build()).depth == 4


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("CNOT", (0,))
    with pytest.raises(CircuitError):
        Gate("CNOT", (1, 1))
    with pytest.raises(CircuitError):
        Gate("RY", (0,))
    with pytest.raises(CircuitError):
        Gate("H", (0,), 0)
    with pytest.raises(CircuitError):
        Gate("TOFFOLI", (0, 1, 2))


def test_circuit_validation():
    with pytest.raises(CircuitError):
        Circuit(2, (Gate("CNOT", (0, 2)),))
    with pytest.raises(CircuitError):
        Circuit(2, (Gate("RY", (0,), 3),), 1)


def test_independent_params():
    c = one("CRY", 2)
    assert c.has_independent_params()
    # decomposition shares the angle between the two RY halves
    assert not decompose(c).has_independent_params()


def test_json_roundtrip():
    b = CircuitBuilder(4)
    for kind in ("RY", "CRY", "SE", "DE", "OSWAP", "FSWAP", "CZ"):
        b.add(kind, *range(ARITY[kind]))
    c = b.build()
    assert Circuit.from_json(c.to_json()) == c
    d = decompose(c)
    assert Circuit.from_json(d.to_json()) == d
    assert json.loads(c.to_json())["n_params"] == 4


kinds = st.sampled_from(sorted(ARITY))


@st.composite
def circuits(draw, n=5):
    b = CircuitBuilder(n)
    for kind in draw(st.lists(kinds, max_size=12)):
        b.add(kind, *draw(st.permutations(range(n)))[: ARITY[kind]])
    return b.build()


@settings(max_examples=60, deadline=None)
@given(circuits(), circuits())
def test_metrics_concat_and_idempotence(a, b):
    ma, mb, mab = metrics(a), metrics(b), metrics(concat(a, b))
    assert mab.cnot_count == ma.cnot_count + mb.cnot_count
    assert max(ma.depth, mb.depth) <= mab.depth <= ma.depth + mb.depth
    assert mab.n_params == ma.n_params + mb.n_params
    assert metrics(decompose(a)) == ma
    assert all(g.kind in ("RY", "H", "X", "CNOT", "CZ", "MCRY") for g in decompose(a).gates)
