import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import circuit_matrix, de_generator, gate_matrix, hamiltonian_matrix, se_generator
from swapnet.circuit import ARITY, Circuit, CircuitBuilder, Gate, decompose
from swapnet.hamiltonian import PauliSum, PauliTerm, exact_ground_energy, gen_spin_glass
from swapnet.sim import (
    SimulationError,
    State,
    apply_gate,
    compile_circuit,
    expectation,
    simulate,
    zero_state,
)

KINDS = sorted(ARITY)


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return State(n, v / np.linalg.norm(v))


def single(kind, n=4, qubits=None):
    b = CircuitBuilder(n)
    b.add(kind, *(qubits or range(ARITY[kind])))
    return b.build()


def test_x_flips():
    s = apply_gate(zero_state(1), Gate("X", (0,)))
    assert np.allclose(s.amplitudes, [0, 1])


def test_se_zero_angle_identity():
    rng = np.random.default_rng(0)
    s = random_state(4, rng)
    out = apply_gate(s, Gate("SE", (0, 1, 2, 3), 0), [0.0])
    assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-15)


def test_out_of_range():
    with pytest.raises(SimulationError):
        apply_gate(zero_state(2), Gate("CNOT", (0, 2)))
    with pytest.raises(SimulationError):
        simulate(single("RY", 1), [])
    with pytest.raises(SimulationError):
        zero_state(21)


def test_empty_and_zero_param_hea():
    assert np.allclose(simulate(Circuit(3)).amplitudes, zero_state(3).amplitudes)
    b = CircuitBuilder(3)
    for u, v in ((0, 1), (1, 2)):
        b.add("RY", u)
        b.add("RY", v)
        b.add("CRY", u, v)
    c = b.build()
    assert np.allclose(simulate(c, np.zeros(c.n_params)).amplitudes, zero_state(3).amplitudes)


def test_expectation_examples():
    z0 = PauliSum(1, [PauliTerm(1.0, {0: "Z"})])
    assert expectation(zero_state(1), z0) == pytest.approx(1.0)
    one = apply_gate(zero_state(1), Gate("X", (0,)))
    assert expectation(one, z0) == pytest.approx(-1.0)
    with pytest.raises(SimulationError):
        expectation(zero_state(2), z0)


@pytest.mark.parametrize("kind", KINDS)
def test_gate_matches_dense_oracle(kind):
    rng = np.random.default_rng(11)
    n = 4
    for _ in range(5):
        qubits = tuple(int(q) for q in rng.permutation(n)[: ARITY[kind]])
        c = single(kind, n, qubits)
        params = rng.uniform(-np.pi, np.pi, c.n_params)
        s = random_state(n, rng)
        out = s.amplitudes
        for g in c.gates:
            out = apply_gate(State(n, out), g, params).amplitudes
        ref = circuit_matrix(c, params) @ s.amplitudes
        assert np.abs(out - ref).max() < 1e-12


def test_mcry_matches_oracle():
    rng = np.random.default_rng(2)
    g = Gate("MCRY", (3, 0, 2, 1), 0, -2.0)
    s = random_state(4, rng)
    out = apply_gate(s, g, [0.7]).amplitudes
    ref = gate_matrix("MCRY", g.qubits, -1.4, 4) @ s.amplitudes
    assert np.abs(out - ref).max() < 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_decomposed_equivalence(kind):
    rng = np.random.default_rng(5)
    n = 5
    for _ in range(10):
        qubits = tuple(int(q) for q in rng.permutation(n)[: ARITY[kind]])
        c = single(kind, n, qubits)
        d = decompose(c)
        params = rng.uniform(-2 * np.pi, 2 * np.pi, c.n_params)
        for basis in range(0, 1 << n, 7):
            psi = np.zeros(1 << n, dtype=complex)
            psi[basis] = 1
            a, b = State(n, psi.copy()), State(n, psi.copy())
            for g in c.gates:
                a = apply_gate(a, g, params)
            for g in d.gates:
                b = apply_gate(b, g, params)
            assert np.abs(a.amplitudes - b.amplitudes).max() < 1e-10


def test_generators_commute():
    q = (0, 1, 2, 3)
    for gen in (se_generator(4, q), de_generator(4, q)):
        assert np.allclose(gen, gen.conj().T)
    from oracles import pauli_string
    strings = ["YXXX", "XYXX", "XXYX", "XXXY", "YYXY", "YYYX", "XYYY", "YXYY"]
    mats = [pauli_string(4, dict(zip(q, s))) for s in strings]
    for a in mats:
        for b in mats:
            assert np.allclose(a @ b, b @ a)


def test_de_rotates_pair_occupations():
    # |1100> (orbital a doubly occupied) rotates into |0011> at angle t
    t = 0.3
    psi = np.zeros(16)
    psi[0b0011] = 1
    out = apply_gate(State(4, psi.astype(complex)), Gate("DE", (0, 1, 2, 3), 0), [t]).amplitudes
    assert abs(abs(out[0b0011]) - np.cos(t)) < 1e-12
    assert abs(abs(out[0b1100]) - np.sin(t)) < 1e-12


def test_fswap_and_oswap_involutions():
    rng = np.random.default_rng(3)
    s = random_state(4, rng)
    for g in (Gate("FSWAP", (1, 3)), Gate("OSWAP", (0, 1, 2, 3))):
        out = apply_gate(apply_gate(s, g), g)
        assert np.abs(out.amplitudes - s.amplitudes).max() < 1e-12


def unitary(gates, params=()):
    cols = []
    for b in range(16):
        psi = np.zeros(16, dtype=complex)
        psi[b] = 1
        s = State(4, psi)
        for g in gates:
            s = apply_gate(s, g, params)
        cols.append(s.amplitudes)
    return np.array(cols).T


def test_excitations_at_pi_versus_oswap():
    """At angle pi the approximate single excitation moves occupations like an
    orbital swap, but with basis-dependent signs, so it is not the same gate."""
    q = (0, 1, 2, 3)
    osw = unitary([Gate("OSWAP", q)])
    se = unitary([Gate("SE", q, 0)], [np.pi])
    de_se = unitary([Gate("DE", q, 0), Gate("SE", q, 1)], [np.pi, np.pi])
    for u in (se, de_se):
        assert np.allclose(np.abs(u), np.abs(osw))
        phase = np.vdot(osw[:, 0], u[:, 0])
        assert not np.allclose(u, phase * osw)


@st.composite
def circuits(draw, n=3):
    b = CircuitBuilder(n)
    small = [k for k in KINDS if ARITY[k] <= n]
    for kind in draw(st.lists(st.sampled_from(small), min_size=1, max_size=10)):
        b.add(kind, *draw(st.permutations(range(n)))[: ARITY[kind]])
    return b.build()


@settings(max_examples=60, deadline=None)
@given(circuits(), st.integers(0, 2**31))
def test_random_circuit_dense_oracle(c, seed):
    params = np.random.default_rng(seed).uniform(-np.pi, np.pi, c.n_params)
    ref = circuit_matrix(c, params)[:, 0]
    out = simulate(c, params)
    assert np.abs(out.amplitudes - ref).max() < 1e-12
    assert abs(out.norm() - 1) < 1e-10
    assert np.abs(compile_circuit(c)(params) - ref).max() < 1e-12


@st.composite
def wide_circuits(draw, n=5):
    b = CircuitBuilder(n)
    for kind in draw(st.lists(st.sampled_from(KINDS), min_size=1, max_size=15)):
        b.add(kind, *draw(st.permutations(range(n)))[: ARITY[kind]])
    return b.build()


@settings(max_examples=40, deadline=None)
@given(wide_circuits(), st.integers(0, 2**31))
def test_norm_and_number_conservation(c, seed):
    rng = np.random.default_rng(seed)
    params = rng.uniform(-np.pi, np.pi, c.n_params)
    s = random_state(5, rng)
    number = PauliSum(5, [PauliTerm(-0.5, {q: "Z"}) for q in range(5)])
    for g in c.gates:
        before = expectation(s, number)
        s = apply_gate(s, g, params)
        assert abs(s.norm() - 1) < 1e-10
        if g.kind in ("SE", "DE"):
            assert abs(expectation(s, number) - before) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 1000), st.integers(0, 2**31))
def test_expectation_dense_and_variational(n, inst, seed):
    _, hm = gen_spin_glass(n, inst)
    s = random_state(n, np.random.default_rng(seed))
    ref = np.vdot(s.amplitudes, hamiltonian_matrix(hm) @ s.amplitudes).real
    e = expectation(s, hm)
    assert abs(e - ref) < 1e-12 * (1 + abs(ref))
    assert e >= exact_ground_energy(hm) - 1e-9
