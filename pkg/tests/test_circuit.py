import itertools
import random

import numpy as np
import pytest

from clinr.circuit import (
    CliffordCircuit,
    CliffordGate,
    conjugate_many,
    conjugate_pauli,
    gate,
)
from clinr.errors import DimensionError, UnsupportedGateError
from clinr.pauli import PauliOperator

from _oracles import circuit_unitary, pauli_matrix

ALL_GATES_2Q = (
    [gate(k, q) for k in ("H", "S", "SDG", "X", "Y", "Z") for q in (0, 1)]
    + [gate(k, a, b) for k in ("CX", "CZ", "CY") for a, b in ((0, 1), (1, 0))]
)


def test_conjugation_brute_force_all_two_qubit_paulis():
    """Every gate rule against dense 4x4 conjugation, phases included."""
    for g in ALL_GATES_2Q:
        circ = CliffordCircuit(2, [g])
        u = circuit_unitary(circ)
        for x, z, phase in itertools.product(range(4), range(4), range(4)):
            p = PauliOperator(2, x, z, phase)
            got = pauli_matrix(conjugate_pauli(circ, p))
            want = u @ pauli_matrix(p) @ u.conj().T
            assert np.allclose(got, want), f"{g} on {p}"


def test_textbook_h_conjugation():
    circ = CliffordCircuit(1, [gate("H", 0)])
    z = PauliOperator.from_label("Z")
    assert conjugate_pauli(circ, z).to_label() == "+X"


def test_empty_circuit_is_identity():
    p = PauliOperator.from_label("-XY")
    assert conjugate_pauli(CliffordCircuit(2), p) == p


def test_cx_spreads_x():
    circ = CliffordCircuit(2, [gate("CX", 0, 1)])
    x0 = PauliOperator.from_label("XI")
    assert conjugate_pauli(circ, x0).to_label() == "+XX"


def _random_circuit(rng, n, size):
    circ = CliffordCircuit(n)
    kinds1 = ("H", "S", "SDG", "X", "Y", "Z")
    kinds2 = ("CX", "CZ")
    while circ.size() < size:
        if n > 1 and rng.random() < 0.5:
            a, b = rng.sample(range(n), 2)
            circ.append(rng.choice(kinds2), a, b)
        else:
            circ.append(rng.choice(kinds1), rng.randrange(n))
    return circ


def test_conjugation_is_group_action():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 6)
        first = _random_circuit(rng, n, rng.randint(0, 25))
        second = _random_circuit(rng, n, rng.randint(0, 25))
        p = PauliOperator(n, rng.getrandbits(n), rng.getrandbits(n), rng.randrange(4))
        whole = first.compose(second)
        step = conjugate_pauli(second, conjugate_pauli(first, p))
        assert conjugate_pauli(whole, p) == step


def test_conjugation_preserves_commutation():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(2, 6)
        circ = _random_circuit(rng, n, 30)
        p = PauliOperator(n, rng.getrandbits(n), rng.getrandbits(n))
        q = PauliOperator(n, rng.getrandbits(n), rng.getrandbits(n))
        pc, qc = conjugate_many(circ, [p, q])
        assert p.commutes_with(q) == pc.commutes_with(qc)


def test_conjugate_rejects_bad_inputs():
    circ = CliffordCircuit(2, [gate("M", 0)])
    with pytest.raises(UnsupportedGateError):
        conjugate_pauli(circ, PauliOperator.identity(2))
    with pytest.raises(DimensionError):
        conjugate_pauli(CliffordCircuit(2), PauliOperator.identity(3))


def test_gate_validation():
    with pytest.raises(UnsupportedGateError):
        gate("CX", 1, 1)
    with pytest.raises(UnsupportedGateError):
        gate("H", 0, 1)
    with pytest.raises(UnsupportedGateError):
        gate("Q", 0)
    with pytest.raises(DimensionError):
        CliffordCircuit(1).append("H", 3)


def test_size_counts_unitaries_only():
    circ = CliffordCircuit(2, [gate("H", 0), gate("M", 0), gate("R", 0), gate("CX", 0, 1)])
    assert circ.size() == 2
    assert circ.gate_census() == (1, 1)


def test_text_round_trip():
    circ = CliffordCircuit(3, [gate("H", 0), gate("CX", 0, 2), gate("SDG", 1), gate("M", 2)])
    text = circ.to_text()
    back = CliffordCircuit.from_text(text)
    assert back.n == circ.n
    assert back.gates == circ.gates
    assert back.to_text() == text  # bit-exact round trip


def test_text_comments_and_errors():
    text = "# a comment\nqubits 2\nH 0  # trailing\nCX 0 1\n"
    circ = CliffordCircuit.from_text(text)
    assert circ.size() == 2
    with pytest.raises(ValueError):
        CliffordCircuit.from_text("H 0\n")
