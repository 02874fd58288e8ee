import collections
import random

import pytest

from clinr.circuit import CliffordCircuit, conjugate_many
from clinr.pauli import PauliOperator
from clinr.random_clifford import (
    is_symplectic,
    random_clifford,
    random_clifford_tableau,
    symplectic_group_order,
    symplectic_matrix,
    synthesize_tableau,
)


def test_group_orders():
    assert symplectic_group_order(1) == 6
    assert symplectic_group_order(2) == 720


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_symplectic_matrices_are_symplectic(n):
    rng = random.Random(5)
    for _ in range(10):
        g = symplectic_matrix(rng.randrange(symplectic_group_order(n)), n)
        assert is_symplectic(g)


def test_symplectic_enumeration_complete_n1():
    seen = {symplectic_matrix(i, 1).tobytes() for i in range(6)}
    assert len(seen) == 6


def _tableau_of(circ):
    n = circ.n
    basis = [PauliOperator.single(n, i, "X") for i in range(n)] + [
        PauliOperator.single(n, i, "Z") for i in range(n)
    ]
    images = conjugate_many(circ, basis)
    return [(p.x, p.z, p.phase) for p in images]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_synthesis_round_trip(n):
    """Synthesized circuit reproduces every generator image, signs included."""
    rng = random.Random(100 + n)
    for _ in range(15):
        x_images, z_images = random_clifford_tableau(n, rng)
        circ = CliffordCircuit(n, synthesize_tableau(n, x_images, z_images))
        got = _tableau_of(circ)
        assert got[:n] == x_images
        assert got[n:] == z_images


def test_exact_size_padding_and_truncation():
    for n, size in [(1, 0), (1, 7), (3, 20), (4, 1), (2, 100)]:
        circ = random_clifford(n, size, seed_or_rng=42)
        assert circ.size() == size


def test_paper_scale_size():
    circ = random_clifford(70, 4900, seed_or_rng=1)
    assert circ.n == 70
    assert circ.size() == 4900


def test_determinism_and_seed_sensitivity():
    a = random_clifford(3, 20, 7)
    b = random_clifford(3, 20, 7)
    c = random_clifford(3, 20, 8)
    assert a.gates == b.gates
    assert a.gates != c.gates
    assert c.size() == 20


def test_sampling_covers_single_qubit_group():
    """All 24 single-qubit Cliffords appear with roughly uniform frequency."""
    rng = random.Random(9)
    counts = collections.Counter()
    draws = 2400
    for _ in range(draws):
        x_images, z_images = random_clifford_tableau(1, rng)
        counts[(x_images[0], z_images[0])] += 1
    assert len(counts) == 24
    for c in counts.values():
        assert 40 <= c <= 180  # mean 100
