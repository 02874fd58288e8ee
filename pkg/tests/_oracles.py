"""Dense-matrix oracles used to brute-force-check the stabilizer machinery."""

import numpy as np

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)

SINGLE = {"H": _H, "S": _S, "SDG": _S.conj().T, "X": _X, "Y": _Y, "Z": _Z}


def _embed_single(mat, q, n):
    out = np.array([[1.0 + 0j]])
    # qubit 0 is the least significant bit of the state index
    for k in range(n):
        out = np.kron(SINGLE_OR_I(mat, q, k), out)
    return out


def SINGLE_OR_I(mat, q, k):
    return mat if k == q else _I


def _embed_controlled(pauli_mat, c, t, n):
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        if (idx >> c) & 1:
            # apply pauli_mat on target bit
            for tgt_bit in (0, 1):
                if ((idx >> t) & 1) != tgt_bit:
                    continue
                for src_bit in (0, 1):
                    amp = pauli_mat[tgt_bit, src_bit]
                    if amp != 0:
                        src = (idx & ~(1 << t)) | (src_bit << t)
                        out[idx, src] += amp
        else:
            out[idx, idx] = 1.0
    return out


def gate_unitary(g, n):
    kind = g.kind
    if kind in SINGLE:
        return _embed_single(SINGLE[kind], g.targets[0], n)
    if kind == "CX":
        return _embed_controlled(_X, g.targets[0], g.targets[1], n)
    if kind == "CZ":
        return _embed_controlled(_Z, g.targets[0], g.targets[1], n)
    if kind == "CY":
        return _embed_controlled(_Y, g.targets[0], g.targets[1], n)
    raise ValueError(f"no unitary for {kind}")


def circuit_unitary(circuit):
    dim = 1 << circuit.n
    u = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        u = gate_unitary(g, circuit.n) @ u
    return u


def pauli_matrix(p):
    """Matrix of i^phase * X^x Z^z in the little-endian basis."""
    dim = 1 << p.n
    out = np.array([[1.0 + 0j]])
    for q in range(p.n):
        m = np.eye(2, dtype=complex)
        if (p.z >> q) & 1:
            m = _Z @ m
        if (p.x >> q) & 1:
            m = _X @ m
        out = np.kron(m, out)
    return (1j ** p.phase) * out


def statevector(circuit, input_state=None):
    dim = 1 << circuit.n
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    if input_state is not None:
        psi = input_state
    return circuit_unitary(circuit) @ psi
