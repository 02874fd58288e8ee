"""Uniform random Clifford circuits.

Sampling follows the Koenig-Smolin enumeration of Sp(2n, 2): a uniformly
random group index is expanded into a symplectic matrix by transvections, the
2n generator images get uniformly random signs, and the resulting tableau is
synthesized into {H, S, SDG, X, Z, CX, CZ} gates by Gaussian elimination.
The circuit is then padded with self-canceling X pairs or truncated so the
unitary gate count is exact (truncation changes the implemented unitary,
which is fine for the random-circuit benchmarks this feeds).
"""

from __future__ import annotations

import numpy as np

from .circuit import CliffordCircuit, CliffordGate, gate
from .errors import ClinrError
from .rng import make_rng
from .stabilizer import StabilizerState


def symplectic_group_order(n: int) -> int:
    order = 1 << (n * n)
    for j in range(1, n + 1):
        order *= (1 << (2 * j)) - 1
    return order


def _inner(v: np.ndarray, w: np.ndarray) -> int:
    swapped = np.empty_like(w)
    swapped[0::2] = w[1::2]
    swapped[1::2] = w[0::2]
    return int(v @ swapped) % 2


def _transvect_rows(g: np.ndarray, k: np.ndarray) -> np.ndarray:
    if not k.any():
        return g
    swapped = np.empty_like(k)
    swapped[0::2] = k[1::2]
    swapped[1::2] = k[0::2]
    ips = (g @ swapped) % 2
    return (g + np.outer(ips, k)) % 2


def _transvect(v: np.ndarray, k: np.ndarray) -> np.ndarray:
    return (v + _inner(k, v) * k) % 2


def _find_transvection(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """h0, h1 with y = T_h0 T_h1 x (Koenig-Smolin Lemma 2)."""
    nn = x.size
    zero = np.zeros(nn, dtype=np.int8)
    if np.array_equal(x, y):
        return zero, zero
    if _inner(x, y) == 1:
        return (x + y) % 2, zero
    z = np.zeros(nn, dtype=np.int8)
    for i in range(nn >> 1):
        ii = 2 * i
        if (x[ii] or x[ii + 1]) and (y[ii] or y[ii + 1]):
            z[ii] = (x[ii] + y[ii]) % 2
            z[ii + 1] = (x[ii + 1] + y[ii + 1]) % 2
            if z[ii] == 0 and z[ii + 1] == 0:
                z[ii + 1] = 1
                if x[ii] != x[ii + 1]:
                    z[ii] = 1
            return (x + z) % 2, (y + z) % 2
    for i in range(nn >> 1):
        ii = 2 * i
        if (x[ii] or x[ii + 1]) and not (y[ii] or y[ii + 1]):
            if x[ii] == x[ii + 1]:
                z[ii + 1] = 1
            else:
                z[ii + 1] = x[ii]
                z[ii] = x[ii + 1]
            break
    for i in range(nn >> 1):
        ii = 2 * i
        if not (x[ii] or x[ii + 1]) and (y[ii] or y[ii + 1]):
            if y[ii] == y[ii + 1]:
                z[ii + 1] = 1
            else:
                z[ii + 1] = y[ii]
                z[ii] = y[ii + 1]
            break
    return (x + z) % 2, (y + z) % 2


def symplectic_matrix(index: int, n: int) -> np.ndarray:
    """Element `index` of Sp(2n, 2); rows are images, bits interleaved x0 z0 x1 z1..."""
    nn = 2 * n
    s = (1 << nn) - 1
    k = (index % s) + 1
    index //= s

    f1 = np.array([(k >> j) & 1 for j in range(nn)], dtype=np.int8)
    e1 = np.zeros(nn, dtype=np.int8)
    e1[0] = 1
    t0, t1 = _find_transvection(e1, f1)

    bits = [(index >> j) & 1 for j in range(nn - 1)]
    index >>= nn - 1

    eprime = e1.copy()
    for j in range(2, nn):
        eprime[j] = bits[j - 1]
    h0 = _transvect(_transvect(eprime, t0), t1)
    if bits[0] == 1:
        f1 = np.zeros(nn, dtype=np.int8)

    if n == 1:
        g = np.identity(2, dtype=np.int8)
    else:
        sub = symplectic_matrix(index, n - 1)
        g = np.zeros((nn, nn), dtype=np.int8)
        g[:2, :2] = np.identity(2, dtype=np.int8)
        g[2:, 2:] = sub
    for k_vec in (t0, t1, h0, f1):
        g = _transvect_rows(g, k_vec)
    return g


def is_symplectic(g: np.ndarray) -> bool:
    nn = g.shape[0]
    omega = np.zeros((nn, nn), dtype=np.int8)
    for i in range(nn >> 1):
        omega[2 * i, 2 * i + 1] = 1
        omega[2 * i + 1, 2 * i] = 1
    return np.array_equal((g @ omega @ g.T) % 2, omega)


def _iter_bits(mask: int):
    while mask:
        lsb = mask & -mask
        yield lsb.bit_length() - 1
        mask ^= lsb


_INVERSE = {"S": "SDG", "SDG": "S"}


def synthesize_tableau(
    n: int, x_images: list[tuple[int, int, int]], z_images: list[tuple[int, int, int]]
) -> list[CliffordGate]:
    """Gate list realizing the Clifford with the given generator images.

    Each image is a bit-packed (x, z, phase) triple: x_images[i] is the image
    of X_i, z_images[i] of Z_i.  Reduction conjugates the tableau to the
    identity, so the circuit is the reversed list of inverted ops.
    """
    st = StabilizerState.__new__(StabilizerState)
    st.n = n
    st.xs = [r[0] for r in x_images] + [r[0] for r in z_images]
    st.zs = [r[1] for r in x_images] + [r[1] for r in z_images]
    st.ph = [r[2] for r in x_images] + [r[2] for r in z_images]

    ops: list[CliffordGate] = []

    def emit(kind, *targets):
        g = gate(kind, *targets)
        st.apply(g)
        ops.append(g)

    for i in range(n):
        suffix = ~((1 << i) - 1)
        # destabilizer row i -> X_i
        if st.xs[i] & suffix == 0:
            j = next(_iter_bits(st.zs[i] & suffix))
            emit("H", j)
        if not (st.xs[i] >> i) & 1:
            j = next(_iter_bits(st.xs[i] & suffix))
            emit("CX", i, j)
            emit("CX", j, i)
            emit("CX", i, j)
        for j in _iter_bits(st.xs[i] >> (i + 1)):
            emit("CX", i, j + i + 1)
        if (st.zs[i] >> i) & 1:
            emit("S", i)
        for j in _iter_bits(st.zs[i] >> (i + 1)):
            emit("CZ", i, j + i + 1)
        assert st.xs[i] == 1 << i and st.zs[i] == 0

        # stabilizer row i -> Z_i, keeping X_i intact
        srow = n + i
        for j in _iter_bits((st.xs[srow] | st.zs[srow]) >> (i + 1)):
            q = j + i + 1
            if (st.xs[srow] >> q) & 1:
                if (st.zs[srow] >> q) & 1:
                    emit("S", q)
                emit("H", q)
        for j in _iter_bits(st.zs[srow] >> (i + 1)):
            emit("CX", j + i + 1, i)
        if (st.xs[srow] >> i) & 1:
            emit("H", i)
            emit("S", i)
            emit("H", i)
        assert st.xs[srow] == 0 and st.zs[srow] == 1 << i

    for i in range(n):
        if st.ph[i]:
            assert st.ph[i] == 2
            emit("Z", i)
        if st.ph[n + i]:
            assert st.ph[n + i] == 2
            emit("X", i)

    return [gate(_INVERSE.get(g.kind, g.kind), *g.targets) for g in reversed(ops)]


def random_clifford_tableau(n: int, seed_or_rng):
    """Uniform (x_images, z_images) for an n-qubit Clifford."""
    rng = make_rng(seed_or_rng)
    index = rng.randrange(symplectic_group_order(n))
    signs = rng.getrandbits(2 * n)
    g = symplectic_matrix(index, n)
    x_images, z_images = [], []
    for i in range(2 * n):
        x = z = 0
        for q in range(n):
            x |= int(g[i, 2 * q]) << q
            z |= int(g[i, 2 * q + 1]) << q
        ph = ((x & z).bit_count() + 2 * ((signs >> i) & 1)) & 3
        if i % 2 == 0:
            x_images.append((x, z, ph))
        else:
            z_images.append((x, z, ph))
    return x_images, z_images


def random_clifford(n: int, target_size: int, seed_or_rng) -> CliffordCircuit:
    """Uniformly random Clifford, padded or truncated to an exact gate count."""
    if n < 1:
        raise ClinrError("need at least one qubit")
    if target_size < 0:
        raise ClinrError("target size must be non-negative")
    rng = make_rng(seed_or_rng)
    x_images, z_images = random_clifford_tableau(n, rng)
    gates = synthesize_tableau(n, x_images, z_images)

    if len(gates) > target_size:
        gates = gates[:target_size]
    else:
        gap = target_size - len(gates)
        if gap % 2 == 1 and gates:
            gates.pop()
        q = 0
        while len(gates) + 1 < target_size:
            gates += [gate("X", q), gate("X", q)]
            q = (q + 1) % n
        if len(gates) < target_size:
            gates.append(gate("X", q))
    return CliffordCircuit(n, gates)
