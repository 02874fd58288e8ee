"""Stabilizer groups, resource-state generators, and a CHP tableau simulator.

The tableau simulator is the package's exact oracle: it is used to check that
compiled programs implement their input circuit noiselessly, and to verify
check gadgets and injection gadgets on small registers.  It deliberately
favours clarity over speed; the Monte Carlo engine never touches it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import CliffordCircuit, CliffordGate, conjugate_many
from .errors import ClinrError, DimensionError
from .pauli import PauliOperator, symplectic_product
from .rng import make_rng


@dataclass
class StabilizerGroupView:
    """Mutually commuting, independent generators of a stabilizer group."""

    n: int
    generators: list[PauliOperator]

    def validate(self) -> list[str]:
        problems = []
        for g in self.generators:
            if g.n != self.n:
                problems.append(f"generator {g} has wrong width")
        if len(self.generators) > self.n:
            problems.append("more generators than qubits")
        k = len(self.generators)
        for i in range(k):
            for j in range(i + 1, k):
                if not self.generators[i].commutes_with(self.generators[j]):
                    problems.append(f"generators {i} and {j} anticommute")
        if gf2_rank([(g.x, g.z) for g in self.generators], self.n) != k:
            problems.append("generators are not independent")
        return problems


def gf2_rank(rows: list[tuple[int, int]], n: int) -> int:
    """Rank over GF(2) of symplectic row vectors (x concatenated with z)."""
    vecs = [x | (z << n) for x, z in rows]
    rank = 0
    for col in range(2 * n):
        bit = 1 << col
        pivot = None
        for i in range(rank, len(vecs)):
            if vecs[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        vecs[rank], vecs[pivot] = vecs[pivot], vecs[rank]
        for i in range(len(vecs)):
            if i != rank and vecs[i] & bit:
                vecs[i] ^= vecs[rank]
        rank += 1
    return rank


def output_stabilizers(circuit: CliffordCircuit) -> StabilizerGroupView:
    """Generators U Z_i U^dagger of the state U|0...0>."""
    n = circuit.n
    zs = [PauliOperator.single(n, i, "Z") for i in range(n)]
    return StabilizerGroupView(n, conjugate_many(circuit, zs))


def resource_stabilizers(circuit: CliffordCircuit) -> StabilizerGroupView:
    """Generators of the 2n-qubit resource state (I (x) C) |Bell>^n.

    Qubit i is the bare half of pair i and qubit n+i is the primed half that
    carries the circuit.  Generator i is the conjugated X_i X_i' and generator
    n+i the conjugated Z_i Z_i'.
    """
    n = circuit.n
    shifted = CliffordCircuit(
        2 * n,
        [CliffordGate(g.kind, tuple(t + n for t in g.targets)) for g in circuit.gates],
    )
    bells = []
    for i in range(n):
        x = PauliOperator(2 * n, (1 << i) | (1 << (n + i)), 0)
        bells.append(x)
    for i in range(n):
        z = PauliOperator(2 * n, 0, (1 << i) | (1 << (n + i)))
        bells.append(z)
    return StabilizerGroupView(2 * n, conjugate_many(shifted, bells))


def random_group_element(group: StabilizerGroupView, seed_or_rng) -> PauliOperator:
    """Product of a uniformly random subset of the generators."""
    if not group.generators:
        raise ClinrError("cannot sample from an empty generator list")
    rng = make_rng(seed_or_rng)
    subset = rng.getrandbits(len(group.generators))
    acc = PauliOperator.identity(group.n)
    for i, g in enumerate(group.generators):
        if (subset >> i) & 1:
            acc = acc * g
    return acc


class StabilizerState:
    """Aaronson-Gottesman tableau for an n-qubit stabilizer state.

    Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers, each stored as
    bit-packed (x, z, phase) in the same convention as PauliOperator.
    """

    def __init__(self, n: int):
        if n < 1:
            raise DimensionError("need at least one qubit")
        self.n = n
        self.xs = [0] * (2 * n)
        self.zs = [0] * (2 * n)
        self.ph = [0] * (2 * n)
        for i in range(n):
            self.xs[i] = 1 << i          # destabilizer X_i
            self.zs[n + i] = 1 << i      # stabilizer Z_i

    def apply(self, g: CliffordGate):
        kind = g.kind
        if kind == "CY":
            c, t = g.targets
            self.apply(CliffordGate("SDG", (t,)))
            self.apply(CliffordGate("CX", (c, t)))
            self.apply(CliffordGate("S", (t,)))
            return
        xs, zs, ph = self.xs, self.zs, self.ph
        if kind in ("CX", "CZ"):
            a, b = g.targets
            ma, mb = 1 << a, 1 << b
            for r in range(2 * self.n):
                x, z = xs[r], zs[r]
                if kind == "CX":
                    if x & ma:
                        xs[r] = x ^ mb
                    if z & mb:
                        zs[r] = z ^ ma
                else:
                    if (x & ma) and (x & mb):
                        ph[r] = (ph[r] + 2) & 3
                    if x & ma:
                        zs[r] = zs[r] ^ mb
                    if x & mb:
                        zs[r] = zs[r] ^ ma
            return
        q = g.targets[0]
        m = 1 << q
        for r in range(2 * self.n):
            x, z = xs[r] & m, zs[r] & m
            if kind == "H":
                if x and z:
                    ph[r] = (ph[r] + 2) & 3
                xs[r] = (xs[r] & ~m) | z
                zs[r] = (zs[r] & ~m) | x
            elif kind == "S":
                if x:
                    ph[r] = (ph[r] + 1) & 3
                    zs[r] ^= m
            elif kind == "SDG":
                if x:
                    ph[r] = (ph[r] + 3) & 3
                    zs[r] ^= m
            elif kind == "X":
                if z:
                    ph[r] = (ph[r] + 2) & 3
            elif kind == "Y":
                if bool(x) != bool(z):
                    ph[r] = (ph[r] + 2) & 3
            elif kind == "Z":
                if x:
                    ph[r] = (ph[r] + 2) & 3
            else:
                raise ClinrError(f"gate {kind} is not unitary; use measure/reset")

    def run(self, circuit: CliffordCircuit):
        for g in circuit.gates:
            self.apply(g)
        return self

    def apply_pauli(self, p: PauliOperator):
        """Left-multiply the state by a Pauli (sign-free: flips row phases)."""
        for r in range(2 * self.n):
            if symplectic_product(self.xs[r], self.zs[r], p.x, p.z):
                self.ph[r] = (self.ph[r] + 2) & 3

    def _rowmult(self, h: int, i: int):
        """row_h <- row_i * row_h with exact phase."""
        self.ph[h] = (
            self.ph[i] + self.ph[h] + 2 * (self.zs[i] & self.xs[h]).bit_count()
        ) & 3
        self.xs[h] ^= self.xs[i]
        self.zs[h] ^= self.zs[i]

    def measure_z(self, q: int, rng=None) -> int:
        """Measure Z on qubit q, collapsing the state.  Returns 0 or 1."""
        n = self.n
        m = 1 << q
        pivot = None
        for r in range(n, 2 * n):
            if self.xs[r] & m:
                pivot = r
                break
        if pivot is not None:
            outcome = make_rng(rng).getrandbits(1)
            for r in range(2 * n):
                if r != pivot and (self.xs[r] & m):
                    self._rowmult(r, pivot)
            d = pivot - n
            self.xs[d], self.zs[d], self.ph[d] = (
                self.xs[pivot],
                self.zs[pivot],
                self.ph[pivot],
            )
            self.xs[pivot], self.zs[pivot] = 0, m
            self.ph[pivot] = 2 * outcome
            return outcome
        # Deterministic outcome: accumulate stabilizer rows selected by the
        # destabilizers that anticommute with Z_q.
        x = z = ph = 0
        for i in range(n):
            if self.xs[i] & m:
                ph = (self.ph[n + i] + ph + 2 * (self.zs[n + i] & x).bit_count()) & 3
                x ^= self.xs[n + i]
                z ^= self.zs[n + i]
        return 1 if ph == 2 else 0

    def reset_z(self, q: int, rng=None):
        if self.measure_z(q, rng):
            self.apply(CliffordGate("X", (q,)))

    def expectation(self, p: PauliOperator) -> int:
        """<P> for stabilizer states: +1, -1, or 0."""
        if p.n != self.n:
            raise DimensionError("Pauli width does not match state")
        x = z = ph = 0
        for i in range(self.n):
            if symplectic_product(self.xs[i], self.zs[i], p.x, p.z):
                s = self.n + i
                ph = (self.ph[s] + ph + 2 * (self.zs[s] & x).bit_count()) & 3
                x ^= self.xs[s]
                z ^= self.zs[s]
        if x != p.x or z != p.z:
            return 0
        return 1 if ph == p.phase else -1

    def stabilizes(self, p: PauliOperator) -> bool:
        return self.expectation(p) == 1
