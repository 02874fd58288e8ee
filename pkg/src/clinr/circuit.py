"""Clifford gates, circuits, and exact conjugation of Pauli operators.

The gate set is {H, S, SDG, X, Y, Z, CX, CZ, M, R} plus an internal CY used by
check gadgets (a controlled-Y counts as one two-qubit gate; under the hood it
conjugates like SDG(t), CX(c,t), S(t)).  M is a destructive Z measurement and
R resets a qubit to |0>; neither is unitary and neither counts toward circuit
size.

Conjugation updates operate on the storage form i^r X^x Z^z.  In this global
X-part-then-Z-part ordering CX needs no phase correction at all, H picks up
(-1) on Y, S maps X to Y (phase +1), and CZ picks up (-1) when both inputs
have an X component.  These rules are brute-force checked against 4x4 unitary
conjugation in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionError, UnsupportedGateError
from .pauli import PauliOperator

SINGLE_QUBIT_KINDS = ("H", "S", "SDG", "X", "Y", "Z", "M", "R")
TWO_QUBIT_KINDS = ("CX", "CZ", "CY")
NON_UNITARY_KINDS = ("M", "R")
GATE_KINDS = SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS


@dataclass(frozen=True)
class CliffordGate:
    kind: str
    targets: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise UnsupportedGateError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != want:
            raise UnsupportedGateError(
                f"{self.kind} takes {want} target(s), got {self.targets}"
            )
        if want == 2 and self.targets[0] == self.targets[1]:
            raise UnsupportedGateError(f"{self.kind} targets must be distinct")

    @property
    def is_unitary(self) -> bool:
        return self.kind not in NON_UNITARY_KINDS

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    def __str__(self) -> str:
        return " ".join([self.kind] + [str(t) for t in self.targets])


def gate(kind: str, *targets: int) -> CliffordGate:
    return CliffordGate(kind, tuple(targets))


@dataclass
class CliffordCircuit:
    """An ordered gate list over qubits 0..n-1."""

    n: int
    gates: list[CliffordGate] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: CliffordGate):
        if any(t >= self.n or t < 0 for t in g.targets):
            raise DimensionError(f"gate {g} outside register of size {self.n}")

    def append(self, g: CliffordGate | str, *targets: int) -> "CliffordCircuit":
        if isinstance(g, str):
            g = gate(g, *targets)
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates) -> "CliffordCircuit":
        for g in gates:
            self.append(g)
        return self

    def size(self) -> int:
        """Unitary gate count; measurements and resets are excluded."""
        return sum(1 for g in self.gates if g.is_unitary)

    @property
    def is_unitary(self) -> bool:
        return all(g.is_unitary for g in self.gates)

    def compose(self, other: "CliffordCircuit") -> "CliffordCircuit":
        if other.n != self.n:
            raise DimensionError("cannot concatenate circuits of different widths")
        return CliffordCircuit(self.n, self.gates + other.gates)

    def slice_gates(self, start: int, stop: int) -> "CliffordCircuit":
        return CliffordCircuit(self.n, self.gates[start:stop])

    def gate_census(self) -> tuple[int, int]:
        """(single-qubit unitary count, two-qubit count)."""
        one = sum(1 for g in self.gates if g.is_unitary and not g.is_two_qubit)
        two = sum(1 for g in self.gates if g.is_two_qubit)
        return one, two

    def to_text(self) -> str:
        lines = [f"qubits {self.n}"]
        lines += [str(g) for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliffordCircuit":
        n = None
        gates = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "qubits":
                if n is not None:
                    raise ValueError("duplicate qubits header")
                n = int(parts[1])
                continue
            if n is None:
                raise ValueError("missing 'qubits N' header")
            gates.append(gate(parts[0], *[int(t) for t in parts[1:]]))
        if n is None:
            raise ValueError("missing 'qubits N' header")
        return cls(n, gates)

    def __repr__(self) -> str:
        return f"CliffordCircuit(n={self.n}, gates={len(self.gates)})"


class BatchConjugator:
    """Conjugates many Paulis through a circuit at once.

    Column layout: for each qubit q, ``x[q]`` holds bit r = X-bit of row r.
    Phase exponents (mod 4) are kept in two bit-plane integers.  One gate is a
    handful of big-int operations regardless of the row count, which is what
    makes compile-time stabilizer computation cheap.
    """

    def __init__(self, n: int, rows: list[PauliOperator]):
        self.n = n
        self.k = len(rows)
        self.x = [0] * n
        self.z = [0] * n
        self.lo = 0
        self.hi = 0
        for r, p in enumerate(rows):
            if p.n != n:
                raise DimensionError("row width does not match conjugator width")
            bit = 1 << r
            for q in range(n):
                if (p.x >> q) & 1:
                    self.x[q] |= bit
                if (p.z >> q) & 1:
                    self.z[q] |= bit
            if p.phase & 1:
                self.lo |= bit
            if p.phase & 2:
                self.hi |= bit

    def _add1(self, mask: int):
        carry = self.lo & mask
        self.lo ^= mask
        self.hi ^= carry

    def _add2(self, mask: int):
        self.hi ^= mask

    def _add3(self, mask: int):
        carry = self.lo & mask
        self.lo ^= mask
        self.hi ^= carry ^ mask

    def apply(self, g: CliffordGate):
        kind = g.kind
        if kind == "H":
            q = g.targets[0]
            self._add2(self.x[q] & self.z[q])
            self.x[q], self.z[q] = self.z[q], self.x[q]
        elif kind == "S":
            q = g.targets[0]
            self._add1(self.x[q])
            self.z[q] ^= self.x[q]
        elif kind == "SDG":
            q = g.targets[0]
            self._add3(self.x[q])
            self.z[q] ^= self.x[q]
        elif kind == "X":
            self._add2(self.z[g.targets[0]])
        elif kind == "Y":
            q = g.targets[0]
            self._add2(self.x[q] ^ self.z[q])
        elif kind == "Z":
            self._add2(self.x[g.targets[0]])
        elif kind == "CX":
            c, t = g.targets
            self.x[t] ^= self.x[c]
            self.z[c] ^= self.z[t]
        elif kind == "CZ":
            a, b = g.targets
            self._add2(self.x[a] & self.x[b])
            self.z[a] ^= self.x[b]
            self.z[b] ^= self.x[a]
        elif kind == "CY":
            c, t = g.targets
            self.apply(gate("SDG", t))
            self.apply(gate("CX", c, t))
            self.apply(gate("S", t))
        else:
            raise UnsupportedGateError(f"cannot conjugate through non-unitary {kind}")

    def run(self, circuit: CliffordCircuit):
        for g in circuit.gates:
            self.apply(g)
        return self

    def row(self, r: int) -> PauliOperator:
        bit = 1 << r
        x = z = 0
        for q in range(self.n):
            if self.x[q] & bit:
                x |= 1 << q
            if self.z[q] & bit:
                z |= 1 << q
        phase = (1 if self.lo & bit else 0) | (2 if self.hi & bit else 0)
        return PauliOperator(self.n, x, z, phase)

    def rows(self) -> list[PauliOperator]:
        return [self.row(r) for r in range(self.k)]


def conjugate_pauli(circuit: CliffordCircuit, p: PauliOperator) -> PauliOperator:
    """Return U P U^dagger for the unitary implemented by the circuit."""
    if p.n != circuit.n:
        raise DimensionError(
            f"Pauli on {p.n} qubits, circuit on {circuit.n}"
        )
    if not circuit.is_unitary:
        raise UnsupportedGateError("circuit contains measurements or resets")
    return BatchConjugator(circuit.n, [p]).run(circuit).row(0)


def conjugate_many(circuit: CliffordCircuit, rows: list[PauliOperator]) -> list[PauliOperator]:
    if not circuit.is_unitary:
        raise UnsupportedGateError("circuit contains measurements or resets")
    return BatchConjugator(circuit.n, rows).run(circuit).rows()
