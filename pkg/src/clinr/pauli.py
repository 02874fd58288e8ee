"""Bit-packed n-qubit Pauli operators.

An operator is stored as ``i^phase * prod_q X_q^{x_q} Z_q^{z_q}`` where ``x``
and ``z`` are integers used as bit vectors (bit q = qubit q) and ``phase`` is
an exponent of i, kept mod 4.  With this convention Y_q is ``i * X_q Z_q``
(phase 1), so a Pauli written with k Y letters carries phase ``k + 2m`` and
its overall sign is ``i^(phase - k) = +-1``.  All decisions downstream
(detection, logical-error judgment) depend only on that sign or on commutation
parity, so imaginary overall phases never need to be exposed.

Multiplication is exact: moving Z^{z1} past X^{x2} contributes
``(-1)^{|z1 & x2|}``, i.e. ``phase += 2 * popcount(z1 & x2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


@dataclass(frozen=True)
class PauliOperator:
    """A signed Pauli on ``n`` qubits with bit-packed X/Z parts."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0  # exponent of i, mod 4

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise DimensionError(f"bits outside the {self.n}-qubit register")
        object.__setattr__(self, "phase", self.phase & 3)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        """Pauli with one non-identity letter, e.g. single(3, 1, 'Y')."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} outside register of size {n}")
        xb, zb = _LETTER_TO_BITS[letter]
        return cls(n, xb << qubit, zb << qubit, phase=(xb & zb))

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse labels like 'XIZ', '+YY' or '-Z'.  Leftmost letter is qubit 0."""
        sign = 1
        if label and label[0] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        x = z = 0
        ys = 0
        for q, letter in enumerate(label):
            xb, zb = _LETTER_TO_BITS[letter]
            x |= xb << q
            z |= zb << q
            ys += xb & zb
        phase = (ys + (2 if sign < 0 else 0)) & 3
        return cls(len(label), x, z, phase)

    def to_label(self) -> str:
        letters = "".join(
            _BITS_TO_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]
            for q in range(self.n)
        )
        return ("-" if self.sign < 0 else "+") + letters

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def sign(self) -> int:
        """Overall sign when the operator is written with I/X/Y/Z letters.

        Raises if the stored phase is imaginary relative to the letter form,
        which cannot happen for operators produced by this package.
        """
        k = (self.phase - self.y_count) & 3
        if k == 0:
            return 1
        if k == 2:
            return -1
        raise ValueError("operator carries an imaginary phase")

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def support(self) -> list[int]:
        out = []
        m = self.x | self.z
        while m:
            lsb = m & -m
            out.append(lsb.bit_length() - 1)
            m ^= lsb
        return out

    def commutes_with(self, other: "PauliOperator") -> bool:
        """Symplectic-form parity: commute iff |x1&z2| + |z1&x2| is even."""
        if self.n != other.n:
            raise DimensionError("Pauli operators live on different registers")
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise DimensionError("Pauli operators live on different registers")
        phase = (self.phase + other.phase + 2 * (self.z & other.x).bit_count()) & 3
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    def restricted_to(self, qubits: list[int]) -> "PauliOperator":
        """Project onto a sub-register; qubit i of the result is qubits[i]."""
        x = z = 0
        ys = 0
        for i, q in enumerate(qubits):
            xb = (self.x >> q) & 1
            zb = (self.z >> q) & 1
            x |= xb << i
            z |= zb << i
            ys += xb & zb
        # Keep the letter-form sign of the projected part positive; restriction
        # is only ever used for frames, whose sign is not tracked.
        return PauliOperator(len(qubits), x, z, ys & 3)

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_label()!r})"


def symplectic_product(x1: int, z1: int, x2: int, z2: int) -> int:
    """Commutation parity of two bit-packed Paulis (0 commute, 1 anticommute)."""
    return ((x1 & z2).bit_count() + (z1 & x2).bit_count()) & 1
