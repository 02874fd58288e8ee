"""Circuit-level Pauli noise model and fault sampling."""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import CliffordGate
from .pauli import PauliOperator
from .rng import make_rng

MEASUREMENT_FLIP = "flip"


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing rates per operation class plus a per-tick idle rate.

    The standard ratios are p for two-qubit gates, p/10 for single-qubit
    operations including measurements, and p/1000 (or zero) for idling.
    """

    p2: float
    p1: float
    p_meas: float
    p_idle: float = 0.0

    def __post_init__(self):
        for name in ("p2", "p1", "p_meas", "p_idle"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {rate}")

    @classmethod
    def standard(cls, p: float, idle: bool = True) -> "NoiseModel":
        return cls(p2=p, p1=p / 10, p_meas=p / 10, p_idle=p / 1000 if idle else 0.0)

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls(0.0, 0.0, 0.0, 0.0)


_ONE_QUBIT_PAULIS = ((1, 0), (1, 1), (0, 1))  # X, Y, Z


def sample_fault(gate: CliffordGate, noise: NoiseModel, rng):
    """Fault after one operation: a Pauli on its support, a flip, or None.

    Single-qubit operations draw X/Y/Z uniformly at rate p1 (resets too),
    two-qubit gates draw one of the 15 non-trivial pairs at rate p2, and
    measurements flip their outcome at rate p_meas.
    """
    rng = make_rng(rng)
    if gate.kind == "M":
        return MEASUREMENT_FLIP if rng.random() < noise.p_meas else None
    if gate.is_two_qubit:
        if rng.random() >= noise.p2:
            return None
        k = rng.randrange(15) + 1
        a, b = gate.targets
        hi = max(a, b) + 1
        x = ((k & 1) << a) | (((k >> 2) & 1) << b)
        z = (((k >> 1) & 1) << a) | (((k >> 3) & 1) << b)
        return PauliOperator(hi, x, z, (x & z).bit_count() & 3)
    if rng.random() >= noise.p1:
        return None
    xb, zb = _ONE_QUBIT_PAULIS[rng.randrange(3)]
    q = gate.targets[0]
    return PauliOperator(q + 1, xb << q, zb << q, (xb & zb) & 3)
