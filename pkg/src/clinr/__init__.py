"""Recursive Clifford noise reduction toolkit."""

from .circuit import CliffordCircuit, CliffordGate, conjugate_pauli, gate
from .pauli import PauliOperator
from .stabilizer import (
    StabilizerGroupView,
    StabilizerState,
    output_stabilizers,
    random_group_element,
    resource_stabilizers,
)

__all__ = [
    "CliffordCircuit",
    "CliffordGate",
    "PauliOperator",
    "StabilizerGroupView",
    "StabilizerState",
    "conjugate_pauli",
    "gate",
    "output_stabilizers",
    "random_group_element",
    "resource_stabilizers",
]
