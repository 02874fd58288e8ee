"""Exception types shared across the package."""


class ClinrError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(ClinrError):
    """Qubit counts of two objects do not match."""


class UnsupportedGateError(ClinrError):
    """A gate is not valid in this context (e.g. measurement in a unitary circuit)."""


class LayoutError(ClinrError):
    """Qubit rails passed to a gadget builder are inconsistent."""


class TreeAddressError(ClinrError):
    """A vertex address (level, index) does not exist in the tree."""


class PartitionError(ClinrError):
    """Circuit size does not match the tree it is being partitioned against."""


class RegimeError(ClinrError):
    """Parameters are outside the regime where a formula is defined."""


class RegimeUnreachableError(RegimeError):
    """The capacity function is zero: np is too large for tree grouping."""


class DegenerateRegimeError(ClinrError):
    """A Markov vector has no conditioning mass left."""


class DivergentRestartError(ClinrError):
    """The restart probability is 1; the expected gate count diverges."""
