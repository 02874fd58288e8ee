"""Closed-form logical-error and gate-overhead bounds.

All bounds share one helper for the single-block term so that the degenerate
reductions (a two-vertex tree versus the single-block formula) are bitwise
identical.  Error bounds above 1 carry no information; they are clamped to 1
and flagged as vacuous rather than silently returned.

Two printed-formula corrections are applied (and exposed nowhere else): the
leaf base case uses the error rate 1-(1-p)^s rather than the survival
probability, and the recursive step keeps the n in (1-p)^(A_P n) for
consistency with the single-block bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RegimeError
from .tree import DEFAULT_CONSTANTS, CliNRTree, ImplConstants, threshold_r


@dataclass(frozen=True)
class BoundValue:
    value: float
    vacuous: bool = False
    precondition_violated: bool = False

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class BoundInputs:
    p: float
    n: int
    r: int
    s_hat: float = 0.0
    p_log_c: float = 0.0
    constants: ImplConstants = DEFAULT_CONSTANTS

    @property
    def m(self) -> float:
        """One prepare-plus-verify iteration: A_P n + r (A_V n + B_V)."""
        k = self.constants
        return k.a_p * self.n + self.r * (k.a_v * self.n + k.b_v)


def g(p: float, x: float) -> float:
    """g_p(x) = 1 - (1-p)^x, the error rate of x independent operations."""
    if not 0.0 <= p <= 1.0 or x < 0:
        raise RegimeError("need p in [0,1] and x >= 0")
    if p == 1.0:
        return 1.0 if x > 0 else 0.0
    return -math.expm1(x * math.log1p(-p))


def _single_block_term(
    p: float, n: int, r: int, m: float, p_log_c: float, k: ImplConstants
) -> float:
    """Per-block logical error bound with explicit m (may be a level max)."""
    denom = (1 - p) ** m * (1 - p_log_c)
    if denom <= 0:
        return math.inf
    num = (1 - (1 - p) ** (k.a_p * n) * (1 - p_log_c)) * 2.0**-r
    num += 2 * g(p, k.a_v * n + k.b_v)
    return num / denom + g(p, k.a_i * n)


def _clamp(value: float, precondition_violated: bool = False) -> BoundValue:
    if value > 1 or math.isinf(value) or math.isnan(value):
        return BoundValue(1.0, vacuous=True, precondition_violated=precondition_violated)
    return BoundValue(value, precondition_violated=precondition_violated)


def clinr1_error_bound(inputs: BoundInputs) -> BoundValue:
    """Single-block logical error rate bound."""
    return _clamp(
        _single_block_term(
            inputs.p, inputs.n, inputs.r, inputs.m, inputs.p_log_c, inputs.constants
        )
    )


def clinr1_gate_bound(inputs: BoundInputs) -> float:
    """Single-block gate overhead bound: restarts inflate the prepare/verify part."""
    if inputs.s_hat <= 0:
        raise RegimeError("expected size must be positive")
    p, m, k = inputs.p, inputs.m, inputs.constants
    denom = (1 - p) ** m * (1 - inputs.p_log_c)
    if denom <= 0:
        return math.inf
    return ((m + inputs.s_hat) / denom + k.a_i * inputs.n) / inputs.s_hat


def _level_stats(tree: CliNRTree, level: int):
    """(t_bar into this level, min r, max r) for the blocks at `level`."""
    t_bar = max(len(v.children) for v in tree.levels[level - 1])
    rs = [v.r for v in tree.levels[level]]
    return t_bar, min(rs), max(rs)


def _fold_levels(tree: CliNRTree, p: float, n: int, k: ImplConstants):
    """Bottom-up content-error bounds p_b[level] for blocks at each level."""
    depth = tree.depth
    if depth < 1:
        raise RegimeError("bounds need a tree of depth at least 1")
    for lev, vertices in enumerate(tree.levels[:-1]):
        if any(not v.children for v in vertices):
            raise RegimeError("bound fold assumes all leaves at the last level")
    p_b = g(p, max(tree.level_sizes(depth)))
    folded = {depth: p_b}
    for lev in range(depth - 1, 0, -1):
        if p_b >= 1:
            break
        t_bar, r_low, r_high = _level_stats(tree, lev + 1)
        m_bar = k.a_p * n + r_high * (k.a_v * n + k.b_v)
        p_b = t_bar * _single_block_term(p, n, r_low, m_bar, p_b, k)
        folded[lev] = p_b
    return folded


def recursive_error_bound(
    tree: CliNRTree,
    p: float,
    n: int,
    constants: ImplConstants = DEFAULT_CONSTANTS,
) -> BoundValue:
    """Tree-wide logical error rate: fold the per-level block bound upward."""
    k = constants
    folded = _fold_levels(tree, p, n, k)
    p_b1 = folded.get(1)
    if p_b1 is None or p_b1 >= 1:
        return BoundValue(1.0, vacuous=True)
    t1 = len(tree.levels[1])
    _, r_low, r_high = _level_stats(tree, 1)
    m_bar = k.a_p * n + r_high * (k.a_v * n + k.b_v)
    return _clamp(t1 * _single_block_term(p, n, r_low, m_bar, p_b1, k))


def recursive_gate_bound(
    tree: CliNRTree,
    p: float,
    n: int,
    constants: ImplConstants = DEFAULT_CONSTANTS,
) -> float:
    """Tree-wide gate overhead bound, folding expected block sizes upward."""
    k = constants
    depth = tree.depth
    folded = _fold_levels(tree, p, n, k)
    s_hat = float(max(tree.level_sizes(depth)))
    for lev in range(depth - 1, 0, -1):
        p_b = folded.get(lev + 1, 1.0)
        if p_b >= 1:
            return math.inf
        t_bar, _, r_high = _level_stats(tree, lev + 1)
        m_bar = k.a_p * n + r_high * (k.a_v * n + k.b_v)
        denom = (1 - p) ** m_bar * (1 - p_b)
        s_hat = t_bar * ((m_bar + s_hat) / denom + k.a_i * n)
    p_b1 = folded.get(1, 1.0)
    if p_b1 >= 1:
        return math.inf
    t1_bar, _, r_high = _level_stats(tree, 1)
    m_bar = k.a_p * n + r_high * (k.a_v * n + k.b_v)
    denom = (1 - p) ** m_bar * (1 - p_b1)
    s = tree.root.s
    return t1_bar * ((m_bar + s_hat) / denom + k.a_i * n) / s


def bounded_error_bound(
    s: int,
    p: float,
    n: int,
    depth: int,
    constants: ImplConstants = DEFAULT_CONSTANTS,
) -> BoundValue:
    """Closed form for the uniformly bounded construction: s p^(D+1) (alpha n)^D."""
    k = constants
    r = threshold_r(p, n, k)
    cost = k.a_p * n + 2 * r * (k.a_v * n + k.b_v) + k.a_i * n
    violated = not cost < 1 / (2 * p)
    base = (9 * (4 * k.a_v * n + 2 * k.b_v) + 3 * k.a_i * n) / 2
    value = s * p ** (depth + 1) * base**depth
    return _clamp(value, precondition_violated=violated)


def bounded_gate_bound(depth: int) -> float:
    """Gate overhead of the uniformly bounded construction: 2 * 12^D."""
    return 2.0 * 12.0**depth


@dataclass(frozen=True)
class TheoremParameters:
    depth: int
    omega_cap: float
    qubit_cap: int
    alpha_with_n: float
    alpha_plain: float


def theorem_parameters(
    s: int, p: float, n: int, constants: ImplConstants = DEFAULT_CONSTANTS
) -> TheoremParameters:
    """Depth and overhead caps guaranteeing a vanishing error rate as np -> 0."""
    k = constants
    sp = s * p
    depth = max(1, math.ceil(math.log2(sp) + 1)) if sp > 0 else 1
    omega_cap = 24.0 * math.ceil(sp**4)
    return TheoremParameters(
        depth=depth,
        omega_cap=omega_cap,
        qubit_cap=(2 * depth + 1) * n + 1,
        alpha_with_n=(9 * (4 * k.a_v * n + 2 * k.b_v) + 3 * k.a_i * n) / 2,
        alpha_plain=(9 * (4 * k.a_v + 2 * k.b_v) + 3 * k.a_i) / 2,
    )
