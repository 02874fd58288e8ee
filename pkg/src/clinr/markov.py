"""Markov-chain performance estimator.

Tracks a probability vector through each prepare/verify/inject block: entry 0
is "no error", entry 1 "undetected error", and entry k+2 "detection at check
k" (length r+2).  Detected mass converts into expected restarts, undetected
mass into the logical error rate.  Sequential blocks chain through the
injection error: a block's incoming error joins at the injection step because
input-rail errors are invisible to the checks.  A parent's preparation error
absorbs the whole chain of its children plus the Bell-prep cost, with the
children's expected gate count setting the idle exposure.

The error-parameter formulas are the bulk estimates for the reference gadget
implementation; they use the average split of a subcircuit into s'/2 single
and s'/2 two-qubit gates, 1.5n two-qubit gates per check, and coarse idle
counts.  The Monte Carlo engine counts all of these exactly, which is why the
two estimators are compared on no-idle configurations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRegimeError, DivergentRestartError, RegimeError
from .noise import NoiseModel
from .simulator import EstimateResult
from .tree import DEFAULT_CONSTANTS, CliNRTree, ImplConstants


def rsp_vector(p_p: float, r: int) -> np.ndarray:
    """Fresh vector after preparation: no-error and undetected-error mass only."""
    if not 0.0 <= p_p <= 1.0:
        raise RegimeError("preparation error rate must be in [0, 1]")
    vec = np.zeros(r + 2)
    vec[0] = 1.0 - p_p
    vec[1] = p_p
    return vec


def step_check(vec: np.ndarray, k: int, p_de: float, p_ue: float) -> np.ndarray:
    """Propagate through check k: errors are caught, missed, or introduced."""
    if p_de < 0 or p_ue < 0 or p_de + p_ue > 1:
        raise RegimeError("check error rates must satisfy p_de + p_ue <= 1")
    if k + 2 >= len(vec):
        raise RegimeError(f"check index {k} out of range for vector of length {len(vec)}")
    out = vec.copy()
    out[0] = vec[0] * (1.0 - p_de - p_ue)
    out[1] = vec[0] * p_ue + vec[1] / 2.0
    out[k + 2] = vec[k + 2] + vec[0] * p_de + vec[1] / 2.0
    return out


def step_injection(vec: np.ndarray, p_i: float) -> np.ndarray:
    """Injection errors convert no-error mass into undetected-error mass."""
    if not 0.0 <= p_i <= 1.0:
        raise RegimeError("injection error rate must be in [0, 1]")
    out = vec.copy()
    out[0] = vec[0] * (1.0 - p_i)
    out[1] = vec[1] + vec[0] * p_i
    return out


def logical_rate(vec: np.ndarray) -> float:
    """Conditional on not restarting: undetected / (no-error + undetected)."""
    mass = vec[0] + vec[1]
    if mass <= 0:
        raise DegenerateRegimeError("no conditioning mass left in the vector")
    return float(vec[1] / mass)


def restart_expectations(vec: np.ndarray) -> list[float]:
    """Expected restart count attributed to each check."""
    p_res = float(vec[2:].sum())
    if p_res == 0.0:
        return [0.0] * (len(vec) - 2)
    if p_res >= 1.0:
        raise DivergentRestartError("restart probability reached 1")
    boost = 1.0 / (1.0 - p_res) - 1.0
    return [float(v) / p_res * boost for v in vec[2:]]


def expected_gates(
    vec: np.ndarray,
    g_p: float,
    g_c: float,
    g_i: float,
    r: int,
    literal_restart_cost: bool = False,
) -> float:
    """One full pass plus the re-executed prefix for every expected restart.

    A restart at check k re-runs the preparation and the k completed checks.
    ``literal_restart_cost`` switches to pricing the prefix as (1+k) copies of
    the preparation block, for auditing against the coarser reading.
    """
    total = g_p + r * g_c + g_i
    for k, m_restart in enumerate(restart_expectations(vec)):
        prefix = g_p + k * (g_p if literal_restart_cost else g_c)
        total += prefix * m_restart
    return float(total)


@dataclass(frozen=True)
class ErrorParams:
    p_p: float
    p_de: float
    p_ue: float
    p_i: float
    g_p: float
    g_c: float
    g_i: float
    g_idle: float


def _clip(rate: float) -> float:
    return min(max(rate, 0.0), 1.0)


def leaf_prep_rate(noise: NoiseModel, n: int, size: int) -> float:
    """Bulk preparation error of a leaf: Bell pairs plus an s'-gate subcircuit."""
    if size < 0:
        raise RegimeError("subcircuit size cannot be negative")
    p2, p1, pidle = noise.p2, noise.p1, noise.p_idle
    survive = (1 - p2) ** (size / 2 + n)
    survive *= (1 - p1) ** (size / 2 + 2 * n)
    survive *= (1 - pidle) ** (size * n / 3)
    return _clip(1.0 - survive)


def upper_prep_rate(noise: NoiseModel, n: int, child_error: float, s_hat: float) -> float:
    """Preparation error of an internal vertex: Bell prep plus its children."""
    if s_hat < 0:
        raise RegimeError("expected child gate count cannot be negative")
    survive = (1 - child_error) * (1 - noise.p2) ** n
    survive *= (1 - noise.p1) ** (2 * n)
    survive *= (1 - noise.p_idle) ** s_hat
    return _clip(1.0 - survive)


def check_rates(noise: NoiseModel, n: int) -> tuple[float, float]:
    """Detectable and undetectable error rates of one stabilizer measurement.

    Of the 15 two-qubit faults one is harmless, eight flip the ancilla and six
    do not; the two ancilla Hadamards each contribute two of three single
    faults, and the readout itself can flip.
    """
    p2, p1, pmeas = noise.p2, noise.p1, noise.p_meas
    p_de = 1 - (1 - 8 * p2 / 15) ** (2 * n / 3) * (1 - 2 * p1 / 3) ** 2 * (1 - pmeas)
    p_ue = 1 - (1 - 6 * p2 / 15) ** (2 * n / 3)
    return _clip(p_de), _clip(p_ue)


def idle_exposure(n: int, size: float, r: int, vec: np.ndarray) -> float:
    """Expected idle-gate count seen by the input rails while a block runs."""
    per_check = 4.5 * n * n - 3 * n
    base = size * n / 3
    total = base + r * per_check
    for k, m_restart in enumerate(restart_expectations(vec)):
        total += (base + k * per_check) * m_restart
    return float(total)


def injection_rate(
    noise: NoiseModel, n: int, prior_error: float, g_idle: float | None
) -> float:
    """Injection error including the incoming chain error and idle exposure.

    ``g_idle=None`` is the first block under a parent: its resource is timed
    to be ready, so the input rails do not idle.
    """
    survive = (1 - prior_error) * (1 - noise.p2) ** n * (1 - noise.p1) ** (4 * n)
    if g_idle is not None:
        if g_idle < 0:
            raise RegimeError("idle exposure cannot be negative")
        survive *= (1 - noise.p_idle) ** g_idle
    return _clip(1.0 - survive)


def error_params(
    context: str,
    noise: NoiseModel,
    n: int,
    size: float,
    r: int,
    p_log_in: float = 0.0,
    detection_vector: np.ndarray | None = None,
    constants: ImplConstants = DEFAULT_CONSTANTS,
) -> ErrorParams:
    """Bundle of block error parameters; context is 'leaf' or 'upper'.

    ``size`` is the subcircuit size for leaves and the expected child gate
    count for internal vertices.  ``detection_vector`` supplies restart
    statistics for the idle estimate; None marks the first block under a
    parent (no input idling).
    """
    if context == "leaf":
        p_p = leaf_prep_rate(noise, n, int(size))
        g_p = constants.a_p * n + size
    elif context == "upper":
        p_p = upper_prep_rate(noise, n, p_log_in, size)
        g_p = constants.a_p * n + size
    else:
        raise RegimeError(f"unknown context {context!r}")
    p_de, p_ue = check_rates(noise, n)
    g_idle = 0.0
    if detection_vector is not None:
        g_idle = idle_exposure(n, size, r, detection_vector)
        p_i = injection_rate(noise, n, 0.0, g_idle)
    else:
        p_i = injection_rate(noise, n, 0.0, None)
    return ErrorParams(
        p_p=p_p,
        p_de=p_de,
        p_ue=p_ue,
        p_i=p_i,
        g_p=g_p,
        g_c=constants.a_v * n + constants.b_v,
        g_i=constants.a_i * n,
        g_idle=g_idle,
    )


def estimate_tree(
    tree: CliNRTree,
    n: int,
    noise: NoiseModel,
    constants: ImplConstants = DEFAULT_CONSTANTS,
    literal_restart_cost: bool = False,
) -> EstimateResult:
    """Walk the tree depth-first, chaining block vectors into (p_log, omega)."""
    report = tree.validate()
    if report:
        raise RegimeError("tree invalid: " + "; ".join(report))
    k = constants
    p_de, p_ue = check_rates(noise, n)

    def block(level: int, index: int, prior_error: float, first: bool):
        v = tree.vertex(level, index)
        if v.children:
            child_error = 0.0
            s_hat = 0.0
            for i, c in enumerate(v.children):
                child_error, g_child = block(level + 1, c, child_error, i == 0)
                s_hat += g_child
            p_p = upper_prep_rate(noise, n, child_error, s_hat)
            size_for_idle = s_hat
            g_p = k.a_p * n + s_hat
        else:
            p_p = leaf_prep_rate(noise, n, v.s)
            size_for_idle = float(v.s)
            g_p = k.a_p * n + v.s
        vec = rsp_vector(p_p, v.r)
        for ck in range(v.r):
            vec = step_check(vec, ck, p_de, p_ue)
        if first:
            p_i = injection_rate(noise, n, prior_error, None)
        else:
            p_i = injection_rate(
                noise, n, prior_error, idle_exposure(n, size_for_idle, v.r, vec)
            )
        vec = step_injection(vec, p_i)
        g_tot = expected_gates(
            vec, g_p, k.a_v * n + k.b_v, k.a_i * n, v.r,
            literal_restart_cost=literal_restart_cost,
        )
        return logical_rate(vec), g_tot

    chain_error = 0.0
    total_gates = 0.0
    for i, c in enumerate(tree.root.children):
        chain_error, g_child = block(1, c, chain_error, i == 0)
        total_gates += g_child
    s = tree.root.s
    return EstimateResult(
        p_log=chain_error,
        p_log_err=0.0,
        omega_time=total_gates / s if s else 0.0,
        omega_space=((2 * tree.depth + 1) * n + 1) / n,
        shots=0,
        circuits=0,
        provenance="markov",
    )
