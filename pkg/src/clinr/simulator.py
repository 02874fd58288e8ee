"""Monte Carlo engine and the exact tableau executor for compiled programs.

The Monte Carlo engine is a Pauli-frame simulation: the ideal state is never
represented, only the error frame (two bit-packed integers over the physical
register).  Frames are exact for Clifford circuits under Pauli noise.  Control
flow follows the blocks: a firing check jumps back to its vertex's RSP block,
clears the frame on the rails that the restarted subtree owns, and keeps
counting executed operations.  Stabilizers are drawn fresh on every attempt
unless the program was compiled with fixed ones.

Destructive measurements clear the measured qubit's frame (the X part has
been read into the outcome, the Z part is unobservable on a measured qubit)
and leave the rail re-armed in |0> for reuse.  The check gadget's trailing
reset is bundled into the measurement and is neither executed nor counted,
matching the per-check census of two singles, one measurement, and one
two-qubit gate per support qubit.

Idle noise: execution is strictly sequential, one operation per tick; every
qubit active during the block and not in the operation's support accrues one
idle opportunity per tick.  A qubit is active from the first block that
touches it through the last (input rails from the start of the program,
output rails through the end).  Classical corrections take no tick.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .circuit import CliffordGate
from .compiler import CliNRProgram
from .errors import DimensionError
from .noise import NoiseModel
from .pauli import PauliOperator
from .rng import derive_seed, make_rng
from .stabilizer import StabilizerGroupView, StabilizerState


@dataclass
class ShotResult:
    logical_error: bool
    executed_gates: int
    restarts_per_check: Counter
    residual_frame: PauliOperator
    aborted: bool = False


@dataclass
class EstimateResult:
    p_log: float
    p_log_err: float
    omega_time: float
    omega_space: float
    shots: int
    circuits: int
    provenance: str
    abort_rate: float = 0.0


def judge_logical(frame: PauliOperator, stabs: StabilizerGroupView) -> bool:
    """True iff the frame acts non-trivially: it anticommutes with a generator."""
    if frame.n != stabs.n:
        raise DimensionError("frame and stabilizer group have different widths")
    return any(not frame.commutes_with(g) for g in stabs.generators)


# ---------------------------------------------------------------------------
# runtime compilation

_H, _SLIKE, _PAULI, _CX, _CZ, _CY, _M, _R, _MCORR = range(9)

_CODE_OF = {
    "H": _H,
    "S": _SLIKE,
    "SDG": _SLIKE,
    "X": _PAULI,
    "Y": _PAULI,
    "Z": _PAULI,
    "CX": _CX,
    "CZ": _CZ,
    "CY": _CY,
    "M": _M,
    "R": _R,
}

# fault class per opcode: 0 none-by-default, 1 single-qubit, 2 two-qubit, 3 flip
_FAULT_CLASS = {
    _H: 1,
    _SLIKE: 1,
    _PAULI: 1,
    _CX: 2,
    _CZ: 2,
    _CY: 2,
    _M: 3,
    _R: 1,
    _MCORR: 3,
}


class _RBlock:
    __slots__ = (
        "kind",
        "ops",
        "counted",
        "vertex",
        "check_index",
        "restart_target",
        "keep_mask",
        "gens",
        "fixed",
        "ancilla",
        "active_mask",
        "active_count",
        "rail_list",
    )


def _compile_runtime(program: CliNRProgram):
    cached = getattr(program, "_runtime", None)
    if cached is not None:
        return cached

    total = program.total_qubits
    first_touch = {}
    last_touch = {}

    def touch(q, bi):
        first_touch.setdefault(q, bi)
        last_touch[q] = bi

    rblocks = []
    for bi, b in enumerate(program.blocks):
        rb = _RBlock()
        rb.kind = b.kind
        rb.vertex = b.vertex
        rb.check_index = b.check_index
        rb.restart_target = b.restart_target
        rb.keep_mask = ~b.reset_mask
        rb.ancilla = b.ancilla
        rb.fixed = None
        rb.gens = None
        ops = []
        if b.kind == "CHECK":
            rb.gens = [(g.x, g.z) for g in b.group]
            if b.fixed_stabilizer is not None:
                rb.fixed = (b.fixed_stabilizer.x, b.fixed_stabilizer.z)
            touch(b.ancilla, bi)
            for g in b.group:
                for q in g.support():
                    touch(q, bi)
            rb.counted = 0  # accounted per executed gadget
        elif b.kind == "RSI":
            corr = {}
            for i, q in enumerate(b.input_rails):
                corr[q] = (b.z_corrections[i].x, b.z_corrections[i].z)
            for i, q in enumerate(b.bridge_rails):
                corr[q] = (b.x_corrections[i].x, b.x_corrections[i].z)
            for g in b.gates:
                for q in g.targets:
                    touch(q, bi)
                if g.kind == "M":
                    cx, cz = corr[g.targets[0]]
                    ops.append((_MCORR, g.targets[0], cx, cz))
                else:
                    ops.append((_CODE_OF[g.kind],) + g.targets)
            for q in b.output_rails:
                touch(q, bi)
            rb.counted = len(b.gates) + program.n  # classical corrections count
        else:
            for g in b.gates:
                for q in g.targets:
                    touch(q, bi)
                ops.append((_CODE_OF[g.kind],) + g.targets)
            rb.counted = len(b.gates)
        rb.ops = ops
        rblocks.append(rb)

    for q in program.input_rails:
        first_touch[q] = 0
    last = len(program.blocks) - 1
    for q in program.output_rails:
        last_touch[q] = last

    for bi, rb in enumerate(rblocks):
        mask = 0
        for q in range(total):
            if first_touch.get(q, total + 1) <= bi <= last_touch.get(q, -1):
                mask |= 1 << q
        rb.active_mask = mask
        rb.active_count = mask.bit_count()
        rb.rail_list = [q for q in range(total) if (mask >> q) & 1]

    gens_out = []
    for g in program.output_group.generators:
        x = z = 0
        for i, q in enumerate(program.output_rails):
            x |= ((g.x >> i) & 1) << q
            z |= ((g.z >> i) & 1) << q
        gens_out.append((x, z))

    runtime = (rblocks, gens_out)
    program._runtime = runtime
    return runtime


def _nth_set_bit(mask: int, k: int) -> int:
    while k:
        mask &= mask - 1
        k -= 1
    return (mask & -mask).bit_length() - 1


def run_shot(
    program: CliNRProgram,
    noise: NoiseModel,
    rng,
    restart_cap: int = 10_000,
    detector_override=None,
    inject_after_block: dict[int, tuple[int, int]] | None = None,
) -> ShotResult:
    """One Monte Carlo shot: frame propagation, restarts, and judgment.

    ``detector_override(vertex, k, rng)`` may force or suppress detections in
    tests; ``inject_after_block`` XORs a deliberate (x, z) frame in after the
    first execution of a block.
    """
    rblocks, gens_out = _compile_runtime(program)
    rng = make_rng(rng)
    rnd = rng.random
    randrange = rng.randrange
    getrandbits = rng.getrandbits
    p1, p2, pmeas, pidle = noise.p1, noise.p2, noise.p_meas, noise.p_idle

    idle_on = pidle > 0.0
    if idle_on:
        idle_log = math.log1p(-pidle)
        idle_acc = 0
        idle_next = 1 + int(math.log(1.0 - rnd()) / idle_log)

    fx = 0
    fz = 0
    executed = 0
    restarts: Counter = Counter()
    attempts = [0] * len(rblocks)
    visited = [False] * len(rblocks)
    n_blocks = len(rblocks)
    pc = 0
    aborted = False

    while pc < n_blocks:
        rb = rblocks[pc]
        kind = rb.kind
        if idle_on:
            active_mask = rb.active_mask
            active_count = rb.active_count

        if kind == "CHECK":
            # draw the stabilizer for this attempt
            if rb.fixed is not None:
                sx, sz = rb.fixed
            else:
                subset = getrandbits(len(rb.gens))
                sx = sz = 0
                for gi, (gxm, gzm) in enumerate(rb.gens):
                    if (subset >> gi) & 1:
                        sx ^= gxm
                        sz ^= gzm
            anc = rb.ancilla
            manc = 1 << anc
            support = sx | sz
            # H on the ancilla
            for _ in range(1):
                pass
            gadget_two = 0
            # --- H anc ---
            a_bit = fx & manc
            b_bit = fz & manc
            if bool(a_bit) != bool(b_bit):
                fx ^= manc
                fz ^= manc
            if p1 and rnd() < p1:
                k = randrange(3)
                if k != 2:
                    fx ^= manc
                if k != 0:
                    fz ^= manc
            if idle_on:
                idle_acc += active_count - 1
                while idle_acc >= idle_next:
                    off = idle_acc - idle_next
                    q = _nth_set_bit(active_mask & ~manc, off % (active_count - 1))
                    k = randrange(3)
                    if k != 2:
                        fx ^= 1 << q
                    if k != 0:
                        fz ^= 1 << q
                    idle_next += 1 + int(math.log(1.0 - rnd()) / idle_log)
            # --- controlled Paulis ---
            m = support
            while m:
                lsb = m & -m
                m ^= lsb
                q = lsb.bit_length() - 1
                xb = (sx >> q) & 1
                zb = (sz >> q) & 1
                mq = 1 << q
                # conjugate the frame through the controlled Pauli
                if xb and zb:  # CY = SDG(t) CX S(t)
                    if fx & mq:
                        fz ^= mq
                    if fx & manc:
                        fx ^= mq
                    if fz & mq:
                        fz ^= manc
                    if fx & mq:
                        fz ^= mq
                elif xb:  # CX anc -> q
                    if fx & manc:
                        fx ^= mq
                    if fz & mq:
                        fz ^= manc
                else:  # CZ
                    if fx & manc:
                        fz ^= mq
                    if fx & mq:
                        fz ^= manc
                gadget_two += 1
                if p2 and rnd() < p2:
                    k = randrange(15) + 1
                    if k & 1:
                        fx ^= manc
                    if k & 2:
                        fz ^= manc
                    if k & 4:
                        fx ^= mq
                    if k & 8:
                        fz ^= mq
                if idle_on:
                    idle_acc += active_count - 2
                    while idle_acc >= idle_next:
                        pool = active_mask & ~(manc | mq)
                        off = idle_acc - idle_next
                        q2 = _nth_set_bit(pool, off % (active_count - 2))
                        k = randrange(3)
                        if k != 2:
                            fx ^= 1 << q2
                        if k != 0:
                            fz ^= 1 << q2
                        idle_next += 1 + int(math.log(1.0 - rnd()) / idle_log)
            # --- H anc ---
            a_bit = fx & manc
            b_bit = fz & manc
            if bool(a_bit) != bool(b_bit):
                fx ^= manc
                fz ^= manc
            if p1 and rnd() < p1:
                k = randrange(3)
                if k != 2:
                    fx ^= manc
                if k != 0:
                    fz ^= manc
            if idle_on:
                idle_acc += active_count - 1
                while idle_acc >= idle_next:
                    off = idle_acc - idle_next
                    q = _nth_set_bit(active_mask & ~manc, off % (active_count - 1))
                    k = randrange(3)
                    if k != 2:
                        fx ^= 1 << q
                    if k != 0:
                        fz ^= 1 << q
                    idle_next += 1 + int(math.log(1.0 - rnd()) / idle_log)
            # --- measure the ancilla ---
            detector = 1 if fx & manc else 0
            if pmeas and rnd() < pmeas:
                detector ^= 1
            fx &= ~manc
            fz &= ~manc
            executed += gadget_two + 3
            if detector_override is not None:
                forced = detector_override(rb.vertex, rb.check_index, rng)
                if forced is not None:
                    detector = 1 if forced else 0
            if detector:
                restarts[(rb.vertex, rb.check_index)] += 1
                target = rb.restart_target
                attempts[target] += 1
                if attempts[target] >= restart_cap:
                    aborted = True
                    break
                fx &= rb.keep_mask
                fz &= rb.keep_mask
                pc = target
                continue
            pc += 1
            continue

        # streamed blocks: RSP / PLAIN / RSI
        for op in rb.ops:
            code = op[0]
            if code == _CX:
                a = 1 << op[1]
                b = 1 << op[2]
                if fx & a:
                    fx ^= b
                if fz & b:
                    fz ^= a
                if p2 and rnd() < p2:
                    k = randrange(15) + 1
                    if k & 1:
                        fx ^= a
                    if k & 2:
                        fz ^= a
                    if k & 4:
                        fx ^= b
                    if k & 8:
                        fz ^= b
                sup = 2
            elif code == _H:
                m = 1 << op[1]
                if bool(fx & m) != bool(fz & m):
                    fx ^= m
                    fz ^= m
                if p1 and rnd() < p1:
                    k = randrange(3)
                    if k != 2:
                        fx ^= m
                    if k != 0:
                        fz ^= m
                sup = 1
            elif code == _MCORR:
                m = 1 << op[1]
                delta = 1 if fx & m else 0
                if pmeas and rnd() < pmeas:
                    delta ^= 1
                fx &= ~m
                fz &= ~m
                if delta:
                    fx ^= op[2]
                    fz ^= op[3]
                sup = 1
            elif code == _R:
                m = 1 << op[1]
                fx &= ~m
                fz &= ~m
                if p1 and rnd() < p1:
                    k = randrange(3)
                    if k != 2:
                        fx ^= m
                    if k != 0:
                        fz ^= m
                sup = 1
            elif code == _SLIKE:
                m = 1 << op[1]
                if fx & m:
                    fz ^= m
                if p1 and rnd() < p1:
                    k = randrange(3)
                    if k != 2:
                        fx ^= m
                    if k != 0:
                        fz ^= m
                sup = 1
            elif code == _CZ:
                a = 1 << op[1]
                b = 1 << op[2]
                if fx & a:
                    fz ^= b
                if fx & b:
                    fz ^= a
                if p2 and rnd() < p2:
                    k = randrange(15) + 1
                    if k & 1:
                        fx ^= a
                    if k & 2:
                        fz ^= a
                    if k & 4:
                        fx ^= b
                    if k & 8:
                        fz ^= b
                sup = 2
            elif code == _CY:
                a = 1 << op[1]
                b = 1 << op[2]
                if fx & b:
                    fz ^= b
                if fx & a:
                    fx ^= b
                if fz & b:
                    fz ^= a
                if fx & b:
                    fz ^= b
                if p2 and rnd() < p2:
                    k = randrange(15) + 1
                    if k & 1:
                        fx ^= a
                    if k & 2:
                        fz ^= a
                    if k & 4:
                        fx ^= b
                    if k & 8:
                        fz ^= b
                sup = 2
            elif code == _M:
                m = 1 << op[1]
                fx &= ~m
                fz &= ~m
                sup = 1
            else:  # _PAULI: no frame action, still a noisy tick
                m = 1 << op[1]
                if p1 and rnd() < p1:
                    k = randrange(3)
                    if k != 2:
                        fx ^= m
                    if k != 0:
                        fz ^= m
                sup = 1
            if idle_on:
                idle_acc += active_count - sup
                while idle_acc >= idle_next:
                    if code in (_CX, _CZ, _CY):
                        pool = active_mask & ~((1 << op[1]) | (1 << op[2]))
                    else:
                        pool = active_mask & ~(1 << op[1])
                    off = idle_acc - idle_next
                    q2 = _nth_set_bit(pool, off % (active_count - sup))
                    k = randrange(3)
                    if k != 2:
                        fx ^= 1 << q2
                    if k != 0:
                        fz ^= 1 << q2
                    idle_next += 1 + int(math.log(1.0 - rnd()) / idle_log)
        executed += rb.counted
        if inject_after_block and not visited[pc] and pc in inject_after_block:
            ix, iz = inject_after_block[pc]
            fx ^= ix
            fz ^= iz
        visited[pc] = True
        pc += 1

    if aborted:
        return ShotResult(
            logical_error=False,
            executed_gates=executed,
            restarts_per_check=restarts,
            residual_frame=PauliOperator.identity(program.n),
            aborted=True,
        )

    logical = False
    for gx, gz in gens_out:
        if ((fx & gz).bit_count() + (fz & gx).bit_count()) & 1:
            logical = True
            break
    residual = PauliOperator(
        program.total_qubits, fx, fz, (fx & fz).bit_count() & 3
    ).restricted_to(program.output_rails)
    return ShotResult(
        logical_error=logical,
        executed_gates=executed,
        restarts_per_check=restarts,
        residual_frame=residual,
        aborted=False,
    )


def estimate(
    program: CliNRProgram,
    noise: NoiseModel,
    shots: int,
    seed_or_rng,
    restart_cap: int = 10_000,
) -> EstimateResult:
    """Aggregate shots into a logical error rate and gate overhead."""
    if shots < 1:
        raise ValueError("need at least one shot")
    s = program.source_circuit.size()
    if isinstance(seed_or_rng, int):
        rngs = (make_rng(derive_seed(seed_or_rng, "shot", i)) for i in range(shots))
    else:
        base = make_rng(seed_or_rng)
        rngs = (base for _ in range(shots))
    failures = 0
    aborted = 0
    total_gates = 0
    valid = 0
    for rng in rngs:
        shot = run_shot(program, noise, rng, restart_cap=restart_cap)
        if shot.aborted:
            aborted += 1
            continue
        valid += 1
        failures += shot.logical_error
        total_gates += shot.executed_gates
    p_log = failures / valid if valid else 0.0
    err = math.sqrt(p_log * (1 - p_log) / valid) if valid else 0.0
    omega_time = (total_gates / valid) / s if valid and s else 0.0
    return EstimateResult(
        p_log=p_log,
        p_log_err=err,
        omega_time=omega_time,
        omega_space=program.total_qubits / program.n,
        shots=shots,
        circuits=1,
        provenance="monte-carlo",
        abort_rate=aborted / shots,
    )


# ---------------------------------------------------------------------------
# exact tableau execution (noiseless oracle)


def run_ideal(program: CliNRProgram, rng) -> StabilizerState:
    """Execute the program exactly on a tableau; checks must never fire."""
    rng = make_rng(rng)
    st = StabilizerState(program.total_qubits)
    for b in program.blocks:
        if b.kind == "CHECK":
            if b.fixed_stabilizer is not None:
                stab = b.fixed_stabilizer
            else:
                subset = rng.getrandbits(len(b.group))
                stab = PauliOperator.identity(program.total_qubits)
                for gi, g in enumerate(b.group):
                    if (subset >> gi) & 1:
                        stab = stab * g
            anc = b.ancilla
            st.apply(CliffordGate("H", (anc,)))
            for q in stab.support():
                xb = (stab.x >> q) & 1
                zb = (stab.z >> q) & 1
                kind = "CY" if (xb and zb) else ("CX" if xb else "CZ")
                st.apply(CliffordGate(kind, (anc, q)))
            st.apply(CliffordGate("H", (anc,)))
            outcome = st.measure_z(anc, rng)
            if outcome:
                st.apply(CliffordGate("X", (anc,)))
            detector = outcome ^ (1 if (not stab.is_identity and stab.sign < 0) else 0)
            if detector:
                raise AssertionError("check fired during an ideal execution")
        elif b.kind == "RSI":
            deltas = {}
            for g in b.gates:
                if g.kind == "M":
                    q = g.targets[0]
                    out = st.measure_z(q, rng)
                    if out:
                        st.apply(CliffordGate("X", (q,)))
                    deltas[q] = out
                else:
                    st.apply(g)
            for i, q in enumerate(b.input_rails):
                if deltas[q]:
                    st.apply_pauli(b.z_corrections[i])
            for i, q in enumerate(b.bridge_rails):
                if deltas[q]:
                    st.apply_pauli(b.x_corrections[i])
        else:
            for g in b.gates:
                if g.kind == "M":
                    out = st.measure_z(g.targets[0], rng)
                    if out:
                        st.apply(CliffordGate("X", (g.targets[0],)))
                elif g.kind == "R":
                    st.reset_z(g.targets[0], rng)
                else:
                    st.apply(g)
    return st


def ideal_output_matches(program: CliNRProgram, rng) -> bool:
    """Does a noiseless run leave the output rails in the direct circuit's state?"""
    st = run_ideal(program, rng)
    total = program.total_qubits
    for g in program.output_group.generators:
        x = z = 0
        for i, q in enumerate(program.output_rails):
            x |= ((g.x >> i) & 1) << q
            z |= ((g.z >> i) & 1) << q
        mapped = PauliOperator(total, x, z, g.phase)
        if not st.stabilizes(mapped):
            return False
    return True
