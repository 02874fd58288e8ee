"""Compiles an input circuit plus a tree into an executable block program.

Layout: the program owns (2D+1)n + 1 physical qubits, organized as 2D+1
registers of width n plus one shared check ancilla (the highest index).
Register 0 initially holds the input state; the remaining 2D registers form a
pool from which each vertex draws its two resource registers.  Teleportation
lands each vertex's output on the register that carried its circuit, so the
roles rotate through the pool while the total never exceeds the budget; the
registers freed by injection measurements are reused by the next sibling.

Block kinds:
  RSP    Bell-pair preparation (R, H, CX per pair), plus the subcircuit gates
         for leaf vertices.  Internal vertices' subcircuits are the child
         blocks that follow.
  CHECK  one stabilizer measurement of the vertex's resource group; the
         concrete gadget is synthesized at run time from a fresh random group
         element unless the program was compiled with fixed stabilizers.
  RSI    transversal Bell measurement consuming the resource state, with the
         Pauli correction applied as a classical frame update.
  PLAIN  bare gates (direct implementations).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import CliffordCircuit, CliffordGate, gate
from .errors import ClinrError, LayoutError, PartitionError
from .pauli import PauliOperator
from .rng import derive_seed, make_rng
from .stabilizer import (
    StabilizerGroupView,
    output_stabilizers,
    random_group_element,
    resource_stabilizers,
)
from .tree import CliNRTree, root_only_tree, two_vertex_tree


def qubit_count(tree: CliNRTree, n: int) -> int:
    """Physical qubits of the compiled program: (2D+1)n + 1."""
    return (2 * tree.depth + 1) * n + 1


def partition(circuit: CliffordCircuit, tree: CliNRTree) -> dict[tuple[int, int], CliffordCircuit]:
    """Contiguous subcircuits per vertex; concatenating any level restores C."""
    report = tree.validate()
    if report:
        raise PartitionError("tree invalid: " + "; ".join(report))
    if circuit.size() != tree.root.s:
        raise PartitionError(
            f"circuit size {circuit.size()} != root size {tree.root.s}"
        )
    if not circuit.is_unitary:
        raise PartitionError("input circuits must be unitary")
    ranges: dict[tuple[int, int], tuple[int, int]] = {(0, 0): (0, circuit.size())}
    for lev in range(len(tree.levels) - 1):
        for j, v in enumerate(tree.levels[lev]):
            start = ranges[(lev, j)][0]
            for c in v.children:
                child = tree.levels[lev + 1][c]
                ranges[(lev + 1, c)] = (start, start + child.s)
                start += child.s
    return {
        key: circuit.slice_gates(lo, hi) for key, (lo, hi) in ranges.items()
    }


@dataclass
class InjectionGadget:
    """Bell-measurement gate list plus the classical correction rule.

    ``x_corrections[i]`` is folded into the output frame when the bridge-rail
    measurement of pair i flips, ``z_corrections[i]`` when the input-rail
    measurement flips.  For a resource built from circuit C these are
    C X_i C^dag and C Z_i C^dag on the output half.
    """

    n: int
    gates: list[CliffordGate]
    input_rails: list[int]
    bridge_rails: list[int]
    output_rails: list[int]
    x_corrections: list[PauliOperator]
    z_corrections: list[PauliOperator]

    @property
    def counted_operations(self) -> int:
        # n two-qubit + n H + 2n measurements + n classical corrections
        return 5 * self.n


def build_injection_gadget(
    n: int,
    input_rails: list[int],
    resource_rails: list[int],
    x_corrections: list[PauliOperator] | None = None,
    z_corrections: list[PauliOperator] | None = None,
) -> InjectionGadget:
    if len(input_rails) != n or len(resource_rails) != 2 * n:
        raise LayoutError("need n input rails and 2n resource rails")
    if len(set(input_rails) | set(resource_rails)) != 3 * n:
        raise LayoutError("rails must be disjoint")
    bridge = resource_rails[:n]
    output = resource_rails[n:]
    if x_corrections is None:
        x_corrections = [PauliOperator.single(n, i, "X") for i in range(n)]
    if z_corrections is None:
        z_corrections = [PauliOperator.single(n, i, "Z") for i in range(n)]
    gates = [gate("CX", input_rails[i], bridge[i]) for i in range(n)]
    gates += [gate("H", input_rails[i]) for i in range(n)]
    gates += [gate("M", input_rails[i]) for i in range(n)]
    gates += [gate("M", bridge[i]) for i in range(n)]
    return InjectionGadget(
        n=n,
        gates=gates,
        input_rails=list(input_rails),
        bridge_rails=bridge,
        output_rails=output,
        x_corrections=x_corrections,
        z_corrections=z_corrections,
    )


def build_check_gadget(
    stabilizer: PauliOperator,
    ancilla: int,
    rails: list[int] | None = None,
) -> list[CliffordGate]:
    """Measurement gadget for one stabilizer: H, controlled Paulis, H, M, R.

    The two-qubit gate count equals the stabilizer's support weight; the
    single-qubit count is two plus one measurement (the trailing R re-arms
    the ancilla and is bundled with the measurement in the op census).
    """
    if stabilizer.is_identity:
        raise ClinrError("cannot build a check for the identity stabilizer")
    if rails is None:
        rails = list(range(stabilizer.n))
    if ancilla in rails:
        raise LayoutError("ancilla collides with a target rail")
    gates = [gate("H", ancilla)]
    for q in stabilizer.support():
        xb = (stabilizer.x >> q) & 1
        zb = (stabilizer.z >> q) & 1
        kind = "CY" if (xb and zb) else ("CX" if xb else "CZ")
        gates.append(gate(kind, ancilla, rails[q]))
    gates.append(gate("H", ancilla))
    gates.append(gate("M", ancilla))
    gates.append(gate("R", ancilla))
    return gates


@dataclass
class Block:
    kind: str                       # RSP | CHECK | RSI | PLAIN
    vertex: tuple[int, int] | None = None
    gates: list[CliffordGate] = field(default_factory=list)
    restart_target: int | None = None
    check_index: int | None = None
    # CHECK payload
    group: list[PauliOperator] | None = None       # phys-mapped generators
    fixed_stabilizer: PauliOperator | None = None  # when not resampling
    ancilla: int | None = None
    reset_mask: int = 0
    # RSI payload
    input_rails: list[int] | None = None
    bridge_rails: list[int] | None = None
    output_rails: list[int] | None = None
    x_corrections: list[PauliOperator] | None = None
    z_corrections: list[PauliOperator] | None = None

    def gate_count(self) -> int:
        return len(self.gates)


@dataclass
class CliNRProgram:
    n: int
    total_qubits: int
    blocks: list[Block]
    tree: CliNRTree | None
    input_rails: list[int]
    output_rails: list[int]
    check_ancilla: int | None
    source_circuit: CliffordCircuit
    output_group: StabilizerGroupView      # on the n logical qubits
    resample_stabilizers: bool = True
    seed: int = 0

    def ideal_pass_gate_count(self) -> int:
        """Counted ops in one detection-free pass (checks at expected size)."""
        total = 0
        for b in self.blocks:
            if b.kind == "CHECK":
                total += 1.5 * self.n + 3
            elif b.kind == "RSI":
                total += len(b.gates) + self.n  # classical corrections count
            else:
                total += len(b.gates)
        return total

    def dump_text(self) -> str:
        lines = [
            f"program n={self.n} qubits={self.total_qubits} "
            f"ancilla={'-' if self.check_ancilla is None else self.check_ancilla}",
            f"input {','.join(map(str, self.input_rails))}",
            f"output {','.join(map(str, self.output_rails))}",
        ]
        for idx, b in enumerate(self.blocks):
            head = f"block {idx} kind={b.kind}"
            if b.vertex is not None:
                head += f" vertex={b.vertex[0]},{b.vertex[1]}"
            if b.kind == "CHECK":
                head += f" k={b.check_index} restart={b.restart_target}"
                head += f" ancilla={b.ancilla} generators={len(b.group)}"
                if b.fixed_stabilizer is not None:
                    head += f" fixed={b.fixed_stabilizer.to_label()}"
            if b.kind == "RSI":
                head += (
                    f" in={','.join(map(str, b.input_rails))}"
                    f" bridge={','.join(map(str, b.bridge_rails))}"
                    f" out={','.join(map(str, b.output_rails))}"
                )
            lines.append(head)
            lines.extend(f"  {g}" for g in b.gates)
        return "\n".join(lines) + "\n"


def _map_pauli(p: PauliOperator, rails: list[int], total: int) -> PauliOperator:
    x = z = 0
    for i, q in enumerate(rails):
        x |= ((p.x >> i) & 1) << q
        z |= ((p.z >> i) & 1) << q
    return PauliOperator(total, x, z, p.phase)


def compile_direct(circuit: CliffordCircuit) -> CliNRProgram:
    """Direct implementation: the circuit itself, no ancillas."""
    rails = list(range(circuit.n))
    return CliNRProgram(
        n=circuit.n,
        total_qubits=circuit.n,
        blocks=[Block(kind="PLAIN", gates=list(circuit.gates))],
        tree=None,
        input_rails=rails,
        output_rails=rails,
        check_ancilla=None,
        source_circuit=circuit,
        output_group=output_stabilizers(circuit),
    )


def compile_program(
    circuit: CliffordCircuit,
    tree: CliNRTree,
    seed: int = 0,
    resample_stabilizers: bool = True,
) -> CliNRProgram:
    """Replace every vertex subcircuit with its prepare/verify/inject blocks."""
    pieces = partition(circuit, tree)
    n = circuit.n
    depth = tree.depth
    total = qubit_count(tree, n)
    ancilla = total - 1
    register = lambda k: list(range(k * n, (k + 1) * n))

    if depth == 0:
        blocks = [Block(kind="PLAIN", vertex=(0, 0), gates=list(circuit.gates))]
        return CliNRProgram(
            n=n,
            total_qubits=total,
            blocks=blocks,
            tree=tree,
            input_rails=register(0),
            output_rails=register(0),
            check_ancilla=ancilla,
            source_circuit=circuit,
            output_group=output_stabilizers(circuit),
            resample_stabilizers=resample_stabilizers,
            seed=seed,
        )

    blocks: list[Block] = []
    free = list(range(1, 2 * depth + 1))

    def reg_mask(k: int) -> int:
        return ((1 << n) - 1) << (k * n)

    def emit_vertex(level: int, index: int, input_reg: int) -> tuple[int, int]:
        """Returns (landing register, rail mask used by this subtree)."""
        v = tree.vertex(level, index)
        a_reg = free.pop(0)
        b_reg = free.pop(0)
        used_mask = reg_mask(a_reg) | reg_mask(b_reg) | (1 << ancilla)

        prep = []
        for i in range(n):
            a_q = a_reg * n + i
            b_q = b_reg * n + i
            prep += [gate("R", a_q), gate("H", a_q), gate("CX", a_q, b_q)]
        piece = pieces[(level, index)]
        if not v.children:
            prep += [
                CliffordGate(g.kind, tuple(b_reg * n + t for t in g.targets))
                for g in piece.gates
            ]
        rsp_index = len(blocks)
        blocks.append(Block(kind="RSP", vertex=(level, index), gates=prep))

        landing = b_reg
        for c in v.children:
            landing, child_mask = emit_vertex(level + 1, c, input_reg=landing)
            used_mask |= child_mask

        group = resource_stabilizers(piece)
        rails = register(a_reg) + register(landing)
        phys_group = [_map_pauli(g, rails, total) for g in group.generators]
        for k in range(v.r):
            fixed = None
            if not resample_stabilizers:
                rng = make_rng(derive_seed(seed, "stab", level, index, k))
                fixed = random_group_element(
                    StabilizerGroupView(total, phys_group), rng
                )
            blocks.append(
                Block(
                    kind="CHECK",
                    vertex=(level, index),
                    restart_target=rsp_index,
                    check_index=k,
                    group=phys_group,
                    fixed_stabilizer=fixed,
                    ancilla=ancilla,
                    reset_mask=used_mask,
                )
            )

        x_corr = [g.restricted_to(list(range(n, 2 * n))) for g in group.generators[:n]]
        z_corr = [g.restricted_to(list(range(n, 2 * n))) for g in group.generators[n:]]
        gadget = build_injection_gadget(
            n,
            register(input_reg),
            register(a_reg) + register(landing),
            x_corrections=[_map_pauli(p, register(landing), total) for p in x_corr],
            z_corrections=[_map_pauli(p, register(landing), total) for p in z_corr],
        )
        blocks.append(
            Block(
                kind="RSI",
                vertex=(level, index),
                gates=gadget.gates,
                input_rails=gadget.input_rails,
                bridge_rails=gadget.bridge_rails,
                output_rails=gadget.output_rails,
                x_corrections=gadget.x_corrections,
                z_corrections=gadget.z_corrections,
            )
        )
        free.append(input_reg)
        free.append(a_reg)
        free.sort()
        return landing, used_mask

    state_reg = 0
    for c in tree.root.children:
        state_reg, _ = emit_vertex(1, c, input_reg=state_reg)

    out_rails = register(state_reg)
    return CliNRProgram(
        n=n,
        total_qubits=total,
        blocks=blocks,
        tree=tree,
        input_rails=register(0),
        output_rails=out_rails,
        check_ancilla=ancilla,
        source_circuit=circuit,
        output_group=output_stabilizers(circuit),
        resample_stabilizers=resample_stabilizers,
        seed=seed,
    )


def compile_single_block(
    circuit: CliffordCircuit, r: int, seed: int = 0, resample_stabilizers: bool = True
) -> CliNRProgram:
    """The two-vertex scheme: one prepare/verify/inject pass, 3n + 1 qubits."""
    return compile_program(
        circuit,
        two_vertex_tree(circuit.size(), r),
        seed=seed,
        resample_stabilizers=resample_stabilizers,
    )


__all__ = [
    "Block",
    "CliNRProgram",
    "InjectionGadget",
    "build_check_gadget",
    "build_injection_gadget",
    "compile_direct",
    "compile_program",
    "compile_single_block",
    "partition",
    "qubit_count",
    "root_only_tree",
]
