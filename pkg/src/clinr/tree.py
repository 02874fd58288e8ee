"""Ordered rooted trees that drive the recursive noise-reduction compiler.

A tree assigns every vertex a subcircuit size s and a check count r.  The
root carries the whole circuit (r = 0 by convention) and each internal
vertex's size is the sum of its children's.  The uniformly bounded builder
constructs the tree from the capacity function T(p, n) and check threshold
R(p, n), grouping leaves of size about 2/(3p) into batches of T per level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import RegimeError, RegimeUnreachableError, TreeAddressError


@dataclass(frozen=True)
class ImplConstants:
    """Gate-count coefficients of the three gadget families.

    Defaults reflect the reference gadget implementations: Bell-pair prep uses
    2n single plus n two-qubit ops (a_p = 3), a stabilizer measurement uses
    1.5n two-qubit ops in expectation plus two singles and a measurement
    (a_v = 1.5, b_v = 3), and injection uses n two-qubit plus 4n single ops
    or measurements (a_i = 5).
    """

    a_p: float = 3.0
    a_v: float = 1.5
    b_v: float = 3.0
    a_i: float = 5.0

    def __post_init__(self):
        if min(self.a_p, self.a_v, self.b_v, self.a_i) <= 0:
            raise ValueError("implementation constants must be positive")


DEFAULT_CONSTANTS = ImplConstants()


@dataclass
class TreeVertex:
    s: int
    r: int
    parent: int | None = None          # index within the previous level
    children: list[int] = field(default_factory=list)  # indices in next level


@dataclass
class CliNRTree:
    """Vertices stored level by level; levels[l][j] is vertex v(l, j)."""

    levels: list[list[TreeVertex]]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def root(self) -> TreeVertex:
        return self.levels[0][0]

    def vertex(self, level: int, index: int) -> TreeVertex:
        try:
            if level < 0 or index < 0:
                raise IndexError
            return self.levels[level][index]
        except IndexError:
            raise TreeAddressError(f"no vertex at level {level}, index {index}")

    def vertex_count(self) -> int:
        return sum(len(lv) for lv in self.levels)

    def validate(self) -> list[str]:
        """All violated invariants, with vertex addresses; empty iff valid."""
        problems = []
        if not self.levels or len(self.levels[0]) != 1:
            problems.append("tree must have exactly one root at level 0")
            return problems
        if self.root.r != 0:
            problems.append("root-check violation: r(v(0,0)) must be 0")
        for lev, vertices in enumerate(self.levels):
            expected_next = 0
            for j, v in enumerate(vertices):
                if v.s < 0 or v.r < 0:
                    problems.append(f"negative map value at v({lev},{j})")
                if lev > 0:
                    if v.parent is None:
                        problems.append(f"orphan vertex v({lev},{j})")
                    elif not (0 <= v.parent < len(self.levels[lev - 1])):
                        problems.append(f"dangling parent at v({lev},{j})")
                    elif j not in self.levels[lev - 1][v.parent].children:
                        problems.append(f"parent of v({lev},{j}) does not list it")
                if v.children:
                    if lev + 1 >= len(self.levels):
                        problems.append(f"children below the last level at v({lev},{j})")
                        continue
                    if v.children != list(
                        range(v.children[0], v.children[0] + len(v.children))
                    ) or v.children[0] != expected_next:
                        problems.append(
                            f"ordering violation: children of v({lev},{j}) are not "
                            "consecutive left-to-right"
                        )
                    expected_next = v.children[-1] + 1
                    total = sum(self.levels[lev + 1][c].s for c in v.children)
                    if total != v.s:
                        problems.append(
                            f"size-sum violation at v({lev},{j}): "
                            f"children sum {total} != {v.s}"
                        )
                elif lev < len(self.levels) - 1:
                    # A childless vertex above the last level is legal only if
                    # that level has no vertices left to own.
                    pass
            if lev + 1 < len(self.levels) and expected_next != len(self.levels[lev + 1]):
                problems.append(
                    f"level {lev + 1} has {len(self.levels[lev + 1])} vertices but "
                    f"parents at level {lev} claim {expected_next}"
                )
        return problems

    def level_sizes(self, level: int) -> list[int]:
        return [v.s for v in self.levels[level]]

    def subtree(self, level: int, index: int) -> "CliNRTree":
        """Tree rooted at v(level, index) with all descendants; new root r = 0."""
        self.vertex(level, index)
        new_levels: list[list[TreeVertex]] = []
        picked = [index]
        for lev in range(level, len(self.levels)):
            row = []
            next_picked = []
            remap = {}
            for new_j, old_j in enumerate(picked):
                old = self.levels[lev][old_j]
                row.append(TreeVertex(s=old.s, r=old.r, parent=None, children=[]))
                remap[old_j] = new_j
                next_picked.extend(old.children)
            if lev > level:
                # fix parent/children wiring against the previous new level
                offset = 0
                for pj, old_parent_j in enumerate(prev_picked):
                    kids = self.levels[lev - 1][old_parent_j].children
                    for k in kids:
                        row[offset].parent = pj
                        new_levels[-1][pj].children.append(offset)
                        offset += 1
            new_levels.append(row)
            prev_picked = picked
            picked = next_picked
            if not picked:
                break
        new_levels[0][0].r = 0
        return CliNRTree(new_levels)

    def to_text(self) -> str:
        lines = [f"clinr-tree depth={self.depth}"]
        for lev, vertices in enumerate(self.levels):
            for j, v in enumerate(vertices):
                parent = "-" if v.parent is None else str(v.parent)
                lines.append(f"vertex level={lev} index={j} parent={parent} s={v.s} r={v.r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliNRTree":
        levels: list[list[TreeVertex]] = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line or line.startswith("clinr-tree"):
                continue
            fields = dict(part.split("=", 1) for part in line.split()[1:])
            lev = int(fields["level"])
            parent = None if fields["parent"] == "-" else int(fields["parent"])
            while len(levels) <= lev:
                levels.append([])
            idx = len(levels[lev])
            if int(fields["index"]) != idx:
                raise ValueError("vertex indices must appear in order")
            levels[lev].append(TreeVertex(s=int(fields["s"]), r=int(fields["r"]), parent=parent))
            if parent is not None:
                levels[lev - 1][parent].children.append(idx)
        return cls(levels)

    def summary(self) -> str:
        counts = ", ".join(
            f"level {lev}: {len(vs)} vertices" for lev, vs in enumerate(self.levels)
        )
        return f"depth {self.depth}; {counts}; root size {self.root.s}"


def two_vertex_tree(s: int, r: int) -> CliNRTree:
    """The single-block scheme: a root and one leaf holding the whole circuit."""
    root = TreeVertex(s=s, r=0, children=[0])
    leaf = TreeVertex(s=s, r=r, parent=0)
    return CliNRTree([[root], [leaf]])


def root_only_tree(s: int) -> CliNRTree:
    return CliNRTree([[TreeVertex(s=s, r=0)]])


def split_sizes(s: int, parts: int) -> list[int]:
    """Even split; the first s mod parts entries get the ceiling."""
    big = math.ceil(s / parts)
    small = s // parts
    cut = s % parts
    return [big] * cut + [small] * (parts - cut)


def uniform_tree(s: int, depth: int, t1: int, children: int, r: int) -> CliNRTree:
    """Sweep-grid tree: t1 level-1 vertices, each with `children` leaves at depth 2."""
    if depth == 1:
        sizes = split_sizes(s, t1)
        root = TreeVertex(s=s, r=0, children=list(range(t1)))
        leaves = [TreeVertex(s=sz, r=r, parent=0) for sz in sizes]
        return CliNRTree([[root], leaves])
    if depth == 2:
        leaf_sizes = split_sizes(s, t1 * children)
        root = TreeVertex(s=s, r=0, children=list(range(t1)))
        mids, leaves = [], []
        for i in range(t1):
            kids = list(range(i * children, (i + 1) * children))
            mids.append(
                TreeVertex(s=sum(leaf_sizes[k] for k in kids), r=r, parent=0, children=kids)
            )
            leaves.extend(TreeVertex(s=leaf_sizes[k], r=r, parent=i) for k in kids)
        return CliNRTree([[root], mids, leaves])
    raise ValueError("uniform sweep trees support depth 1 or 2")


def capacity_t(p: float, n: int, constants: ImplConstants = DEFAULT_CONSTANTS) -> int:
    """Max children per vertex keeping the grouped error below 2/3.

    Zero means the regime is unreachable: np is too large for grouping.
    """
    if not 0 < p < 1 or n < 1:
        raise RegimeError("need p in (0,1) and n >= 1")
    k = constants
    denominator = (9 * (4 * k.a_v * n + 2 * k.b_v) + 3 * k.a_i * n) * p
    return int(2 / denominator)


def threshold_r(p: float, n: int, constants: ImplConstants = DEFAULT_CONSTANTS) -> int:
    """Check count matching the residual preparation error to the check error."""
    if not 0 < p < 1 or n < 1:
        raise RegimeError("need p in (0,1) and n >= 1")
    k = constants
    arg1 = p * k.a_p * n * (1 - 2 / 3) + 2 / 3
    arg2 = 2 * k.a_v * n * p
    if arg1 <= 0 or arg2 <= 0:
        raise RegimeError("logarithm argument must be positive")
    return math.ceil(math.log2(arg1) - math.log2(arg2))


def bounded_tree(
    s: int,
    p: float,
    n: int,
    depth: int,
    constants: ImplConstants = DEFAULT_CONSTANTS,
) -> CliNRTree:
    """Uniformly bounded tree: leaves of size about 2/(3p) grouped T at a time.

    When grouping collapses to a single vertex before level 1 the remaining
    levels become unary chains; the literal construction keeps them.
    """
    if depth < 1:
        raise RegimeError("depth must be at least 1")
    if s * p <= 1:
        raise RegimeError("bounded construction assumes s > 1/p")
    t_cap = capacity_t(p, n, constants)
    if t_cap < 1 and depth > 1:
        # Depth 1 never groups children, so T = 0 only blocks deeper trees.
        raise RegimeUnreachableError(
            f"regime unreachable: np too large (T = 0 at p={p}, n={n})"
        )
    r_checks = threshold_r(p, n, constants)

    t_prime = math.ceil(3 * s * p / 2)
    leaf_sizes = split_sizes(s, t_prime)
    levels = [[TreeVertex(s=sz, r=r_checks) for sz in leaf_sizes]]
    for _ in range(depth - 1, 0, -1):
        below = levels[0]
        parents = []
        for start in range(0, len(below), t_cap):
            chunk = list(range(start, min(start + t_cap, len(below))))
            for c in chunk:
                below[c].parent = len(parents)
            parents.append(
                TreeVertex(s=sum(below[c].s for c in chunk), r=r_checks, children=chunk)
            )
        levels.insert(0, parents)
    root = TreeVertex(s=s, r=0, children=list(range(len(levels[0]))))
    for v in levels[0]:
        v.parent = 0
    levels.insert(0, [root])
    return CliNRTree(levels)
