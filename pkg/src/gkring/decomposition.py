"""Decompositions of definable sets into pieces B \\ C (B simple, C a proper
closed subset of B), elementary decompositions, decomposition trees and the
counting statistics of the main theorem."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagram import GENERIC, ParamDiagram
from .errors import AmbientNotClosed, DepthBudgetExceeded, NotElementary
from .grothendieck import satisfiable
from .simple import ClosedSet, SimpleSet, irreducible_components
from .syntax import (
    And,
    Eq,
    FalseF,
    Formula,
    Neq,
    Not,
    Or,
    TrueF,
    atoms,
    conj,
    disj,
    pack_variables,
    prepare,
    require_uniform,
    to_text,
)

MAX_BASIC_SETS = 12


@dataclass(frozen=True)
class ElementaryPiece:
    positive: SimpleSet
    negative: ClosedSet

    def __post_init__(self):
        for c in self.negative.components:
            if not self.positive.includes(c) or c == self.positive:
                raise ValueError("negative components must be proper subsets of the positive set")

    @property
    def is_empty(self) -> bool:
        return self.positive.empty or self.negative.contains_simple(self.positive)

    def to_formula(self) -> Formula:
        return conj([self.positive.to_formula(), Not(self.negative.to_formula())])

    def to_json(self) -> dict:
        return {"positive": self.positive.to_json(), "negative": self.negative.to_json()}

    def __str__(self) -> str:
        return f"[{self.positive}] \\ ({self.negative})"


@dataclass(frozen=True)
class Decomposition:
    ambient: Formula
    depth: int
    pieces: tuple = ()
    diagram: ParamDiagram = field(default=GENERIC, repr=False)

    def positives(self) -> list[SimpleSet]:
        return [pc.positive for pc in self.pieces]

    def to_formula(self) -> Formula:
        return disj(pc.to_formula() for pc in self.pieces)

    def closure(self) -> ClosedSet:
        return irreducible_components(self.positives(), self.depth)

    def closure_of_part(self, k: SimpleSet) -> ClosedSet:
        """Closure in Top_p of (k intersected with the decomposed set)."""
        parts = []
        for pc in self.pieces:
            b = pc.positive.intersect(k)
            if not b.empty and not pc.negative.contains_simple(b):
                parts.append(b)
        return irreducible_components(parts, self.depth)

    def to_json(self) -> dict:
        return {
            "ambient": to_text(self.ambient),
            "depth": self.depth,
            "pieces": [pc.to_json() for pc in self.pieces],
        }


def _ordered(pieces: Iterable[ElementaryPiece]) -> tuple:
    return tuple(sorted(pieces, key=lambda pc: (pc.positive.key(), [c.key() for c in pc.negative.components])))


# ------------------------------------------------------------- decompose


def _truth(f: Formula, value: dict) -> Optional[bool]:
    """Propositional value of an unfolded formula, None if undetermined."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Eq):
        return value.get(f)
    if isinstance(f, Neq):
        v = value.get(Eq(f.lhs, f.rhs))
        return None if v is None else not v
    vals = [_truth(a, value) for a in f.args]
    if isinstance(f, And):
        if False in vals:
            return False
        return None if None in vals else True
    if True in vals:
        return True
    return None if None in vals else False


def decompose(f: Formula, p: Optional[int] = None, diagram: ParamDiagram = GENERIC,
              nvars: Optional[int] = None, coarse: bool = False) -> Decomposition:
    """One piece per realisable sign pattern of the basic simple sets.

    With ``coarse`` a pattern stops splitting as soon as it decides the
    formula, which gives fewer, larger pieces of the same set.
    """
    g, p = prepare(f, nvars, p, diagram)
    require_uniform(g, p)
    basic_atoms = sorted({Eq(a.lhs, a.rhs) for a in atoms(g)}, key=lambda a: (a.lhs.sort_key(), a.rhs.sort_key()))
    if len(basic_atoms) > MAX_BASIC_SETS:
        raise DepthBudgetExceeded(f"{len(basic_atoms)} basic simple sets (limit {MAX_BASIC_SETS})")
    full = SimpleSet.full(p, diagram)
    basics = [full.conjoin((a,)) for a in basic_atoms]
    pieces = []

    def walk(i: int, pos: SimpleSet, value: dict, outside: list):
        if pos.empty or any(b.includes(pos) for b in outside):
            return
        verdict = _truth(g, value)
        if verdict is False:
            return
        if i == len(basics) or (coarse and verdict is True):
            neg = irreducible_components([pos.intersect(b) for b in outside], p)
            pieces.append(ElementaryPiece(pos, neg))
            return
        atom, b = basic_atoms[i], basics[i]
        walk(i + 1, pos.intersect(b), {**value, atom: True}, outside)
        walk(i + 1, pos, {**value, atom: False}, outside + [b])

    walk(0, full, {}, [])
    return Decomposition(f, p, _ordered(pieces), diagram)


# ------------------------------------------------------ elementary form


def _meet_closure(family: set) -> set:
    out = set(family)
    frontier = list(out)
    while frontier:
        new = []
        for a in frontier:
            for b in list(out):
                c = a.intersect(b)
                if not c.empty and c not in out:
                    out.add(c)
                    new.append(c)
        frontier = new
    return out


def _stratify(dec: Decomposition, family: set) -> list[ElementaryPiece]:
    """Re-emit the set as strata X minus the smaller members of the family."""
    out = []
    for x in family:
        owners = [pc for pc in dec.pieces if pc.positive.includes(x) and not pc.negative.contains_simple(x)]
        if not owners:
            continue
        if len(owners) > 1:
            raise NotElementary("overlapping pieces: the input is not a decomposition")
        owner = owners[0]
        smaller = [y for y in family if y != x and x.includes(y)]
        cut = [x.intersect(c) for c in owner.negative.components] + smaller
        neg = irreducible_components(cut, dec.depth)
        piece = ElementaryPiece(x, neg)
        if not piece.is_empty:
            out.append(piece)
    return out


def make_elementary(dec: Decomposition) -> Decomposition:
    """Saturate the positive sets until every closure(C ∩ A) splits into
    positive sets, keeping the pieces pairwise disjoint."""
    family = _meet_closure(set(dec.positives()))
    while True:
        pieces = _stratify(dec, family)
        current = Decomposition(dec.ambient, dec.depth, _ordered(pieces), dec.diagram)
        new = set()
        for pc in pieces:
            for k in pc.negative.components:
                new.update(dec.closure_of_part(k).components)
        new -= family
        if not new:
            return current
        family = _meet_closure(family | new)


@dataclass
class ElementaryReport:
    ok: bool
    missing: list = field(default_factory=list)  # (piece index, component)
    identity_failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "elementary": self.ok,
            "missing": [{"piece": i, "component": c.to_json()} for i, c in self.missing],
            "identityFailures": self.identity_failures,
        }

    def __bool__(self) -> bool:
        return self.ok


def verify_elementary(dec: Decomposition, semantic: bool = True) -> ElementaryReport:
    """Structural check plus, optionally, the identities

        C_j ∩ A = union of the pieces with B_i ⊆ C_j
        B_j ∩ A = union of the pieces with B_i ⊆ B_j

    decided by the brute-force oracle at depth <= 3 (the engine beyond).
    """
    report = ElementaryReport(True)
    positives = set(dec.positives())
    for j, pc in enumerate(dec.pieces):
        for k in pc.negative.components:
            for comp in dec.closure_of_part(k).components:
                if comp not in positives:
                    report.missing.append((j, comp))
    if semantic:
        amb = pack_variables(dec.ambient)
        for j, pc in enumerate(dec.pieces):
            inside_c = [pcs.to_formula() for pcs in dec.pieces if pc.negative.contains_simple(pcs.positive)]
            inside_b = [pcs.to_formula() for pcs in dec.pieces if pc.positive.includes(pcs.positive)]
            checks = [("C", conj([pc.negative.to_formula(), amb]), disj(inside_c)),
                      ("B", conj([pc.positive.to_formula(), amb]), disj(inside_b))]
            for name, lhs, rhs in checks:
                if not _equivalent(lhs, rhs, dec.depth, dec.diagram):
                    report.identity_failures.append(f"piece {j}: {name} identity")
    report.ok = not report.missing and not report.identity_failures
    return report


def _equivalent(a: Formula, b: Formula, p: int, diagram: ParamDiagram) -> bool:
    delta = disj([conj([a, Not(b)]), conj([b, Not(a)])])
    if p <= 3:
        from .oracle import oracle_sat
        return not oracle_sat(delta, p, diagram)
    return not satisfiable(delta, diagram, p)


def subset_of_union(s: SimpleSet, sets: Iterable[SimpleSet]) -> bool:
    """Irreducibility: a simple set lies in a finite union iff in one member."""
    return s.empty or any(t.includes(s) for t in sets)


def is_closed(dec: Decomposition) -> bool:
    """The decomposed set equals its Top_p closure."""
    clo = dec.closure().to_formula()
    return not satisfiable(conj([clo, Not(pack_variables(dec.ambient))]), dec.diagram, dec.depth)


# ------------------------------------------------------------------ trees


@dataclass
class TreeNode:
    piece: Optional[int]  # None for the root
    children: list = field(default_factory=list)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class DecompositionTree:
    decomposition: Decomposition
    root: TreeNode

    def nodes(self) -> list[TreeNode]:
        return [n for n in self.root.walk() if n.piece is not None]

    def to_dot(self) -> str:
        lines = ["digraph decomposition {", '  node [shape=box, fontname="monospace"];',
                 '  n0 [label="A", shape=circle];']
        ids = {}

        def emit(node: TreeNode, parent: int):
            for child in node.children:
                ids[id(child)] = len(ids) + 1
                me = ids[id(child)]
                pc = self.decomposition.pieces[child.piece]
                tag = "*" if pc.positive.is_singleton else ""
                label = f"{child.piece}{tag}: B={pc.positive}\\nC={pc.negative}"
                lines.append(f'  n{me} [label="{_dot_escape(label)}"];')
                lines.append(f"  n{parent} -> n{me};")
                emit(child, me)

        emit(self.root, 0)
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace('"', '\\"')


def _maximal(indices: list[int], dec: Decomposition) -> list[int]:
    pos = dec.pieces
    return [i for i in indices
            if not any(pos[j].positive != pos[i].positive and pos[j].positive.includes(pos[i].positive)
                       for j in indices)]


def tree_of_decomposition(dec: Decomposition) -> DecompositionTree:
    everything = list(range(len(dec.pieces)))

    def grow(node: TreeNode, pool: list[int]):
        # positive sets strictly shrink along a branch, so this terminates
        for i in _maximal(pool, dec):
            child = TreeNode(i)
            node.children.append(child)
            neg = dec.pieces[i].negative
            grow(child, [j for j in everything if neg.contains_simple(dec.pieces[j].positive)])

    root = TreeNode(None)
    grow(root, everything)
    return DecompositionTree(dec, root)


@dataclass
class Stats:
    I: int
    child_counts: list
    component_counts: list
    nodes: int
    pieces: int
    singletons: int  # |A1|: pieces with a singleton positive set
    nested_singletons: int  # |A2|: those strictly inside another positive set
    negative_singletons: int  # |A3|: pieces whose C has a singleton component
    isolated_singletons: int  # |A1| - |A2|
    heights: list

    def to_json(self) -> dict:
        return {
            "I": self.I,
            "childCounts": self.child_counts,
            "componentCounts": self.component_counts,
            "nodes": self.nodes,
            "pieceCount": self.pieces,
            "singletonPositiveCount": self.singletons,
            "nestedSingletonCount": self.nested_singletons,
            "negativeSingletonCount": self.negative_singletons,
            "isolatedSingletonCount": self.isolated_singletons,
            "heights": self.heights,
        }


def tree_stats(tree: DecompositionTree, check: bool = True) -> Stats:
    """Counting statistics; with ``check`` the tree must come from an
    elementary decomposition of a closed set, and every node's child count
    is compared with the component count of its negative set."""
    dec = tree.decomposition
    if check:
        if not verify_elementary(dec, semantic=False):
            raise NotElementary("decomposition is not elementary")
        if not is_closed(dec):
            raise AmbientNotClosed("the decomposed set is not closed in Top_p")
    nodes = tree.nodes()
    child_counts = [len(n.children) for n in nodes]
    component_counts = [len(dec.pieces[n.piece].negative) for n in nodes]
    if check and child_counts != component_counts:
        raise NotElementary("child counts differ from negative component counts")

    def height(node: TreeNode) -> int:
        return 0 if not node.children else 1 + max(height(c) for c in node.children)

    pos = dec.positives()
    a1 = [i for i, b in enumerate(pos) if b.is_singleton]
    a2 = [i for i in a1 if any(j != i and pos[j] != pos[i] and pos[j].includes(pos[i]) for j in range(len(pos)))]
    a3 = [i for i, pc in enumerate(dec.pieces) if pc.negative.singleton_count()]
    return Stats(
        I=len(tree.root.children),
        child_counts=child_counts,
        component_counts=component_counts,
        nodes=len(nodes),
        pieces=len(dec.pieces),
        singletons=len(a1),
        nested_singletons=len(a2),
        negative_singletons=len(a3),
        isolated_singletons=len(a1) - len(a2),
        heights=[height(n) for n in nodes],
    )
