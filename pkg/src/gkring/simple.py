"""Simple sets of depth p, the lattice operations on them, and the closed sets
(finite unions of simple sets) of the Noetherian topology Top_p.

A simple set is stored in canonical form: a partition of the 2^p leaves
{l,r}^p and one optional constant term per class, with classes carrying
diagram-equal constants merged. Empty simple sets are explicit values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .diagram import GENERIC, ParamDiagram
from .errors import DepthMismatch, NonUniformAtom, NotPositivePrimitive
from .k0 import ONE, X as CLASS_X, ZERO, K0Elem
from .syntax import (
    FALSE,
    TRUE,
    And,
    Eq,
    Formula,
    FalseF,
    Term,
    TrueF,
    X,
    conj,
    max_depth,
    pack_variables,
    parse_term,
    suffixes,
    unfold_formula,
)


@dataclass(frozen=True)
class SimpleSet:
    depth: int
    classes: tuple = ()
    constants: tuple = ()
    empty: bool = False
    diagram: ParamDiagram = field(default=GENERIC, repr=False)

    # ---- construction

    @classmethod
    def build(cls, p: int, merges: Iterable[tuple[str, str]] = (),
              pins: Iterable[tuple[str, Term]] = (),
              diagram: ParamDiagram = GENERIC) -> "SimpleSet":
        if p < 1:
            raise ValueError("simple sets have depth >= 1")
        leaves = suffixes(p)
        ds = DisjointSet(leaves)
        for a, b in merges:
            ds.merge(a, b)
        pinned: dict[str, Term] = {}
        for leaf, c in pins:
            c = diagram.canonical(c)
            root = ds[leaf]
            old = pinned.get(root)
            if old is None:
                pinned[root] = c
            elif old != c:
                return cls.empty_set(p, diagram)
        by_const: dict[Term, str] = {}
        for root, c in list(pinned.items()):
            other = by_const.get(c)
            if other is None:
                by_const[c] = root
            else:
                ds.merge(other, root)
        const_of = {ds[root]: c for root, c in pinned.items()}
        groups = sorted(tuple(sorted(s)) for s in ds.subsets())
        consts = tuple(const_of.get(ds[g[0]]) for g in groups)
        return cls(p, tuple(groups), consts, False, diagram)

    @classmethod
    def full(cls, p: int, diagram: ParamDiagram = GENERIC) -> "SimpleSet":
        return cls.build(p, diagram=diagram)

    @classmethod
    def empty_set(cls, p: int, diagram: ParamDiagram = GENERIC) -> "SimpleSet":
        return cls(p, (), (), True, diagram)

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.depth, self.classes, self.constants, self.empty, self.diagram))
            object.__setattr__(self, "_hash", h)
        return h

    # ---- views

    @cached_property
    def leaf_class(self) -> dict[str, int]:
        return {leaf: i for i, cl in enumerate(self.classes) for leaf in cl}

    @property
    def free_class_count(self) -> int:
        return sum(1 for c in self.constants if c is None)

    @property
    def is_singleton(self) -> bool:
        return not self.empty and self.free_class_count == 0

    def merges(self) -> list[tuple[str, str]]:
        return [(cl[0], leaf) for cl in self.classes for leaf in cl[1:]]

    def pins(self) -> list[tuple[str, Term]]:
        return [(cl[0], c) for cl, c in zip(self.classes, self.constants) if c is not None]

    def key(self) -> tuple:
        return (self.depth, self.empty, self.classes,
                tuple("" if c is None else str(c) for c in self.constants))

    # ---- lattice

    def _same_depth(self, other: "SimpleSet") -> None:
        if self.depth != other.depth:
            raise DepthMismatch(f"depths {self.depth} and {other.depth}")

    def intersect(self, other: "SimpleSet") -> "SimpleSet":
        self._same_depth(other)
        if self.empty:
            return self
        if other.empty:
            return other
        if self == other:
            return self
        return _meet(self, other)

    __and__ = intersect

    def includes(self, other: "SimpleSet") -> bool:
        """``other`` is a subset of ``self``."""
        self._same_depth(other)
        if other.empty:
            return True
        return self.intersect(other) == other

    def conjoin(self, eqs: Iterable[Formula]) -> "SimpleSet":
        """Intersect with leaf-level equalities."""
        if self.empty:
            return self
        merges, pins = _split_atoms(eqs, self.depth)
        return SimpleSet.build(self.depth, self.merges() + merges, self.pins() + pins, self.diagram)

    def lift(self, q: int) -> "SimpleSet":
        """The same set presented at depth ``q >= depth``."""
        if q < self.depth:
            raise ValueError("cannot lower depth")
        if q == self.depth:
            return self
        if self.empty:
            return SimpleSet.empty_set(q, self.diagram)
        tails = suffixes(q - self.depth)
        merges, pins = [], []
        for cl, c in zip(self.classes, self.constants):
            for w in tails:
                merges += [(cl[0] + w, leaf + w) for leaf in cl[1:]]
                if c is not None:
                    pins.append((cl[0] + w, c.child(w)))
        return SimpleSet.build(q, merges, pins, self.diagram)

    # ---- conversions

    def to_formula(self, v=X) -> Formula:
        if self.empty:
            return FALSE
        parts = [Eq(Term(v, a), Term(v, b)) for a, b in self.merges()]
        parts += [Eq(Term(v, a), c) for a, c in self.pins()]
        return conj(parts)

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "classes": [list(cl) for cl in self.classes],
            "constants": {str(i): str(c) for i, c in enumerate(self.constants) if c is not None},
            "empty": self.empty,
        }

    @classmethod
    def from_json(cls, data: dict, diagram: ParamDiagram = GENERIC) -> "SimpleSet":
        p = data["depth"]
        if data.get("empty"):
            return cls.empty_set(p, diagram)
        classes = data["classes"]
        merges = [(cl[0], leaf) for cl in classes for leaf in cl[1:]]
        pins = [(classes[int(i)][0], parse_term(c)) for i, c in data.get("constants", {}).items()]
        return cls.build(p, merges, pins, diagram)

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        parts = []
        for cl, c in zip(self.classes, self.constants):
            if len(cl) == 1 and c is None:
                continue
            s = "{" + ",".join(cl) + "}"
            parts.append(s if c is None else f"{s}->{c}")
        return " ".join(parts) if parts else f"M@{self.depth}"


@lru_cache(maxsize=1 << 16)
def _meet(a: SimpleSet, b: SimpleSet) -> SimpleSet:
    return SimpleSet.build(a.depth, a.merges() + b.merges(), a.pins() + b.pins(), a.diagram)


def _split_atoms(eqs: Iterable[Formula], p: int):
    merges, pins = [], []
    for a in eqs:
        s, t = a.lhs, a.rhs
        if s.is_const:
            s, t = t, s
        if s.depth != p or (not t.is_const and t.depth != p):
            raise NonUniformAtom(f"{a} is not a depth-{p} leaf atom")
        if t.is_const:
            pins.append((s.path, t))
        else:
            merges.append((s.path, t.path))
    return merges, pins


def full_space(p: int, diagram: ParamDiagram = GENERIC) -> SimpleSet:
    return SimpleSet.full(p, diagram)


def intersect(a: SimpleSet, b: SimpleSet) -> SimpleSet:
    return a.intersect(b)


def includes(a: SimpleSet, b: SimpleSet) -> bool:
    return a.includes(b)


def lift_depth(s: SimpleSet, q: int) -> SimpleSet:
    return s.lift(q)


def simple_class(s: SimpleSet) -> K0Elem:
    """0 if empty, 1 for a singleton, X otherwise (M^k is in bijection with M)."""
    if s.empty:
        return ZERO
    return ONE if s.free_class_count == 0 else CLASS_X


def _positive_atoms(f: Formula) -> list[Formula]:
    if isinstance(f, TrueF):
        return []
    if isinstance(f, Eq):
        return [f]
    if isinstance(f, And):
        out = []
        for a in f.args:
            out += _positive_atoms(a)
        return out
    raise NotPositivePrimitive(f"not a conjunction of equalities: {f}")


def from_positive_conjunction(f: Formula, p: Optional[int] = None,
                              diagram: ParamDiagram = GENERIC) -> SimpleSet:
    """The simple set of depth ``p`` defined by a conjunction of equalities."""
    if isinstance(f, FalseF):
        raise NotPositivePrimitive("false is not positive primitive")
    _positive_atoms(f)
    g = pack_variables(f)
    if p is None:
        p = max(1, max_depth(g))
    u = unfold_formula(g, p, diagram)
    if isinstance(u, FalseF):
        return SimpleSet.empty_set(p, diagram)
    return SimpleSet.full(p, diagram).conjoin(_positive_atoms(u))


# ------------------------------------------------------------ closed sets


@dataclass(frozen=True)
class ClosedSet:
    """Finite union of simple sets of one depth, kept as an irredundant antichain."""

    depth: int
    components: tuple = ()

    @property
    def is_empty(self) -> bool:
        return not self.components

    def contains_simple(self, s: SimpleSet) -> bool:
        """``s`` is a subset of the union. Exact by irreducibility of ``s``."""
        return s.empty or any(c.includes(s) for c in self.components)

    def intersect_simple(self, s: SimpleSet) -> "ClosedSet":
        return irreducible_components([c.intersect(s) for c in self.components], self.depth)

    def intersect(self, other: "ClosedSet") -> "ClosedSet":
        return irreducible_components(
            [a.intersect(b) for a in self.components for b in other.components], self.depth)

    def union(self, other: "ClosedSet") -> "ClosedSet":
        return irreducible_components(self.components + other.components, self.depth)

    def lift(self, q: int) -> "ClosedSet":
        return irreducible_components([c.lift(q) for c in self.components], q)

    def singleton_count(self) -> int:
        return sum(1 for c in self.components if c.is_singleton)

    def to_formula(self, v=X) -> Formula:
        from .syntax import disj
        return disj(c.to_formula(v) for c in self.components)

    def to_json(self) -> dict:
        return {"depth": self.depth, "components": [c.to_json() for c in self.components]}

    def __len__(self) -> int:
        return len(self.components)

    def __str__(self) -> str:
        return " u ".join(f"[{c}]" for c in self.components) or "empty"


def irreducible_components(sets: Sequence[SimpleSet], p: int) -> ClosedSet:
    """Drop empties and members included in another member."""
    uniq: dict[SimpleSet, None] = {}
    for s in sets:
        if s.depth != p:
            raise DepthMismatch(f"set of depth {s.depth} in a depth-{p} union")
        if not s.empty:
            uniq.setdefault(s)
    items = list(uniq)
    keep = [s for s in items if not any(t != s and t.includes(s) for t in items)]
    return ClosedSet(p, tuple(sorted(keep, key=SimpleSet.key)))
