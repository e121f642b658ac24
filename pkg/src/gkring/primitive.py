"""Formula trees of primitive formulas, closed subtrees, skeletons and the
empty / singleton / infinite classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagram import GENERIC, ParamDiagram
from .errors import InvalidFrontier, NotExtended, NotPrimitive, WrongShape
from .grothendieck import ambient, cell_nonempty, cells
from .simple import SimpleSet
from .syntax import (
    TRUE,
    And,
    Eq,
    Formula,
    Neq,
    Term,
    TrueF,
    Var,
    X,
    conj,
    parse,
    prefix_comparable,
    prepare,
    suffixes,
    to_text,
)


def primitive_atoms(f: Formula) -> list[Formula]:
    """Atoms of a conjunction of atoms; NotPrimitive otherwise."""
    if isinstance(f, TrueF):
        return []
    if isinstance(f, (Eq, Neq)):
        return [f]
    if isinstance(f, And):
        out = []
        for a in f.args:
            out += primitive_atoms(a)
        return out
    raise NotPrimitive(f"not a conjunction of atoms: {to_text(f)}")


# ------------------------------------------------------------------- trees


@dataclass(frozen=True)
class FormulaTree:
    labels: dict = field(default_factory=dict)  # address -> tuple of atoms
    var: Var = X

    def label(self, addr: str) -> tuple:
        return self.labels.get(addr, ())

    def addresses(self) -> list[str]:
        return sorted(self.labels, key=lambda a: (len(a), a))

    @property
    def max_depth(self) -> int:
        return max((len(a) for a in self.labels), default=0)

    def to_json(self) -> dict:
        return {"labels": {a: [to_text(x) for x in self.labels[a]] for a in self.addresses()}}

    @classmethod
    def from_json(cls, data: dict, var: Var = X) -> "FormulaTree":
        return cls({a: tuple(parse(s) for s in items) for a, items in data["labels"].items() if items}, var)


def _anchor(a: Formula, v: Var) -> str:
    """Address of the deepest v-term of an atom, ties to the smaller address."""
    paths = [t.path for t in (a.lhs, a.rhs) if not t.is_const and t.base == v]
    if not paths:
        return ""
    return min(paths, key=lambda w: (-len(w), w))


def tree_of_primitive(f: Formula, v: Var = X) -> FormulaTree:
    labels: dict[str, list] = {}
    for a in primitive_atoms(f):
        labels.setdefault(_anchor(a, v), []).append(a)
    return FormulaTree({k: tuple(x) for k, x in labels.items()}, v)


def formula_of_tree(t: FormulaTree) -> Formula:
    return conj(a for addr in t.addresses() for a in t.labels[addr])


# ----------------------------------------------------------- closed trees


def _candidates(t: FormulaTree) -> set[str]:
    return {addr for addr, items in t.labels.items() if any(isinstance(a, Eq) for a in items)}


def _cover(u: str, marked: set[str], limit: int) -> Optional[list[str]]:
    """Smallest antichain of marked nodes below ``u`` meeting every branch."""
    if u in marked:
        return [u]
    if len(u) >= limit:
        return None
    left = _cover(u + "l", marked, limit)
    if left is None:
        return None
    right = _cover(u + "r", marked, limit)
    return None if right is None else left + right


def find_closed_subtree(t: FormulaTree) -> Optional[frozenset]:
    """Frontier of a closed subtree: an antichain of nodes labelled with an
    equality such that every address is prefix-comparable to one of them."""
    marked = _candidates(t)
    if not marked:
        return None
    out = _cover("", marked, max(len(a) for a in marked))
    return None if out is None else frozenset(out)


def _check_frontier(t: FormulaTree, frontier) -> None:
    front = set(frontier)
    if not front:
        raise InvalidFrontier("empty frontier")
    marked = _candidates(t)
    missing = front - marked
    if missing:
        raise InvalidFrontier(f"frontier nodes without an equality label: {sorted(missing)}")
    for a in front:
        for b in front:
            if a != b and prefix_comparable(a, b):
                raise InvalidFrontier(f"frontier is not an antichain: {a!r}, {b!r}")
    if _cover("", front, max(len(a) for a in front)) is None:
        raise InvalidFrontier("frontier leaves a branch uncovered")


def skeleton(t: FormulaTree, frontier) -> FormulaTree:
    """Keep only the labels of the frontier nodes."""
    _check_frontier(t, frontier)
    return FormulaTree({a: t.labels[a] for a in frontier}, t.var)


def strip_inequalities(t: FormulaTree) -> FormulaTree:
    labels = {a: tuple(x for x in items if isinstance(x, Eq)) for a, items in t.labels.items()}
    return FormulaTree({a: items for a, items in labels.items() if items}, t.var)


# --------------------------------------------------------- classification


@dataclass(frozen=True)
class PrimitiveClass:
    kind: str  # "empty" | "singleton" | "infinite"
    witness: Optional[Formula] = None
    frontier: Optional[frozenset] = None

    def __str__(self) -> str:
        return self.kind

    def to_json(self) -> dict:
        out = {"class": self.kind}
        if self.witness is not None:
            out["witness"] = to_text(self.witness)
            out["frontier"] = sorted(self.frontier, key=lambda a: (len(a), a))
        return out


def _value_tree(s):
    """Nested value of the unique element of a zero-free-class set:
    ("c", term) or ("p", left, right)."""
    if not isinstance(s, SimpleSet):
        return s.point_key()

    def node(w: str):
        if len(w) == s.depth:
            return ("c", s.constants[s.leaf_class[w]])
        return _pair(node(w + "l"), node(w + "r"), s.diagram)

    return node("")


def _pair(lv, rv, diagram):
    if lv[0] == "c" and rv[0] == "c":
        a, b = lv[1], rv[1]
        if a.base == b.base and a.path[:-1] == b.path[:-1] and a.path[-1:] == "l" and b.path[-1:] == "r":
            return ("c", diagram.canonical(Term(a.base, a.path[:-1])))
    return ("p", lv, rv)


def _witness_atoms(value, w: str = "") -> list[Formula]:
    if value[0] == "c":
        return [Eq(Term(X, w), value[1])]
    return _witness_atoms(value[1], w + "l") + _witness_atoms(value[2], w + "r")


def classify_primitive(f: Formula, diagram: ParamDiagram = GENERIC) -> PrimitiveClass:
    """Empty, Singleton (with a closed positive witness) or Infinite.

    The formula is packed and unfolded to uniform depth; its positive part
    is solved, and the set is empty iff some inequality is entailed by it.
    A satisfiable primitive set with a free class is infinite: removing a
    proper closed subset from an irreducible set leaves infinitely many
    points. Finite sets are therefore singletons.
    """
    primitive_atoms(f)
    g, p = prepare(f, diagram=diagram)
    found = [(s, groups) for s, groups in cells(g, ambient(g, p, diagram))]
    live = [(s, groups) for s, groups in found if cell_nonempty(s, groups)]
    if not live:
        return PrimitiveClass("empty")
    s, _ = live[0]
    if s.free_class_count:
        return PrimitiveClass("infinite")
    witness = conj(_witness_atoms(_value_tree(s)))
    frontier = find_closed_subtree(tree_of_primitive(witness))
    return PrimitiveClass("singleton", witness, frontier)


# ------------------------------------------------------ parametric analysis


@dataclass(frozen=True)
class ParamAnalysis:
    kind: str  # "always_singleton_or_empty" | "never_finite"
    reduced: Optional[Formula] = None

    def __str__(self) -> str:
        return self.kind


def analyze_parametric(f: Formula, v: Var = X) -> ParamAnalysis:
    """For a primitive formula in ``v`` whose other variables are parameters.

    Allowed atoms: v-term = parameter term, v-term != parameter term, and
    atoms between v-terms and constants. The equalities determine v for
    every value of the parameters iff every address is prefix-comparable to
    a determined node; a node is determined when pinned to a parameter or a
    constant, when equal to a determined node, or when both its children are.
    """
    items = primitive_atoms(f)
    xterms = set()
    pins, links = set(), []
    for a in items:
        sides = [a.lhs, a.rhs]
        mine = [t for t in sides if not t.is_const and t.base == v]
        params = [t for t in sides if not t.is_const and t.base != v]
        if not mine:
            raise WrongShape(f"atom without {v}: {to_text(a)}")
        xterms.update(t.path for t in mine)
        if isinstance(a, Eq):
            if len(mine) == 2:
                links.append((mine[0].path, mine[1].path))
            else:
                pins.add(mine[0].path)
        elif params and len(mine) != 1:
            raise WrongShape(to_text(a))
    for a in xterms:
        for b in xterms:
            if a != b and prefix_comparable(a, b):
                raise NotExtended(f"{v}@{a!r} and {v}@{b!r} are related by filiation")
    determined = set(pins)
    changed = True
    while changed:
        changed = False
        for a, b in links:
            if (a in determined) != (b in determined):
                determined |= {a, b}
                changed = True
        for w in list(determined):
            parent = w[:-1]
            if w and parent not in determined and parent + "l" in determined and parent + "r" in determined:
                determined.add(parent)
                changed = True
    limit = max((len(a) for a in determined), default=0)
    if not determined or _cover("", determined, limit) is None:
        return ParamAnalysis("never_finite")
    return ParamAnalysis("always_singleton_or_empty", conj(a for a in items if isinstance(a, Eq)))
