"""Grothendieck class, satisfiability and cardinality of quantifier-free
definable sets.

The class is a valuation: [A u B] = [A] + [B] - [A n B] and [not A] = X - [A]
inside the packed ambient M. Recursing on the unfolded NNF formula leaves
only conjunctions of equalities, i.e. simple sets, whose class is 0, 1 or X.

Satisfiability and cardinality use irreducibility instead: a conjunction
S & !E1 & ... & !Ek (S, Ei positive) is non-empty iff S is non-empty and no
S & Ei equals S, and it is infinite iff in addition S has a free class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .diagram import GENERIC, ParamDiagram
from .errors import DepthBudgetExceeded
from .k0 import ONE, X as CLASS_X, ZERO, K0Elem
from .simple import SimpleSet
from .syntax import (
    And,
    Eq,
    FalseF,
    Formula,
    Neq,
    Or,
    TrueF,
    conj,
    disj,
    is_uniform,
    prepare,
    suffixes,
)
from .unify import GeneralSet

# Upper bound on memoised (formula, simple set) evaluations in one call.
CLASS_BUDGET = 500_000
# Upper bound on DNF cells explored by sat / cardinality.
CELL_BUDGET = 200_000

__all__ = [
    "Cardinality",
    "K0Elem",
    "class_of_formula",
    "satisfiable",
    "cardinality",
]


@dataclass(frozen=True)
class Cardinality:
    kind: str  # "empty" | "finite" | "infinite"
    n: Optional[int] = None

    @classmethod
    def of_count(cls, n: Optional[int]) -> "Cardinality":
        if n is None:
            return cls("infinite")
        return cls("empty", 0) if n == 0 else cls("finite", n)

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"finite({self.n})"
        return self.kind

    def to_json(self) -> dict:
        return {"cardinality": self.kind, "n": self.n}


EMPTY = Cardinality("empty", 0)
INFINITE = Cardinality("infinite")


def ambient(g: Formula, p: int, diagram: ParamDiagram):
    if is_uniform(g, p):
        return SimpleSet.full(p, diagram)
    return GeneralSet.full(diagram)


def _state_class(s) -> K0Elem:
    if s.empty:
        return ZERO
    return ONE if s.free_class_count == 0 else CLASS_X


class _ClassEval:
    def __init__(self):
        self.memo: dict = {}

    def run(self, f: Formula, s) -> K0Elem:
        if s.empty or isinstance(f, FalseF):
            return ZERO
        if isinstance(f, TrueF):
            return _state_class(s)
        if isinstance(f, Eq):
            return _state_class(s.conjoin((f,)))
        neg = _negative_group(f)
        if neg is not None:
            return _state_class(s) - _state_class(s.conjoin(neg))
        key = (f, s)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if len(self.memo) > CLASS_BUDGET:
            raise DepthBudgetExceeded("inclusion-exclusion budget exhausted")
        if isinstance(f, And):
            out = self._and(f, s)
        elif isinstance(f, Or):
            split = _split_negatives(f)
            if split is not None:
                # !E | R  is the complement of E, plus R inside E
                eqs, others = split
                t = s.conjoin(eqs)
                out = _state_class(s) - _state_class(t) + self.run(others, t)
            else:
                g1, rest = f.args[0], disj(f.args[1:])
                out = self.run(g1, s) + self.run(rest, s) - self.run(conj((g1, rest)), s)
        else:
            raise TypeError(f)
        self.memo[key] = out
        return out

    def _and(self, f: And, s) -> K0Elem:
        eqs = [a for a in f.args if isinstance(a, Eq)]
        rest = [a for a in f.args if not isinstance(a, Eq)]
        if eqs:
            s = s.conjoin(eqs)
            if s.empty:
                return ZERO
        if not rest:
            return _state_class(s)
        # a disjunction of inequalities is the complement of one conjunction
        rest.sort(key=lambda a: _negative_group(a) is None)
        head, others = rest[0], rest[1:]
        tail = conj(others)
        neg = _negative_group(head)
        if neg is not None:
            return self.run(tail, s) - self.run(tail, s.conjoin(neg))
        split = _split_negatives(head)
        if split is not None:
            # (!E | R) & T  =  T minus (T & E & !R)
            eqs, others = split
            t = s.conjoin(eqs)
            return self.run(tail, s) - self.run(tail, t) + self.run(conj((others, tail)), t)
        g1, gr = head.args[0], disj(head.args[1:])
        return (self.run(conj([g1] + others), s) + self.run(conj([gr] + others), s)
                - self.run(conj([g1, gr] + others), s))


def class_of_formula(f: Formula, diagram: ParamDiagram = GENERIC, p: Optional[int] = None,
                     nvars: Optional[int] = None) -> K0Elem:
    """Class in Z[X]/(X - X^2) of the set defined by ``f`` (packed into M)."""
    g, p = prepare(f, nvars, p, diagram)
    return _ClassEval().run(g, ambient(g, p, diagram))


# ------------------------------------------------------- sat / cardinality


def _split_negatives(f: Or) -> Optional[tuple]:
    """``(eqs, rest)`` for a disjunction mixing inequalities with other parts."""
    neqs = [a for a in f.args if isinstance(a, Neq)]
    if not neqs or len(neqs) == len(f.args):
        return None
    return tuple(Eq(a.lhs, a.rhs) for a in neqs), disj(a for a in f.args if not isinstance(a, Neq))


def _negative_group(f: Formula) -> Optional[tuple]:
    if isinstance(f, Neq):
        return (Eq(f.lhs, f.rhs),)
    if isinstance(f, Or) and all(isinstance(a, Neq) for a in f.args):
        return tuple(Eq(a.lhs, a.rhs) for a in f.args)
    return None


def cells(g: Formula, s) -> Iterator[tuple]:
    """Primitive cells ``(S, groups)`` covering the set of ``g``."""
    budget = [CELL_BUDGET]

    def walk(items: list, s, groups: tuple):
        budget[0] -= 1
        if budget[0] < 0:
            raise DepthBudgetExceeded("DNF cell budget exhausted")
        if s.empty:
            return
        if not items:
            yield s, groups
            return
        f, rest = items[0], items[1:]
        if isinstance(f, TrueF):
            yield from walk(rest, s, groups)
        elif isinstance(f, FalseF):
            return
        elif isinstance(f, Eq):
            yield from walk(rest, s.conjoin((f,)), groups)
        elif isinstance(f, And):
            yield from walk(list(f.args) + rest, s, groups)
        else:
            neg = _negative_group(f)
            if neg is not None:
                yield from walk(rest, s, groups + (neg,))
            else:
                for a in f.args:
                    yield from walk([a] + rest, s, groups)

    yield from walk([g], s, ())


def _entailed(s, group: tuple) -> bool:
    t = s.conjoin(group)
    if t.empty:
        return False
    if not isinstance(s, SimpleSet):
        # compare over the same unfolded region, else new nodes count as new classes
        s = s.conjoin([Eq(u, u) for e in group for u in (e.lhs, e.rhs)])
    return t.free_class_count == s.free_class_count


def cell_nonempty(s, groups) -> bool:
    return not s.empty and not any(_entailed(s, e) for e in groups)


def point_key(s):
    if isinstance(s, SimpleSet):
        return tuple(s.constants[s.leaf_class[leaf]] for leaf in suffixes(s.depth))
    return s.point_key()


def satisfiable(f: Formula, diagram: ParamDiagram = GENERIC, p: Optional[int] = None,
                nvars: Optional[int] = None) -> bool:
    g, p = prepare(f, nvars, p, diagram)
    return any(cell_nonempty(s, e) for s, e in cells(g, ambient(g, p, diagram)))


def cardinality(f: Formula, diagram: ParamDiagram = GENERIC, p: Optional[int] = None,
                nvars: Optional[int] = None) -> Cardinality:
    g, p = prepare(f, nvars, p, diagram)
    points = set()
    for s, groups in cells(g, ambient(g, p, diagram)):
        if not cell_nonempty(s, groups):
            continue
        if s.free_class_count:
            return INFINITE
        points.add(point_key(s))
    return Cardinality.of_count(len(points))
