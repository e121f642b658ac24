"""Solution sets of positive conjunctions that are not at uniform depth.

An equality such as ``l(x) = l(r(x))`` ties a node to a leaf of a different
depth; no depth-p partition of leaves expresses it. Such conjunctions are
solved here by unification on the tree of x: every node is either free, a
constant, or the pair of its two children. The solution set is in bijection
with M^k, k the number of free classes, or empty when unification fails
(constant clash or a cycle).
"""

from __future__ import annotations

from typing import Iterable, Optional

from .diagram import GENERIC, ParamDiagram
from .syntax import X as _X, Term


class GeneralSet:
    __slots__ = ("eqs", "diagram", "empty", "_parent", "_const", "_struct", "_free", "_hash")

    def __init__(self, eqs: Iterable[tuple[Term, Term]] = (), diagram: ParamDiagram = GENERIC):
        self.eqs = frozenset(_orient(s, t) for s, t in eqs)
        self.diagram = diagram
        self._hash = hash((self.eqs, diagram))
        self._solve()

    @classmethod
    def full(cls, diagram: ParamDiagram = GENERIC) -> "GeneralSet":
        return cls((), diagram)

    def conjoin(self, atoms) -> "GeneralSet":
        if self.empty:
            return self
        new = [(a.lhs, a.rhs) for a in atoms]
        return GeneralSet(list(self.eqs) + new, self.diagram)

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneralSet) and self.eqs == other.eqs and self.diagram == other.diagram

    def __hash__(self) -> int:
        return self._hash

    # ---- union-find with per-class data

    def _find(self, n):
        parent = self._parent
        root = n
        while parent[root] != root:
            root = parent[root]
        while parent[n] != root:
            parent[n], n = root, parent[n]
        return root

    def _node(self, t: Term):
        if t.is_const:
            t = self.diagram.canonical(t)
            key = ("c", t)
            if key not in self._parent:
                self._parent[key] = key
                self._const[key] = t
            return key
        key = ("v", t.path)
        if key not in self._parent:
            self._parent[key] = key
        return key

    def _solve(self) -> None:
        self._parent = {}
        self._const = {}
        self._struct = {}
        self.empty = False
        paths = {t.path for e in self.eqs for t in e if not t.is_const}
        paths.add("")
        region = set()
        for w in paths:
            for k in range(len(w) + 1):
                region.add(w[:k])
        for w in sorted(region, key=len):
            self._node(Term(_X, w))
            if any(u != w and u.startswith(w) for u in region):
                node = self._node(Term(_X, w))
                self._struct[node] = (self._node(Term(_X, w + "l")), self._node(Term(_X, w + "r")))
        queue = [(self._node(s), self._node(t)) for s, t in sorted(self.eqs, key=_eq_key)]
        while queue:
            a, b = queue.pop()
            ra, rb = self._find(a), self._find(b)
            if ra == rb:
                continue
            ca, cb = self._const.get(ra), self._const.get(rb)
            if ca is not None and cb is not None and ca != cb:
                self.empty = True
                return
            sa, sb = self._struct.get(ra), self._struct.get(rb)
            self._parent[rb] = ra
            const = ca if ca is not None else cb
            struct = sa if sa is not None else sb
            if sa is not None and sb is not None:
                queue += [(sa[0], sb[0]), (sa[1], sb[1])]
            if const is not None:
                self._const[ra] = const
            if struct is not None:
                self._struct[ra] = struct
            if const is not None and struct is not None:
                queue += [(struct[0], self._node(const.child("l"))),
                          (struct[1], self._node(const.child("r")))]
        if self._has_cycle():
            self.empty = True
            return
        roots = {self._find(n) for n in self._parent if n[0] == "v"}
        self._free = sum(1 for r in roots if r not in self._const and r not in self._struct)

    def _has_cycle(self) -> bool:
        edges = {}
        for n, (l, r) in self._struct.items():
            if self._find(n) == n:
                edges[n] = (self._find(l), self._find(r))
        state = {}

        def visit(n) -> bool:
            state[n] = 1
            for m in edges.get(n, ()):
                s = state.get(m)
                if s == 1 or (s is None and visit(m)):
                    return True
            state[n] = 2
            return False

        return any(state.get(n) is None and visit(n) for n in edges)

    # ---- queries

    @property
    def free_class_count(self) -> int:
        return 0 if self.empty else self._free

    def key(self) -> tuple:
        return tuple(sorted((_eq_key(e) for e in self.eqs)))

    def point_key(self) -> Optional[tuple]:
        """Canonical description of the unique element, for singleton sets."""
        if self.empty or self._free:
            return None
        return self._value(("v", ""))

    def _value(self, node):
        r = self._find(node)
        c = self._const.get(r)
        if c is not None:
            return ("c", c)
        left, right = self._struct[r]
        lv, rv = self._value(left), self._value(right)
        if lv[0] == "c" and rv[0] == "c":
            a, b = lv[1], rv[1]
            if (a.base == b.base and a.path[:-1] == b.path[:-1] and a.path.endswith("l")
                    and b.path.endswith("r")):
                return ("c", self.diagram.canonical(Term(a.base, a.path[:-1])))
        return ("p", lv, rv)



def _orient(s: Term, t: Term) -> tuple[Term, Term]:
    return (s, t) if s.sort_key() <= t.sort_key() else (t, s)


def _eq_key(e) -> tuple:
    return (e[0].sort_key(), e[1].sort_key())
