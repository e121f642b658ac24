"""Ground equalities between constant terms.

The default diagram is generic: syntactically distinct constant terms denote
distinct elements. A user diagram is closed under congruence (c = d gives
l(c) = l(d)) and pairing injectivity (l(c) = l(d), r(c) = r(d) gives c = d);
closure is computed on the finite region of terms a query needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from scipy.cluster.hierarchy import DisjointSet

from .errors import InconsistentDiagram
from .syntax import Term, parse_term

# Extra address length explored below the longest term of a query.
_SLACK = 3


@dataclass(frozen=True)
class ParamDiagram:
    equations: tuple = ()

    def __post_init__(self):
        eqs = []
        for s, t in self.equations:
            s = parse_term(s) if isinstance(s, str) else s
            t = parse_term(t) if isinstance(t, str) else t
            if not (s.is_const and t.is_const):
                raise InconsistentDiagram("diagram equations relate constant terms only")
            eqs.append(tuple(sorted((s, t), key=Term.sort_key)))
        object.__setattr__(self, "equations", tuple(sorted(set(eqs), key=lambda e: (e[0].sort_key(), e[1].sort_key()))))
        if self.equations:
            self._closure(())  # raises on cycles

    @property
    def is_generic(self) -> bool:
        return not self.equations

    def equal(self, s: Term, t: Term) -> bool:
        if s == t:
            return True
        if not self.equations:
            return False
        return self.canonical(s) == self.canonical(t)

    def canonical(self, t: Term) -> Term:
        if not self.equations:
            return t
        return _canonical(self, t)

    def _closure(self, extra: tuple) -> tuple[DisjointSet, set]:
        seeds = [u for e in self.equations for u in e] + list(extra)
        limit = max(len(u.path) for u in seeds) + _SLACK
        region: set[Term] = set()

        def add(u: Term) -> bool:
            if len(u.path) > limit or u in region:
                return False
            for k in range(len(u.path) + 1):
                v = Term(u.base, u.path[:k])
                if v not in region:
                    region.add(v)
                    ds.add(v)
                if k > 0:
                    sib = Term(u.base, u.path[:k - 1] + ("r" if u.path[k - 1] == "l" else "l"))
                    if sib not in region:
                        region.add(sib)
                        ds.add(sib)
            return True

        ds = DisjointSet()
        for u in seeds:
            add(u)
        for s, t in self.equations:
            ds.merge(s, t)
        changed = True
        while changed:
            changed = False
            for cls in ds.subsets():
                members = sorted(cls, key=Term.sort_key)
                # downward congruence
                for a in members:
                    for letter in "lr":
                        ca = a.child(letter)
                        if ca not in region:
                            continue
                        for b in members:
                            cb = b.child(letter)
                            if cb not in region:
                                changed |= add(cb)
                            if cb in region and not ds.connected(ca, cb):
                                ds.merge(ca, cb)
                                changed = True
            # upward injectivity
            parents = {}
            for u in list(region):
                ul, ur = u.child("l"), u.child("r")
                if ul in region and ur in region:
                    key = (ds[ul], ds[ur])
                    if key in parents and not ds.connected(parents[key], u):
                        ds.merge(parents[key], u)
                        changed = True
                    parents.setdefault(key, u)
        for cls in ds.subsets():
            by_base = {}
            for u in cls:
                by_base.setdefault(u.base, []).append(u.path)
            for base, paths in by_base.items():
                paths.sort(key=len)
                for i, a in enumerate(paths):
                    for b in paths[i + 1:]:
                        if b.startswith(a) and b != a:
                            raise InconsistentDiagram(f"diagram forces a cycle on {base}")
        return ds, region

    def to_json(self) -> dict:
        return {"equations": [[str(s), str(t)] for s, t in self.equations]}

    @classmethod
    def from_json(cls, data: dict) -> "ParamDiagram":
        return cls(tuple((s, t) for s, t in data.get("equations", [])))

    @classmethod
    def load(cls, path: str | Path) -> "ParamDiagram":
        return cls.from_json(json.loads(Path(path).read_text()))


@lru_cache(maxsize=4096)
def _canonical(diagram: ParamDiagram, t: Term) -> Term:
    ds, region = diagram._closure((t,))
    if t not in region:
        return t
    return min(ds.subset(t), key=Term.sort_key)


GENERIC = ParamDiagram()
