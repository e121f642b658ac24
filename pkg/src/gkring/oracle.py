"""Brute-force bounded-depth semantics, used to test everything else.

A diagram of depth p is an equality pattern of the 2^p leaves of an element's
tree: a partition of {l,r}^p and an injective partial assignment of blocks to
the named constants K. Unassigned blocks take pairwise distinct values outside
K, so the diagrams partition M into cells. A cell with k free blocks holds
(m - |K|)_k elements over a palette of m values and has class
prod_{j<k} (X - |K| - j).

Formulas are evaluated directly on the pattern; nothing here goes through
the unfolding or the simple-set machinery.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .diagram import GENERIC, ParamDiagram
from .errors import DepthBudgetExceeded, NonUniformAtom
from .grothendieck import Cardinality
from .k0 import ONE, X as CLASS_X, ZERO, K0Elem
from .syntax import (
    And,
    Eq,
    FalseF,
    Formula,
    Neq,
    Not,
    Or,
    Term,
    TrueF,
    atoms,
    max_depth,
    pack_variables,
    suffixes,
)

MAX_DEPTH = 3


# ------------------------------------------------------------- partitions


def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``n`` in lexicographic order."""
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield tuple(rgs)
            return
        for b in range(top + 2):
            rgs[i] = b
            yield from rec(i + 1, max(top, b))

    rgs[0] = 0
    yield from rec(1, 0)


def _check_depth(p: int) -> None:
    if p < 1:
        raise ValueError("oracle depth must be >= 1")
    if p > MAX_DEPTH:
        raise DepthBudgetExceeded(f"oracle depth {p} exceeds {MAX_DEPTH}")


# --------------------------------------------------------------- diagrams


@dataclass(frozen=True)
class Diagram:
    depth: int
    blocks: tuple  # restricted growth string over suffixes(depth)
    assignment: tuple  # per block: canonical constant Term or None
    nconst: int = 0  # |K|

    @property
    def free(self) -> int:
        return sum(1 for c in self.assignment if c is None)

    def leaf_value(self, leaf: str):
        b = self.blocks[_leaf_index(self.depth)[leaf]]
        c = self.assignment[b]
        return ("f", b) if c is None else ("c", c)

    def cell_class(self) -> K0Elem:
        return falling_class(self.nconst, self.free)


@lru_cache(maxsize=None)
def _leaf_index(p: int) -> dict:
    return {leaf: i for i, leaf in enumerate(suffixes(p))}


def falling_class(nconst: int, k: int) -> K0Elem:
    out = ONE
    for j in range(k):
        out = out * (CLASS_X - (nconst + j))
    return out


def falling(m: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= m - j
    return out


def enumerate_diagrams(p: int, K: Sequence[Term] = (),
                       diagram: ParamDiagram = GENERIC) -> Iterator[Diagram]:
    """Every diagram of depth ``p`` over the constants ``K``, in a fixed order."""
    _check_depth(p)
    consts = _canonical_set(K, diagram)
    for rgs in set_partitions(2 ** p):
        nblocks = max(rgs) + 1
        for assign in _injective_partial(nblocks, consts):
            yield Diagram(p, rgs, assign, len(consts))


def _canonical_set(K, diagram) -> tuple:
    return tuple(sorted({diagram.canonical(c) for c in K}, key=Term.sort_key))


def _injective_partial(nblocks: int, consts: tuple) -> Iterator[tuple]:
    options = (None,) + consts

    def rec(i: int, used: frozenset, acc: tuple):
        if i == nblocks:
            yield acc
            return
        for c in options:
            if c is None or c not in used:
                yield from rec(i + 1, used if c is None else used | {c}, acc + (c,))

    yield from rec(0, frozenset(), ())


# ------------------------------------------------------------- evaluation


class _Problem:
    """A packed one-variable formula at depth p, compiled against its
    constant set K.

    Leaf values are ints: a constant is its index in K (>= 0), a free block
    b is ``-1 - b``.
    """

    def __init__(self, f: Formula, p: Optional[int], diagram: ParamDiagram):
        g = pack_variables(f)
        need = max(1, max_depth(g))
        p = need if p is None else p
        if p < need:
            raise ValueError(f"depth {p} below formula depth {need}")
        _check_depth(p)
        self.f, self.p, self.diagram = g, p, diagram
        self.leaves = suffixes(p)
        self.index = {leaf: i for i, leaf in enumerate(self.leaves)}
        named = set()
        for a in atoms(g):
            s, t = _var_first(a.lhs, a.rhs)
            if not s.is_const and t.is_const:
                named |= {diagram.canonical(t.child(w)) for w in suffixes(p - s.depth)}
            elif not (s.is_const or t.is_const):
                if s.depth != t.depth and not _comparable(s.path, t.path):
                    raise NonUniformAtom(f"{a} relates terms of different depths")
        self.K = _canonical_set(named, diagram)
        self.kindex = {c: i for i, c in enumerate(self.K)}
        self.relevant = [0] * len(self.leaves)  # bitmask over K per leaf
        self.code = self._compile(g)
        # the code only holds ints and booleans, so its Python rendering is safe to eval
        self._holds = eval("lambda v: " + _source(self.code))

    def _compile(self, f: Formula):
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Eq):
            return self._compile_eq(f.lhs, f.rhs)
        if isinstance(f, Neq):
            return ("not", self._compile_eq(f.lhs, f.rhs))
        if isinstance(f, Not):
            return ("not", self._compile(f.arg))
        if isinstance(f, And):
            return ("and", tuple(self._compile(a) for a in f.args))
        if isinstance(f, Or):
            return ("or", tuple(self._compile(a) for a in f.args))
        raise TypeError(f)

    def _compile_eq(self, s: Term, t: Term):
        s, t = _var_first(s, t)
        if s.is_const:
            return self.diagram.equal(s, t)
        tails = suffixes(self.p - s.depth)
        if t.is_const:
            checks = []
            for w in tails:
                i = self.index[s.path + w]
                c = self.kindex[self.diagram.canonical(t.child(w))]
                self.relevant[i] |= 1 << c
                checks.append((i, c))
            return ("k", tuple(checks))
        if s.path == t.path:
            return True
        if _comparable(s.path, t.path):
            return False  # a term never equals a proper subterm
        return ("v", tuple((self.index[s.path + w], self.index[t.path + w]) for w in tails))

    def holds(self, val: Sequence[int]) -> bool:
        return self._holds(val)

    # ---- grouped enumeration

    def weighted_cells(self) -> Iterator[tuple[bool, dict]]:
        """Yield ``(satisfied, {free_blocks: multiplicity})`` covering all diagrams.

        A constant matters to the formula only on blocks containing a leaf
        where it is compared (its home blocks). Assignments to home blocks
        are enumerated; the remaining "silent" assignments are counted by
        inclusion-exclusion over matchings of forbidden (block, constant)
        pairs, which is exact and independent of their identity.
        """
        nK = len(self.K)
        for rgs in set_partitions(len(self.leaves)):
            nblocks = max(rgs) + 1
            rel = [0] * nblocks
            for i, b in enumerate(rgs):
                rel[b] |= self.relevant[i]
            home = [0] * nK  # bitmask over blocks per constant
            for b, mask in enumerate(rel):
                for c in _bits(mask):
                    home[c] |= 1 << b
            rel_lists = [tuple(_bits(m)) for m in rel]
            for assign in _home_assignments(rel_lists):
                val = [-1 - b if assign[b] < 0 else assign[b] for b in rgs]
                open_mask, used = 0, 0
                for b, c in enumerate(assign):
                    if c < 0:
                        open_mask |= 1 << b
                    else:
                        used |= 1 << c
                homes = tuple(sorted(h for c in range(nK) if not used >> c & 1
                                     for h in (home[c] & open_mask,) if h))
                spare = nK - bin(used).count("1")
                yield self.holds(val), _silent_counts(bin(open_mask).count("1"), spare, homes)


def _source(code) -> str:
    """Python expression evaluating ``code`` on the leaf values ``v``."""
    if code is True or code is False:
        return str(code)
    op, arg = code
    if op == "k":
        return "(" + " and ".join(f"v[{i}] == {c}" for i, c in arg) + ")"
    if op == "v":
        return "(" + " and ".join(f"v[{i}] == v[{j}]" for i, j in arg) + ")"
    if op == "not":
        return f"(not {_source(arg)})"
    if not arg:
        return str(op == "and")
    joiner = " and " if op == "and" else " or "
    return "(" + joiner.join(_source(a) for a in arg) + ")"


def _var_first(s: Term, t: Term) -> tuple[Term, Term]:
    return (t, s) if s.is_const and not t.is_const else (s, t)


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _home_assignments(rel: Sequence[tuple]) -> Iterator[tuple]:
    """Per block: -1 (no home constant) or a constant index, injectively."""
    n = len(rel)

    def rec(b: int, used: int, acc: tuple):
        if b == n:
            yield acc
            return
        yield from rec(b + 1, used, acc + (-1,))
        for c in rel[b]:
            if not used >> c & 1:
                yield from rec(b + 1, used | 1 << c, acc + (c,))

    yield from rec(0, 0, ())


@lru_cache(maxsize=None)
def _rook_numbers(homes: tuple) -> tuple:
    """Number of matchings of each size; ``homes`` are block bitmasks."""
    dp = {0: 1}
    for h in homes:
        new = dict(dp)
        for mask, n in dp.items():
            free = h & ~mask
            for b in _bits(free):
                m2 = mask | 1 << b
                new[m2] = new.get(m2, 0) + n
        dp = new
    out = [0] * (len(homes) + 1)
    for mask, n in dp.items():
        out[bin(mask).count("1")] += n
    return tuple(out)


@lru_cache(maxsize=None)
def _silent_counts(u: int, spare: int, homes: tuple) -> dict:
    """``{free: ways}`` for u open blocks, each free or given a distinct spare
    constant outside its homes."""
    out: dict[int, int] = {}
    for j, r in enumerate(_rook_numbers(homes)):
        if not r or j > u:
            continue
        sign = -1 if j % 2 else 1
        for t in range(u - j + 1):
            ways = falling(spare - j, t)
            if ways:
                k = u - j - t
                out[k] = out.get(k, 0) + sign * r * math.comb(u - j, t) * ways
    return {k: n for k, n in out.items() if n}


def _comparable(u: str, v: str) -> bool:
    return u.startswith(v) or v.startswith(u)


# ------------------------------------------------------ counting polynomial


@dataclass(frozen=True)
class CountPoly:
    """``sum_k n_k (m - nconst)_k``: the number of elements per pattern set."""

    nconst: int
    by_free: tuple = ()  # n_k indexed by k

    def __call__(self, m: int) -> int:
        return sum(n * falling(m - self.nconst, k) for k, n in enumerate(self.by_free))

    @property
    def is_zero(self) -> bool:
        return not any(self.by_free)

    @property
    def is_constant(self) -> bool:
        return not any(self.by_free[1:])

    def coefficients(self) -> list[int]:
        """Coefficients in m, lowest degree first."""
        out = [0]
        for k, n in enumerate(self.by_free):
            term = [1]
            for j in range(k):
                shift = -(self.nconst + j)
                term = [a * shift + b for a, b in itertools.zip_longest(term + [0], [0] + term, fillvalue=0)]
            out = [a + n * b for a, b in itertools.zip_longest(out, term, fillvalue=0)]
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    def class_value(self) -> K0Elem:
        return sum((n * falling_class(self.nconst, k) for k, n in enumerate(self.by_free)), ZERO)

    def __str__(self) -> str:
        parts = []
        for d, c in enumerate(self.coefficients()):
            if c or len(parts) == 0 and d == len(self.coefficients()) - 1:
                mono = "" if d == 0 else ("m" if d == 1 else f"m^{d}")
                coef = str(c) if d == 0 or abs(c) != 1 else ("-" if c < 0 else "")
                parts.append(f"{coef}{mono}")
        return " + ".join(reversed(parts)).replace("+ -", "- ") or "0"


def oracle_count(f: Formula, p: Optional[int] = None,
                 diagram: ParamDiagram = GENERIC) -> CountPoly:
    prob = _Problem(f, p, diagram)
    by_free = [0] * (2 ** prob.p + 1)
    for ok, mults in prob.weighted_cells():
        if ok:
            for k, n in mults.items():
                by_free[k] += n
    while len(by_free) > 1 and by_free[-1] == 0:
        by_free.pop()
    return CountPoly(len(prob.K), tuple(by_free))


def oracle_class(f: Formula, p: Optional[int] = None,
                 diagram: ParamDiagram = GENERIC) -> K0Elem:
    return oracle_count(f, p, diagram).class_value()


def oracle_sat(f: Formula, p: Optional[int] = None, diagram: ParamDiagram = GENERIC) -> bool:
    prob = _Problem(f, p, diagram)
    return any(ok for ok, _ in prob.weighted_cells())


def oracle_cardinality(f: Formula, p: Optional[int] = None,
                       diagram: ParamDiagram = GENERIC) -> Cardinality:
    return poly_cardinality(oracle_count(f, p, diagram))


def poly_cardinality(poly: CountPoly) -> Cardinality:
    """Empty, finite(n) or infinite, read off a counting polynomial."""
    if poly.is_zero:
        return Cardinality("empty", 0)
    if poly.is_constant:
        return Cardinality("finite", poly.by_free[0])
    return Cardinality("infinite")


def oracle_partition_class(p: int, K: Sequence[Term] = (),
                           diagram: ParamDiagram = GENERIC) -> K0Elem:
    """Sum of all cell classes; equals X when the cells partition M."""
    return sum((d.cell_class() for d in enumerate_diagrams(p, K, diagram)), ZERO)


def diagram_satisfies(f: Formula, d: Diagram, diagram: ParamDiagram = GENERIC) -> bool:
    """Truth of ``f`` on an explicit diagram (its K must contain the formula's)."""
    prob = _Problem(f, d.depth, diagram)
    val = []
    for leaf in prob.leaves:
        kind, v = d.leaf_value(leaf)
        if kind == "f":
            val.append(-1 - v)
        else:
            val.append(prob.kindex.get(v, len(prob.K) + d.assignment.index(v)))
    return prob.holds(val)


def palette_count(f: Formula, extra: int, p: Optional[int] = None,
                  diagram: ParamDiagram = GENERIC) -> int:
    """Count leaf labellings over K plus ``extra`` fresh values satisfying ``f``.

    Fresh values are distinct from each other and from K; equal fresh values
    on two leaves mean equal leaves. The result equals the counting
    polynomial at m = |K| + extra.
    """
    prob = _Problem(f, p, diagram)
    values = list(range(len(prob.K))) + [-1 - i for i in range(extra)]
    return sum(1 for labels in itertools.product(values, repeat=len(prob.leaves))
               if prob.holds(labels))


def problem_constants(f: Formula, p: Optional[int] = None,
                      diagram: ParamDiagram = GENERIC) -> tuple:
    return _Problem(f, p, diagram).K


# ------------------------------------------------------------ direct images


def formula_patterns(f: Formula, p: int, K: Sequence[Term] = (),
                     diagram: ParamDiagram = GENERIC) -> set:
    """(blocks, assignment) of every depth-p diagram over K satisfying f."""
    return {(d.blocks, d.assignment) for d in enumerate_diagrams(p, K, diagram)
            if diagram_satisfies(f, d, diagram)}


def _pair_value(a, b, diagram):
    if a[0] == "c" and b[0] == "c":
        s, t = a[1], b[1]
        if s.base == t.base and s.path[:-1] == t.path[:-1] and s.path.endswith("l") and t.path.endswith("r"):
            return ("c", diagram.canonical(Term(s.base, s.path[:-1])))
    return ("p", a, b)


def direct_image_patterns(frontier: dict, domain, q: int, K: Sequence[Term] = (),
                          diagram: ParamDiagram = GENERIC) -> set:
    """Depth-q patterns of the points h(x), x in the simple set ``domain``.

    ``frontier`` maps each y-address to an x-term or a constant term. The
    point x is a value tree whose depth-p leaves are free symbols (one per
    class) or constants; y is evaluated from the constraints on that tree.
    Every free symbol descendant that reaches a y-leaf is then labelled with
    a constant of K or a fresh value, in every possible way. This realises
    all patterns only when each y-leaf is a single descendant or a constant,
    which holds exactly for simple images; otherwise NonUniformAtom.
    """
    _check_depth(q)
    p = domain.depth

    def value(node: str):
        if len(node) >= p:
            cls = domain.leaf_class[node[:p]]
            c = domain.constants[cls]
            if c is not None:
                return ("c", diagram.canonical(c.child(node[p:])))
            return ("v", cls, node[p:])
        return _pair_value(value(node + "l"), value(node + "r"), diagram)

    leaves = suffixes(q)
    ys = []
    for leaf in leaves:
        w = next(w for w in frontier if leaf.startswith(w))
        t, s = frontier[w], leaf[len(w):]
        ys.append(("c", diagram.canonical(t.child(s))) if t.is_const else value(t.path + s))
    consts = _canonical_set(list(K) + [v[1] for v in ys if v[0] == "c"], diagram)
    slots = sorted({v for v in ys if v[0] == "v"})
    if any(v[0] == "p" for v in ys) or len({(v[1], len(v[2])) for v in slots}) != len({v[1] for v in slots}):
        raise NonUniformAtom("the image ties nodes of different depths")
    index = {v: i for i, v in enumerate(slots)}
    out = set()

    def emit(labels):
        rgs, blocks, assign = [], {}, []
        for v in ys:
            lab = ("k", v[1]) if v[0] == "c" else labels[index[v]]
            if lab not in blocks:
                blocks[lab] = len(blocks)
                assign.append(lab[1] if lab[0] == "k" else None)
            rgs.append(blocks[lab])
        out.add((tuple(rgs), tuple(assign)))

    def rec(i: int, fresh: int, acc: tuple):
        if i == len(slots):
            emit(acc)
            return
        for c in consts:
            rec(i + 1, fresh, acc + (("k", c),))
        for j in range(fresh + 1):
            rec(i + 1, max(fresh, j + 1), acc + (("f", j),))

    rec(0, 0, ())
    return out


def image_matches(frontier: dict, domain, image_formula: Formula, q: int,
                  diagram: ParamDiagram = GENERIC) -> bool:
    """The direct image of ``domain`` equals the set of ``image_formula``
    (a depth-q formula): every direct pattern satisfies it, and the number
    of direct patterns with k free blocks is the formula's n_k."""
    K = problem_constants(image_formula, q, diagram)
    pats = direct_image_patterns(frontier, domain, q, K, diagram)
    if any(c is not None and c not in K for _, assign in pats for c in assign):
        return False
    prob = _Problem(image_formula, q, diagram)
    for blocks, assign in pats:
        if not diagram_satisfies(image_formula, Diagram(q, blocks, assign, len(K)), diagram):
            return False
    poly = oracle_count(image_formula, q, diagram)
    by_free = [0] * (len(poly.by_free) + 2 ** q)
    for _, assign in pats:
        by_free[sum(1 for c in assign if c is None)] += 1
    while len(by_free) > 1 and by_free[-1] == 0:
        by_free.pop()
    return prob.p == q and tuple(by_free) == poly.by_free
