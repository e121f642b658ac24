"""Definable injections in normal form: validation, injectivity, images of
simple sets, extension to whole positive sets and adapted decompositions.

A normal formula is a domain formula in x plus equalities y@w = x@u or
y@w = constant whose y-addresses form a complete antichain, so y is a
function of x. Images of simple sets are computed leaf by leaf: every
y-leaf equals either a constant or a descendant a@s of a free class a of the
domain simple set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .decomposition import Decomposition, ElementaryPiece, decompose, make_elementary
from .diagram import GENERIC, ParamDiagram
from .errors import (
    DomainMismatch,
    NotAFunction,
    NotInjective,
    WrongShape,
)
from .grothendieck import class_of_formula, satisfiable
from .k0 import ZERO, K0Elem
from .primitive import _cover, analyze_parametric, primitive_atoms
from .simple import ClosedSet, SimpleSet, irreducible_components
from .unify import GeneralSet
from .syntax import (
    FALSE,
    TRUE,
    Eq,
    Formula,
    Neq,
    Not,
    Term,
    Var,
    X,
    Y,
    conj,
    disj,
    max_depth,
    pack_variables,
    parse,
    rename,
    suffixes,
    to_text,
)

X1, X2, X3 = Var("x1"), Var("x2"), Var("x3")


@dataclass(frozen=True)
class NormalFormula:
    domain: Formula = TRUE
    constraints: tuple = ()  # Eq atoms, y-term on the left

    def __post_init__(self):
        out = []
        for a in self.constraints:
            if not isinstance(a, Eq):
                raise WrongShape(f"constraint is not an equality: {to_text(a)}")
            s, t = a.lhs, a.rhs
            if t.base == Y and not t.is_const:
                s, t = t, s
            if s.is_const or s.base != Y:
                raise WrongShape(f"constraint without a y-term: {to_text(a)}")
            if not t.is_const and t.base != X:
                raise WrongShape(f"constraint must relate y to x or a constant: {to_text(a)}")
            out.append(Eq(s, t))
        object.__setattr__(self, "constraints", tuple(out))

    @classmethod
    def parse(cls, constraints: str, domain: str = "true") -> "NormalFormula":
        return cls(parse(domain), tuple(primitive_atoms(parse(constraints))))

    def constraint_formula(self) -> Formula:
        return conj(self.constraints)

    def graph(self) -> Formula:
        """psi(x, y): domain and constraints."""
        return conj([self.domain, self.constraint_formula()])

    def with_domain(self, domain: Formula) -> "NormalFormula":
        return NormalFormula(domain, self.constraints)

    def frontier(self) -> dict[str, Term]:
        """y-address -> value term, after validation."""
        validate_normal(self)
        out: dict[str, Term] = {}
        for a in sorted(self.constraints, key=lambda a: (a.lhs.path, a.rhs.sort_key())):
            out.setdefault(a.lhs.path, a.rhs)
        return out

    def side_conditions(self) -> Formula:
        """Equalities on x forced by two constraints on one y-address."""
        seen: dict[str, Term] = {}
        extra = []
        for a in sorted(self.constraints, key=lambda a: (a.lhs.path, a.rhs.sort_key())):
            if a.lhs.path in seen:
                extra.append(Eq(seen[a.lhs.path], a.rhs))
            else:
                seen[a.lhs.path] = a.rhs
        return conj(extra)

    def x_depth(self) -> int:
        return max((a.rhs.depth for a in self.constraints if not a.rhs.is_const), default=0)

    def __str__(self) -> str:
        return f"{to_text(self.domain)} :: {to_text(self.constraint_formula())}"


def validate_normal(nf: NormalFormula) -> None:
    """Raise unless the constraints are extended in y and determine y."""
    res = analyze_parametric(nf.constraint_formula(), Y) if nf.constraints else None
    if res is None or res.kind != "always_singleton_or_empty":
        raise NotAFunction(f"y is not determined by {to_text(nf.constraint_formula())}")
    pins = {a.lhs.path for a in nf.constraints}
    if _cover("", pins, max(len(w) for w in pins)) is None:
        raise NotAFunction("y-addresses do not cover the tree")


def _contained(b: SimpleSet, f: Formula, diagram: ParamDiagram) -> bool:
    """B is a subset of the set of f (decided by the engine)."""
    return not satisfiable(conj([b.to_formula(), Not(f)]), diagram)


def _require_domain(nf: NormalFormula, b: SimpleSet) -> None:
    if not _contained(b, conj([nf.domain, nf.side_conditions()]), b.diagram):
        raise DomainMismatch(f"[{b}] is not inside the domain {to_text(nf.domain)}")


# ------------------------------------------------------------- images


def _lifted(nf: NormalFormula, b: SimpleSet) -> SimpleSet:
    return b.lift(max(b.depth, nf.x_depth()))


def injective_on(nf: NormalFormula, b: SimpleSet, check_domain: bool = True) -> bool:
    """y determines x on B iff every free class of B has a leaf below an
    x-term used by the constraints."""
    front = nf.frontier()
    if check_domain:
        _require_domain(nf, b)
    if b.empty:
        return True
    lb = _lifted(nf, b)
    used = [t.path for t in front.values() if not t.is_const]
    for cl, c in zip(lb.classes, lb.constants):
        if c is None and not any(leaf.startswith(u) for leaf in cl for u in used):
            return False
    return True


def image_depth(nf: NormalFormula, b: SimpleSet) -> int:
    front = nf.frontier()
    p = max(b.depth, nf.x_depth())
    q = 1
    for w, t in front.items():
        q = max(q, len(w) if t.is_const else len(w) + p - t.depth)
    return q


def _descriptors(nf: NormalFormula, b: SimpleSet, q: int):
    """For every y-leaf at depth q: ("c", term) or ("a", class, sigma),
    meaning the leaf equals the descendant sigma of a free class of B."""
    lb = _lifted(nf, b)
    P = lb.depth
    out = []
    for w, t in sorted(nf.frontier().items()):
        for s in suffixes(q - len(w)):
            if t.is_const:
                out.append((w + s, ("c", t.child(s))))
                continue
            node = t.path + s
            cls = lb.leaf_class[node[:P]]
            const = lb.constants[cls]
            if const is not None:
                out.append((w + s, ("c", const.child(node[P:]))))
            else:
                out.append((w + s, ("a", cls, node[P:])))
    return out


def _check_image(nf: NormalFormula, b: SimpleSet, q: Optional[int], check_domain: bool) -> int:
    if not injective_on(nf, b, check_domain):
        raise NotInjective(f"not injective on [{b}]")
    q0 = image_depth(nf, b)
    q = q0 if q is None else q
    if q < q0:
        raise ValueError(f"image depth {q} below {q0}")
    return q


def image_of_simple(nf: NormalFormula, b: SimpleSet, q: Optional[int] = None,
                    check_domain: bool = True) -> tuple[int, SimpleSet]:
    """The image h(B), a simple set of depth q (the smallest workable q by
    default; any larger q may be requested).

    WrongShape when one free class of B reaches the y-leaves at two
    different depths: the image then ties nodes of different depths and is
    only described by ``image_primitive``.
    """
    q = _check_image(nf, b, q, check_domain)
    if b.empty:
        return q, SimpleSet.empty_set(q, b.diagram)
    merges, pins = [], []
    owner: dict[tuple, str] = {}
    sigma_len: dict[int, int] = {}
    for leaf, d in _descriptors(nf, b, q):
        if d[0] == "c":
            pins.append((leaf, d[1]))
            continue
        _, cls, sigma = d
        if sigma_len.setdefault(cls, len(sigma)) != len(sigma):
            raise WrongShape("image is not a simple set of uniform depth")
        if (cls, sigma) in owner:
            merges.append((owner[cls, sigma], leaf))
        else:
            owner[cls, sigma] = leaf
    return q, SimpleSet.build(q, merges, pins, b.diagram)


def image_primitive(nf: NormalFormula, b: SimpleSet, check_domain: bool = True) -> Formula:
    """A positive primitive formula in x defining h(B), simple or not."""
    q = _check_image(nf, b, None, check_domain)
    if b.empty:
        return FALSE
    desc = _descriptors(nf, b, q)
    shortest: dict[int, int] = {}
    for _, d in desc:
        if d[0] == "a":
            shortest[d[1]] = min(shortest.get(d[1], len(d[2])), len(d[2]))
    # each free class is recovered from the leaves carrying its shortest suffixes
    owner: dict[tuple, str] = {}
    for leaf, d in desc:
        if d[0] == "a" and len(d[2]) == shortest[d[1]]:
            owner.setdefault((d[1], d[2]), leaf)
    out = []
    for leaf, d in desc:
        if d[0] == "c":
            out.append(Eq(Term(X, leaf), d[1]))
            continue
        _, cls, sigma = d
        k = shortest[cls]
        ref = owner[cls, sigma[:k]] + sigma[k:]
        if ref != leaf:
            out.append(Eq(Term(X, leaf), Term(X, ref)))
    return conj(out)


def image_of_closed(nf: NormalFormula, c: ClosedSet, q: int, check_domain: bool = True) -> ClosedSet:
    return irreducible_components(
        [image_of_simple(nf, k, q, check_domain)[1] for k in c.components], q)


def extend_to(nf: NormalFormula, b: SimpleSet) -> NormalFormula:
    """Same constraints with domain B. Requires the old domain to meet B."""
    if not satisfiable(conj([b.to_formula(), nf.domain]), b.diagram):
        raise DomainMismatch(f"the domain does not meet [{b}]")
    out = nf.with_domain(b.to_formula())
    validate_normal(out)
    if not satisfiable(conj([b.to_formula(), nf.side_conditions()]), b.diagram) or \
            not _contained(b, nf.side_conditions(), b.diagram):
        raise NotAFunction("constraints are not functional on all of B")
    return out


# --------------------------------------------------- piecewise functions


@dataclass(frozen=True)
class PiecewiseFunction:
    pieces: tuple = ()  # NormalFormula, each with its guard as domain
    name: str = ""

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "PiecewiseFunction":
        pieces = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("--", 1)[0].strip()
            if not line:
                continue
            if not line.startswith("piece ") or "::" not in line:
                raise WrongShape(f"line {lineno}: expected 'piece <guard> :: <constraints>'")
            guard, body = line[len("piece "):].split("::", 1)
            pieces.append(NormalFormula.parse(body.strip(), guard.strip()))
        return cls(tuple(pieces), name)

    def to_text(self) -> str:
        return "".join(f"piece {to_text(nf.domain)} :: {to_text(nf.constraint_formula())}\n"
                       for nf in self.pieces)

    def to_json(self) -> dict:
        return {"name": self.name, "pieces": [
            {"guard": to_text(nf.domain), "constraints": [to_text(a) for a in nf.constraints]}
            for nf in self.pieces]}

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseFunction":
        return cls(tuple(NormalFormula(parse(p["guard"]), tuple(parse(a) for a in p["constraints"]))
                         for p in data["pieces"]), data.get("name", ""))

    @classmethod
    def load(cls, path: str | Path) -> "PiecewiseFunction":
        text = Path(path).read_text()
        if text.lstrip().startswith("{"):
            return cls.from_json(json.loads(text))
        return cls.from_text(text, Path(path).stem)

    def domain(self) -> Formula:
        return disj(nf.domain for nf in self.pieces)


def _graph(nf: NormalFormula, xv: Var, yv: Var) -> Formula:
    return rename(nf.graph(), {X: xv, Y: yv})


@dataclass
class FunctionReport:
    ok: bool
    problems: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "problems": self.problems}


def check_function(h: PiecewiseFunction, domain: Optional[Formula] = None,
                   diagram: ParamDiagram = GENERIC) -> FunctionReport:
    """Validate each piece, disjointness of guards, and injectivity on the
    union of the guards (restricted to ``domain`` when given).

    Injectivity is refuted symbolically: psi_j(x1, x3) & psi_k(x2, x3) &
    x1 != x2 must be unsatisfiable for every pair of pieces.
    """
    problems = []
    for i, nf in enumerate(h.pieces):
        try:
            validate_normal(nf)
        except Exception as e:  # report, do not stop
            problems.append(f"piece {i}: {type(e).__name__}: {e}")
    if problems:
        return FunctionReport(False, problems)
    dom = TRUE if domain is None else domain
    for i, a in enumerate(h.pieces):
        for j, b in enumerate(h.pieces):
            if j <= i:
                continue
            both = conj([rename(a.domain, {X: X1}), rename(b.domain, {X: X1}), rename(dom, {X: X1})])
            if satisfiable(both, diagram):
                problems.append(f"guards {i} and {j} overlap")
    for i, a in enumerate(h.pieces):
        for j, b in enumerate(h.pieces):
            if j < i:
                continue
            clash = conj([_graph(a, X1, X3), _graph(b, X2, X3), rename(dom, {X: X1}),
                          rename(dom, {X: X2}), Neq(Term(X1, ""), Term(X2, ""))])
            if satisfiable(clash, diagram, nvars=3):
                problems.append(f"pieces {i} and {j} identify two points")
    return FunctionReport(not problems, problems)


# --------------------------------------------------- adapted decomposition


def _includes(a: Formula, b: Formula, diagram: ParamDiagram) -> bool:
    return not satisfiable(conj([b, Not(a)]), diagram)


def _is_singleton(f: Formula, diagram: ParamDiagram) -> bool:
    state = GeneralSet.full(diagram).conjoin(primitive_atoms(f))
    return not state.empty and state.free_class_count == 0


def closed_components(parts, diagram: ParamDiagram = GENERIC) -> list[Formula]:
    """Irredundant members of a union of irreducible sets given by positive
    primitive formulas (containment decided by the engine)."""
    items = [f for f in dict.fromkeys(parts) if satisfiable(f, diagram)]
    keep = []
    for i, f in enumerate(items):
        dominated = False
        for j, g in enumerate(items):
            if i != j and _includes(g, f, diagram):
                # equal sets: keep the first one only
                if not _includes(f, g, diagram) or j < i:
                    dominated = True
                    break
        if not dominated:
            keep.append(f)
    return keep


@dataclass(frozen=True)
class AdaptedPiece:
    piece: ElementaryPiece
    branch: int  # index of the function piece used
    extension: NormalFormula
    image_positive: Formula
    image_negative: tuple  # irredundant components of h(C), as formulas
    image_simple: Optional[SimpleSet] = None  # h(B) at the common depth, when simple
    diagram: ParamDiagram = field(default=GENERIC, repr=False)

    def image_formula(self) -> Formula:
        if not self.image_negative:
            return self.image_positive
        return conj([self.image_positive, Not(disj(self.image_negative))])

    def counts(self) -> tuple[int, int, int, int]:
        """Components of C and h(C), then singleton components of each."""
        c = self.piece.negative
        singles = sum(1 for f in self.image_negative if _is_singleton(f, self.diagram))
        return len(c), len(self.image_negative), c.singleton_count(), singles


@dataclass(frozen=True)
class AdaptedDecomposition:
    decomposition: Decomposition
    p: int
    q: int
    pieces: tuple

    def image_formula(self) -> Formula:
        return disj(ap.image_formula() for ap in self.pieces)

    def image_class(self, diagram: ParamDiagram = GENERIC) -> K0Elem:
        """Class of h(A), summed over the pieces' images (pairwise disjoint
        because h is injective)."""
        return sum((class_of_formula(ap.image_formula(), diagram) for ap in self.pieces), ZERO)

    def counts_match(self) -> bool:
        return all(a == b and s == t for a, b, s, t in (ap.counts() for ap in self.pieces))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "pieces": [{
                "piece": ap.piece.to_json(),
                "branch": ap.branch,
                "image": {
                    "positive": to_text(ap.image_positive),
                    "negative": [to_text(f) for f in ap.image_negative],
                    "simple": None if ap.image_simple is None else ap.image_simple.to_json(),
                },
                "counts": dict(zip(["C", "C'", "singletonsC", "singletonsC'"], ap.counts())),
            } for ap in self.pieces],
        }


def adapted_decomposition(h: PiecewiseFunction, a: Formula, p: Optional[int] = None,
                          diagram: ParamDiagram = GENERIC, elementary: bool = True) -> AdaptedDecomposition:
    """Decompose A so that each piece lies in one guard, extend that
    branch to the piece's positive set, and push the piece forward."""
    guards = [nf.domain for nf in h.pieces]
    need = max([max_depth(a)] + [max_depth(g) for g in guards] + [nf.x_depth() for nf in h.pieces] + [1])
    p = need if p is None else p
    if satisfiable(conj([a, Not(disj(guards))]), diagram):
        raise DomainMismatch("the set is not inside the union of the guards")
    # the guards' atoms become basic sets, so each sign pattern fixes the branch
    split = disj(conj([a, g]) for g in guards)
    dec = decompose(split, p, diagram, coarse=True)
    if elementary:
        dec = make_elementary(dec)
    chosen = []
    for pc in dec.pieces:
        branch = None
        for j, nf in enumerate(h.pieces):
            if satisfiable(conj([pc.to_formula(), nf.domain]), diagram):
                if branch is not None:
                    raise NotInjective("guards overlap on a piece")
                branch = j
        if branch is None:
            raise DomainMismatch("a piece lies outside every guard")
        ext = extend_to(h.pieces[branch], pc.positive)
        if not injective_on(ext, pc.positive, check_domain=False):
            raise NotInjective(f"branch {branch} is not injective on [{pc.positive}]")
        chosen.append((pc, branch, ext))
    q = max([image_depth(ext, pc.positive) for pc, _, ext in chosen] + [1])
    out = []
    for pc, branch, ext in chosen:
        try:
            simple = image_of_simple(ext, pc.positive, q, check_domain=False)[1]
        except WrongShape:
            simple = None
        pos = image_primitive(ext, pc.positive, check_domain=False)
        neg = closed_components([image_primitive(ext, k, check_domain=False)
                                 for k in pc.negative.components], diagram)
        out.append(AdaptedPiece(pc, branch, ext, pos, tuple(neg), simple, diagram))
    return AdaptedDecomposition(dec, p, q, tuple(out))


def image_formula(h: PiecewiseFunction, a: Formula, diagram: ParamDiagram = GENERIC) -> Formula:
    """A quantifier-free formula in x defining h(A)."""
    return adapted_decomposition(h, a, diagram=diagram, elementary=False).image_formula()


# ---------------------------------------------------------------- catalog


CATALOG_TEXT = {
    "identity": "piece true :: y = x",
    "swap": "piece true :: l(y) = r(x) & r(y) = l(x)",
    "graft_right": "piece true :: l(y) = x & r(y) = #c",
    "graft_left": "piece true :: l(y) = #c & r(y) = x",
    "rotate": "piece true :: l(y) = l(l(x)) & l(r(y)) = r(l(x)) & r(r(y)) = r(x)",
    "unrotate": "piece true :: l(l(y)) = l(x) & r(l(y)) = l(r(x)) & r(y) = r(r(x))",
    "swap_left": "piece true :: l(l(y)) = r(l(x)) & r(l(y)) = l(l(x)) & r(y) = r(x)",
    "swap_right": "piece true :: l(y) = l(x) & l(r(y)) = r(r(x)) & r(r(y)) = l(r(x))",
    "mirror": ("piece true :: l(l(y)) = r(r(x)) & r(l(y)) = l(r(x)) & "
               "l(r(y)) = r(l(x)) & r(r(y)) = l(l(x))"),
    "graft_deep": "piece true :: l(y) = x & l(r(y)) = #c & r(r(y)) = #d",
    "swap_off_diagonal": "piece l(x) = r(x) :: y = x\npiece l(x) != r(x) :: l(y) = r(x) & r(y) = l(x)",
    "exchange_points": ("piece l(x) = #c & r(x) = #d :: l(y) = #d & r(y) = #c\n"
                        "piece l(x) = #d & r(x) = #c :: l(y) = #c & r(y) = #d\n"
                        "piece !(l(x) = #c & r(x) = #d) & !(l(x) = #d & r(x) = #c) :: y = x"),
    "swap_under_c": ("piece l(x) = #c :: l(y) = #c & l(r(y)) = r(r(x)) & r(r(y)) = l(r(x))\n"
                     "piece l(x) != #c :: y = x"),
}


def catalog() -> dict[str, PiecewiseFunction]:
    return {name: PiecewiseFunction.from_text(text, name) for name, text in CATALOG_TEXT.items()}
