"""Terms, quantifier-free formulas, parsing and printing, depth, packing and
unfolding over the signature {l, r}.

Addresses are root-to-node words over ``"l"``/``"r"``: the term ``x@"lr"``
is ``r(l(x))``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from .errors import (
    DepthTooSmall,
    FormulaSyntaxError,
    NonUniformAtom,
    QuantifierNotSupported,
)

_VAR_RE = re.compile(r"[xy][0-9]*\Z")


@dataclass(frozen=True)
class Var:
    name: str

    @property
    def index(self) -> Optional[int]:
        """Position used by packing: ``x`` and ``x1`` are 1, ``xk`` is k."""
        if not self.name.startswith("x"):
            return None
        digits = self.name[1:]
        return int(digits) if digits else 1

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return "#" + self.name


Base = Union[Var, Const]

X = Var("x")
Y = Var("y")


@dataclass(frozen=True)
class Term:
    base: Base
    path: str = ""

    def __post_init__(self):
        if self.path.strip("lr"):
            raise ValueError(f"bad address {self.path!r}")

    @property
    def is_const(self) -> bool:
        return isinstance(self.base, Const)

    @property
    def depth(self) -> int:
        return len(self.path)

    def child(self, letters: str) -> "Term":
        return Term(self.base, self.path + letters)

    def sort_key(self) -> tuple:
        return (int(self.is_const), self.base.name, len(self.path), self.path)

    def __str__(self) -> str:
        s = str(self.base)
        for letter in self.path:
            s = f"{letter}({s})"
        return s


def var(path: str = "", name: str = "x") -> Term:
    return Term(Var(name), path)


def const(name: str, path: str = "") -> Term:
    return Term(Const(name), path)


def suffixes(k: int) -> list[str]:
    return _suffixes(k)


@lru_cache(maxsize=None)
def _suffixes(k: int) -> list[str]:
    return ["".join(s) for s in itertools.product("lr", repeat=k)]


def prefix_comparable(u: str, v: str) -> bool:
    return u.startswith(v) or v.startswith(u)


# ---------------------------------------------------------------- formulas


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Neq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Or(Formula):
    args: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Atom = (Eq, Neq)


def is_atom(f: Formula) -> bool:
    return isinstance(f, Atom)


def conj(args: Iterable[Formula]) -> Formula:
    """Flattening conjunction with constant folding."""
    out: list[Formula] = []
    seen = set()
    for a in args:
        parts = a.args if isinstance(a, And) else (a,)
        for b in parts:
            if b == FALSE:
                return FALSE
            if b == TRUE or b in seen:
                continue
            seen.add(b)
            out.append(b)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(args: Iterable[Formula]) -> Formula:
    out: list[Formula] = []
    seen = set()
    for a in args:
        parts = a.args if isinstance(a, Or) else (a,)
        for b in parts:
            if b == TRUE:
                return TRUE
            if b == FALSE or b in seen:
                continue
            seen.add(b)
            out.append(b)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def negate_atom(a: Formula) -> Formula:
    if isinstance(a, Eq):
        return Neq(a.lhs, a.rhs)
    if isinstance(a, Neq):
        return Eq(a.lhs, a.rhs)
    raise TypeError(a)


def atoms(f: Formula) -> Iterator[Formula]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from atoms(a)


def terms(f: Formula) -> Iterator[Term]:
    for a in atoms(f):
        yield a.lhs
        yield a.rhs


def variables(f: Formula) -> set[Var]:
    return {t.base for t in terms(f) if not t.is_const}


def constant_terms(f: Formula) -> set[Term]:
    return {t for t in terms(f) if t.is_const}


def depth_of_formula(f: Formula, v: Var | str = X) -> int:
    """Longest address of a term on ``v`` occurring in ``f`` (0 if absent)."""
    if isinstance(v, str):
        v = Var(v)
    return max((t.depth for t in terms(f) if t.base == v), default=0)


def max_depth(f: Formula) -> int:
    return max((t.depth for t in terms(f) if not t.is_const), default=0)


def nnf(f: Formula) -> Formula:
    """Negation normal form with constant folding; atoms become Eq/Neq."""
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, TrueF):
        return FALSE if neg else TRUE
    if isinstance(f, FalseF):
        return TRUE if neg else FALSE
    if isinstance(f, Atom):
        return negate_atom(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, And):
        parts = [_nnf(a, neg) for a in f.args]
        return disj(parts) if neg else conj(parts)
    if isinstance(f, Or):
        parts = [_nnf(a, neg) for a in f.args]
        return conj(parts) if neg else disj(parts)
    raise TypeError(f)


# ----------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<neq>!=)|(?P<const>#[A-Za-z][A-Za-z0-9_]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[()=!&|.])|(?P<quant>[∀∃])|(?P<bad>\S))"
)
_QUANTIFIERS = {"exists", "forall", "ex", "all"}


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = self._lex(text)
        self.i = 0

    def _byte(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def _lex(self, text: str) -> list[_Tok]:
        out = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                break
            kind = m.lastgroup
            start = m.start(kind)
            tok = m.group(kind)
            if kind == "bad":
                raise FormulaSyntaxError(f"unexpected character {tok!r}", self._byte(start), text)
            if kind == "quant" or (kind == "ident" and tok in _QUANTIFIERS):
                raise QuantifierNotSupported("quantifiers are not supported", self._byte(start), text)
            if kind == "punct":
                kind = tok
            elif kind == "neq":
                kind = "!="
            out.append(_Tok(kind, tok, self._byte(start)))
            pos = m.end()
        out.append(_Tok("eof", "", self._byte(len(text))))
        return out

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: Optional[str] = None) -> _Tok:
        tok = self.toks[self.i]
        if kind is not None and tok.kind != kind:
            want = "end of input" if kind == "eof" else repr(kind)
            got = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise FormulaSyntaxError(f"expected {want}, got {got}", tok.offset, self.text)
        self.i += 1
        return tok

    def formula(self) -> Formula:
        args = [self.conjunction()]
        while self.peek().kind == "|":
            self.take()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.peek().kind == "&":
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.take()
            return Not(self.unary())
        if tok.kind == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok.kind == "ident" and tok.text in ("true", "false"):
            self.take()
            return TRUE if tok.text == "true" else FALSE
        return self.atom()

    def atom(self) -> Formula:
        lhs = self.term()
        tok = self.peek()
        if tok.kind == "=":
            self.take()
            return Eq(lhs, self.term())
        if tok.kind == "!=":
            self.take()
            return Neq(lhs, self.term())
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise FormulaSyntaxError(f"expected '=' or '!=', got {got}", tok.offset, self.text)

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "const":
            self.take()
            return Term(Const(tok.text[1:]))
        if tok.kind == "ident":
            if tok.text in ("l", "r"):
                self.take()
                self.take("(")
                inner = self.term()
                self.take(")")
                return inner.child(tok.text)
            if _VAR_RE.match(tok.text):
                self.take()
                return Term(Var(tok.text))
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise FormulaSyntaxError(f"expected a term, got {got}", tok.offset, self.text)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.take("eof")
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.take("eof")
    return t


# ---------------------------------------------------------------- printing

_PREC = {Or: 1, And: 2, Not: 3}


def to_text(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Eq):
        return f"{f.lhs} = {f.rhs}"
    if isinstance(f, Neq):
        return f"{f.lhs} != {f.rhs}"
    if isinstance(f, Not):
        inner = to_text(f.arg)
        if isinstance(f.arg, (And, Or)):
            inner = f"({inner})"
        return "!" + inner
    if isinstance(f, And):
        return " & ".join(_wrap(a, (And, Or)) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a, (Or,)) for a in f.args)
    raise TypeError(f)


def _wrap(f: Formula, bracket: tuple) -> str:
    s = to_text(f)
    if isinstance(f, bracket) or (isinstance(f, (And, Or)) and len(f.args) < 2):
        return f"({s})"
    return s


# --------------------------------------------------------------- unfolding


def _const_equal(s: Term, t: Term, diagram) -> bool:
    if diagram is None:
        return s == t
    return diagram.equal(s, t)


def unfold_atom(a: Formula, p: int, diagram=None) -> Formula:
    """Rewrite ``a`` so that variable terms sit at address length ``p``.

    Uses x_w = t  <=>  x_wl = l(t) & x_wr = r(t). Equalities between terms of
    the same variable with prefix-comparable, distinct addresses are false
    (no cycles). Var-var equalities of unequal lengths cannot reach uniform
    depth; they are pushed until the deeper side is a leaf.
    """
    if not isinstance(a, Atom):
        raise TypeError(a)
    positive = isinstance(a, Eq)
    s, t = a.lhs, a.rhs
    for u in (s, t):
        if not u.is_const and u.depth > p:
            raise DepthTooSmall(f"term {u} is deeper than {p}")
    if s == t:
        return TRUE if positive else FALSE
    if s.is_const and t.is_const:
        eq = _const_equal(s, t, diagram)
        return TRUE if eq == positive else FALSE
    if s.is_const:
        s, t = t, s
    if not t.is_const:
        if s.base == t.base and prefix_comparable(s.path, t.path):
            return FALSE if positive else TRUE
        if (s.base.name, s.path) > (t.base.name, t.path):
            s, t = t, s
        k = p - max(s.depth, t.depth)
    else:
        k = p - s.depth
    if k == 0:
        return Eq(s, t) if positive else Neq(s, t)
    cls = Eq if positive else Neq
    parts = [cls(s.child(w), t.child(w)) for w in suffixes(k)]
    return And(tuple(parts)) if positive else Or(tuple(parts))


def unfold_formula(f: Formula, p: int, diagram=None) -> Formula:
    """Equivalent NNF formula whose atoms relate depth-``p`` terms."""
    return _unfold(nnf(f), p, diagram)


def _unfold(f: Formula, p: int, diagram) -> Formula:
    if isinstance(f, Atom):
        return unfold_atom(f, p, diagram)
    if isinstance(f, And):
        return conj(_unfold(a, p, diagram) for a in f.args)
    if isinstance(f, Or):
        return disj(_unfold(a, p, diagram) for a in f.args)
    return f


def atom_is_uniform(a: Formula, p: int) -> bool:
    return all(t.is_const or t.depth == p for t in (a.lhs, a.rhs))


def is_uniform(f: Formula, p: int) -> bool:
    """True when every atom of the (unfolded) formula lives on depth-p leaves."""
    return all(atom_is_uniform(a, p) for a in atoms(f))


def require_uniform(f: Formula, p: int) -> None:
    for a in atoms(f):
        if not atom_is_uniform(a, p):
            raise NonUniformAtom(f"atom {to_text(a)} is not at uniform depth {p}")


# ----------------------------------------------------------------- packing


def pack_code(k: int, n: int) -> str:
    """Right-comb prefix code: ``r^(k-1) l`` for k < n, ``r^(n-1)`` for k = n."""
    if not 1 <= k <= n:
        raise ValueError(f"variable index {k} outside 1..{n}")
    return "r" * (k - 1) + ("l" if k < n else "")


def pack_variables(f: Formula, n: Optional[int] = None) -> Formula:
    """Rewrite a formula over x1..xn as one over the single variable x.

    The packed set is the image of the original under M^n -> M.
    """
    vs = variables(f)
    for v in vs:
        if v.index is None:
            raise ValueError(f"cannot pack variable {v}")
    top = max((v.index for v in vs), default=1)
    n = top if n is None else n
    if top > n:
        raise ValueError(f"formula mentions x{top} but n={n}")
    if n == 1:
        return f
    return _map_terms(f, lambda t: t if t.is_const else Term(X, pack_code(t.base.index, n) + t.path))


def rename(f: Formula, mapping: dict) -> Formula:
    """Substitute variable bases (``Var -> Var``)."""
    return _map_terms(f, lambda t: t if t.is_const else Term(mapping.get(t.base, t.base), t.path))


def _map_terms(f: Formula, fn) -> Formula:
    if isinstance(f, Eq):
        return Eq(fn(f.lhs), fn(f.rhs))
    if isinstance(f, Neq):
        return Neq(fn(f.lhs), fn(f.rhs))
    if isinstance(f, Not):
        return Not(_map_terms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(_map_terms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_map_terms(a, fn) for a in f.args))
    return f


def prepare(f: Formula, nvars: Optional[int] = None, p: Optional[int] = None,
            diagram=None) -> tuple[Formula, int]:
    """Pack, choose a depth (at least 1) and unfold. Returns ``(g, p)``."""
    g = pack_variables(f, nvars)
    need = max(1, max_depth(g))
    if p is None:
        p = need
    elif p < need:
        raise DepthTooSmall(f"depth {p} < formula depth {need}")
    return unfold_formula(g, p, diagram), p


def formula_of_atoms(items: Sequence[Formula]) -> Formula:
    return conj(items)
