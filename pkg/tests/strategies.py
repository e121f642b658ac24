"""Hypothesis strategies for formulas, simple sets and normal maps."""

from hypothesis import strategies as st

from gkring.simple import SimpleSet
from gkring.syntax import Eq, Neq, Not, Term, Var, X, conj, const, disj, suffixes

X1, X2 = Var("x1"), Var("x2")
CONSTS = ("c", "d")


def paths(max_len):
    return st.integers(0, max_len).flatmap(
        lambda k: st.sampled_from(suffixes(k)) if k else st.just(""))


def const_terms(max_path=1):
    return st.builds(const, st.sampled_from(CONSTS), paths(max_path))


@st.composite
def atoms(draw, variables=(X,), depth=2, positive=False):
    """An atom whose variable sides have equal path length (uniform once packed)."""
    v = draw(st.sampled_from(variables))
    w = draw(paths(depth))
    lhs = Term(v, w)
    if draw(st.booleans()):
        w2 = draw(st.sampled_from(suffixes(len(w)))) if w else ""
        rhs = Term(draw(st.sampled_from(variables)), w2)
    else:
        rhs = draw(const_terms(min(1, depth - len(w))))
    if positive or draw(st.integers(0, 9)) < 6:
        return Eq(lhs, rhs)
    return Neq(lhs, rhs)


def formulas(variables=(X,), depth=2, max_leaves=5):
    base = atoms(variables, depth)
    return st.recursive(
        base,
        lambda inner: st.one_of(
            st.lists(inner, min_size=2, max_size=3).map(conj),
            st.lists(inner, min_size=2, max_size=3).map(disj),
            inner.map(Not),
        ),
        max_leaves=max_leaves,
    )


def primitives(depth=2, max_atoms=4, positive=False):
    return st.lists(atoms((X,), depth, positive), min_size=1, max_size=max_atoms).map(conj)


@st.composite
def simple_sets(draw, p=2, max_constants=2):
    leaves = suffixes(p)
    merges = draw(st.lists(st.tuples(st.sampled_from(leaves), st.sampled_from(leaves)), max_size=3))
    pins = draw(st.lists(st.tuples(st.sampled_from(leaves),
                                   st.builds(const, st.sampled_from(CONSTS))), max_size=max_constants))
    return SimpleSet.build(p, merges, pins)


@st.composite
def mixed_atoms(draw, depth=3):
    """Atoms that may relate variable terms of different depths."""
    w = draw(paths(depth))
    if draw(st.booleans()):
        rhs = Term(X, draw(paths(depth)))
    else:
        rhs = draw(const_terms(1))
    cls = Eq if draw(st.integers(0, 9)) < 6 else Neq
    return cls(Term(X, w), rhs)


def mixed_formulas(max_leaves=4):
    return st.recursive(
        mixed_atoms(),
        lambda inner: st.one_of(
            st.lists(inner, min_size=2, max_size=3).map(conj),
            st.lists(inner, min_size=2, max_size=3).map(disj),
            inner.map(Not),
        ),
        max_leaves=max_leaves,
    )
