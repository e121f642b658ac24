"""The unifier behind non-uniform conjunctions, checked against SimpleSet on
uniform input and against a small free model on mixed-depth input."""

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from gkring.grothendieck import cardinality, satisfiable
from gkring.simple import SimpleSet, from_positive_conjunction
from gkring.syntax import And, Eq, FalseF, Neq, Not, Or, TrueF, const, parse, suffixes, unfold_formula, var
from gkring.unify import GeneralSet

from strategies import mixed_formulas, primitives

PALETTE = ["c", "d", "f1", "f2"]


# ---- the free model: atoms, their l/r-descendants, and pairs


def pair(u, v):
    if u[0] == "a" and v[0] == "a" and u[1] == v[1] and u[2][:-1] == v[2][:-1] \
            and u[2].endswith("l") and v[2].endswith("r"):
        return ("a", u[1], u[2][:-1])
    return ("p", u, v)


def child(v, letter):
    if v[0] == "p":
        return v[1] if letter == "l" else v[2]
    return ("a", v[1], v[2] + letter)


def value(term, x):
    v = ("a", term.base.name, "") if term.is_const else x
    for letter in term.path:
        v = child(v, letter)
    return v


def holds(f, x):
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Eq):
        return value(f.lhs, x) == value(f.rhs, x)
    if isinstance(f, Neq):
        return value(f.lhs, x) != value(f.rhs, x)
    if isinstance(f, Not):
        return not holds(f.arg, x)
    if isinstance(f, And):
        return all(holds(a, x) for a in f.args)
    if isinstance(f, Or):
        return any(holds(a, x) for a in f.args)
    raise TypeError(f)


def elements(depth):
    level = [("a", a, "") for a in PALETTE]
    out = list(level)
    for _ in range(depth):
        level = list(dict.fromkeys(pair(u, v) for u, v in itertools.product(out, repeat=2)))
        out = list(dict.fromkeys(out + level))
    return out


ELEMENTS = elements(2)


def test_free_model_basics():
    c = ("a", "c", "")
    assert pair(child(c, "l"), child(c, "r")) == c
    assert holds(parse("l(x) = l(#c) & r(x) = r(#c)"), c)
    assert holds(parse("x = #c"), pair(child(c, "l"), child(c, "r")))
    assert len(ELEMENTS) == 4 + 20 * 20


class TestAgainstSimpleSets:
    @settings(max_examples=80)
    @given(primitives(depth=2, positive=True), st.integers(2, 3))
    def test_uniform_agrees(self, f, p):
        s = from_positive_conjunction(f, p)
        g = unfold_formula(f, p)
        atoms = list(g.args) if isinstance(g, And) else ([] if isinstance(g, TrueF) else [g])
        padded = [Eq(var(w), var(w)) for w in suffixes(p)]
        u = GeneralSet.full().conjoin(padded) if not isinstance(g, FalseF) else None
        if u is None:
            assert s.empty
            return
        u = u.conjoin(atoms)
        assert u.empty == s.empty
        if not s.empty:
            assert u.free_class_count == s.free_class_count

    def test_full_has_one_free_class(self):
        assert GeneralSet.full().free_class_count == 1

    def test_examples(self):
        def solve(text):
            return GeneralSet.full().conjoin(parse(text).args if isinstance(parse(text), And) else [parse(text)])

        assert solve("l(x) = l(r(x))").free_class_count == 2
        assert solve("l(x) = r(l(x))").empty
        assert solve("l(x) = #c & l(x) = #d").empty
        s = solve("l(x) = l(r(x)) & r(x) = #c")
        assert s.free_class_count == 0
        assert s.point_key() == ("p", ("c", const("c", "l")), ("c", const("c")))

    def test_structured_constant(self):
        s = GeneralSet.full().conjoin([parse("l(x) = #c"), parse("l(l(x)) = #d")])
        assert s.empty


class TestAgainstFreeModel:
    @settings(max_examples=60)
    @given(mixed_formulas(max_leaves=3))
    def test_sound(self, f):
        models = [x for x in ELEMENTS if holds(f, x)]
        sat = satisfiable(f)
        if models:
            assert sat
        card = cardinality(f)
        if card.kind == "finite":
            assert len(models) <= card.n
        if card.kind == "empty":
            assert not models
