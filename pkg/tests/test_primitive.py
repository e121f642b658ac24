import pytest
from hypothesis import given, settings

from gkring.errors import InvalidFrontier, NotExtended, NotPrimitive
from gkring.oracle import oracle_cardinality, oracle_count, oracle_sat, problem_constants
from gkring.primitive import (
    analyze_parametric,
    classify_primitive,
    find_closed_subtree,
    formula_of_tree,
    skeleton,
    strip_inequalities,
    tree_of_primitive,
)
from gkring.syntax import TRUE, Y, parse, to_text

from strategies import primitives


def xor(f, g):
    return (f & ~g) | (~f & g)


def labels(t):
    return {a: [to_text(x) for x in items] for a, items in t.labels.items() if items}


class TestTree:
    def test_example_one(self):
        t = tree_of_primitive(parse("l(x)=#c & l(x)=r(x)"))
        assert labels(t)["l"] == ["l(x) = #c", "l(x) = r(x)"]
        assert t.label("r") == ()

    def test_true_has_no_labels(self):
        assert labels(tree_of_primitive(TRUE)) == {}

    def test_parameter_variable(self):
        t = tree_of_primitive(parse("l(x)=#c & r(x)=l(y)"))
        assert labels(t) == {"l": ["l(x) = #c"], "r": ["r(x) = l(y)"]}
        ty = tree_of_primitive(parse("l(x)=#c & r(x)=l(y)"), Y)
        assert "l" in ty.labels

    def test_not_primitive(self):
        with pytest.raises(NotPrimitive):
            tree_of_primitive(parse("x=#c | x=#d"))

    def test_json_round_trip(self):
        t = tree_of_primitive(parse("l(x)=#c & r(l(x))!=#d"))
        assert t.to_json() == {"labels": {"l": ["l(x) = #c"], "lr": ["r(l(x)) != #d"]}}
        assert type(t).from_json(t.to_json()).labels == t.labels

    @given(primitives(depth=2))
    def test_formula_of_tree_equivalent(self, f):
        g = formula_of_tree(tree_of_primitive(f))
        assert not oracle_sat(xor(f, g), 2)


class TestClosed:
    def test_closed_tree_example(self):
        t = tree_of_primitive(parse("r(x)=#c & r(x)=l(x)"))
        assert find_closed_subtree(t) == frozenset({"l", "r"})

    def test_open_branch(self):
        assert find_closed_subtree(tree_of_primitive(parse("l(x)=#c"))) is None

    def test_both_pinned(self):
        t = tree_of_primitive(parse("l(x)=#c & r(x)=#d"))
        assert find_closed_subtree(t) == frozenset({"l", "r"})

    def test_inequalities_do_not_close(self):
        assert find_closed_subtree(tree_of_primitive(parse("l(x)=#c & r(x)!=#d"))) is None

    def test_prefers_shallow_frontier(self):
        t = tree_of_primitive(parse("x=#c & l(l(x))=#d & l(r(x))=#d & r(x)=#e"))
        assert find_closed_subtree(t) == frozenset({""})


class TestSkeleton:
    def test_minimal_tree_unchanged(self):
        t = tree_of_primitive(parse("r(x)=#c & r(x)=l(x)"))
        s = skeleton(t, find_closed_subtree(t))
        assert labels(s) == labels(t)

    def test_deep_label_dropped(self):
        f = parse("l(x)=#c & r(x)=#d & l(l(x))=l(#c)")
        t = tree_of_primitive(f)
        s = skeleton(t, find_closed_subtree(t))
        assert "ll" not in s.labels
        assert not oracle_sat(xor(f, formula_of_tree(s)), 2)

    def test_empty_frontier_rejected(self):
        with pytest.raises(InvalidFrontier):
            skeleton(tree_of_primitive(TRUE), frozenset())

    def test_uncovered_frontier_rejected(self):
        t = tree_of_primitive(parse("l(x)=#c & r(x)=#d"))
        with pytest.raises(InvalidFrontier):
            skeleton(t, {"l"})

    @given(primitives(depth=2, positive=True))
    def test_skeleton_equivalent_when_constant_pinned(self, f):
        t = tree_of_primitive(f)
        front = find_closed_subtree(t)
        pinned = front and all(
            any(a.rhs.is_const or a.lhs.is_const for a in t.labels[w]) for w in front)
        if pinned and oracle_sat(f, 2):
            g = formula_of_tree(skeleton(t, front))
            assert not oracle_sat(xor(f, g), 2)


class TestClassify:
    def test_closed_tree_is_singleton(self):
        res = classify_primitive(parse("r(x)=#c & r(x)=l(x)"))
        assert res.kind == "singleton"
        assert oracle_count(res.witness).by_free == (1,)
        assert not oracle_sat(xor(res.witness, parse("l(x)=#c & r(x)=#c")), 1)
        assert res.frontier == frozenset({"l", "r"})

    def test_cycle_is_empty(self):
        assert classify_primitive(parse("l(x)=x")).kind == "empty"

    def test_open_is_infinite(self):
        assert classify_primitive(parse("l(x)=#c")).kind == "infinite"

    def test_two_variables_packed(self):
        assert classify_primitive(parse("x1=#c & x2=#d")).kind == "singleton"
        assert classify_primitive(parse("x1=#c & x2!=#d")).kind == "infinite"

    def test_rejects_disjunction(self):
        with pytest.raises(NotPrimitive):
            classify_primitive(parse("x=#c | x=#d"))

    def test_witness_tree_is_closed(self):
        res = classify_primitive(parse("l(x)=#c & l(x)=r(x)"))
        assert res.kind == "singleton"
        assert find_closed_subtree(tree_of_primitive(res.witness)) is not None

    def test_json(self):
        assert classify_primitive(parse("x=#c")).to_json() == {
            "class": "singleton", "witness": "x = #c", "frontier": [""]}

    @settings(max_examples=80)
    @given(primitives(depth=2, max_atoms=5))
    def test_agrees_with_oracle(self, f):
        mine = classify_primitive(f)
        theirs = oracle_cardinality(f)
        expect = {"empty": "empty", "finite": "singleton", "infinite": "infinite"}[theirs.kind]
        assert mine.kind == expect
        if theirs.kind == "finite":
            assert theirs.n == 1
            g = mine.witness
            assert not oracle_sat(xor(f, g), 2)

    @settings(max_examples=40)
    @given(primitives(depth=3, max_atoms=4))
    def test_agrees_with_oracle_depth3(self, f):
        if len(problem_constants(f)) > 5:
            return
        theirs = oracle_cardinality(f)
        assert theirs.kind != "finite" or theirs.n == 1
        mine = classify_primitive(f).kind
        assert mine == {"empty": "empty", "finite": "singleton", "infinite": "infinite"}[theirs.kind]

    @given(primitives(depth=2, positive=True))
    def test_constant_pinned_closed_is_singleton(self, f):
        atoms = f.args if hasattr(f, "args") else (f,)
        if not all(a.rhs.is_const and not a.lhs.is_const for a in atoms):
            return
        if find_closed_subtree(tree_of_primitive(f)) is None:
            return
        assert classify_primitive(f).kind in ("singleton", "empty")
        if oracle_sat(f, 2):
            assert classify_primitive(f).kind == "singleton"

    def test_strip_inequalities(self):
        t = strip_inequalities(tree_of_primitive(parse("l(x)=#c & r(x)!=#d & r(x)=#e")))
        assert labels(t) == {"l": ["l(x) = #c"], "r": ["r(x) = #e"]}


class TestParametric:
    def test_both_children_pinned(self):
        res = analyze_parametric(parse("l(x)=y1 & r(x)=y2"))
        assert res.kind == "always_singleton_or_empty"
        assert res.reduced == parse("l(x)=y1 & r(x)=y2")

    def test_inequality_never_finite(self):
        assert analyze_parametric(parse("l(x)=y1 & r(x)!=y2")).kind == "never_finite"

    def test_same_parameter(self):
        res = analyze_parametric(parse("l(x)=y1 & r(x)=y1"))
        assert res.kind == "always_singleton_or_empty"
        assert res.reduced == parse("l(x)=y1 & r(x)=y1")

    def test_reduced_drops_inequalities(self):
        res = analyze_parametric(parse("l(x)=y1 & r(x)=#c & l(x)!=y2"))
        assert res.reduced == parse("l(x)=y1 & r(x)=#c")

    def test_determined_through_link(self):
        res = analyze_parametric(parse("l(x)=y1 & r(x)=l(x)"))
        assert res.kind == "always_singleton_or_empty"

    def test_not_extended(self):
        with pytest.raises(NotExtended):
            analyze_parametric(parse("x=y1 & l(x)=#c"))
