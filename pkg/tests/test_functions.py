import json

import pytest
from hypothesis import given, reject, settings
from hypothesis import strategies as st

from gkring.errors import (
    DepthBudgetExceeded,
    DomainMismatch,
    NotAFunction,
    NotExtended,
    NotInjective,
    WrongShape,
)
from gkring.functions import (
    NormalFormula,
    PiecewiseFunction,
    adapted_decomposition,
    catalog,
    check_function,
    extend_to,
    image_formula,
    image_of_simple,
    image_primitive,
    injective_on,
    validate_normal,
)
from gkring.grothendieck import class_of_formula
from gkring.oracle import image_matches, oracle_sat
from gkring.simple import SimpleSet
from gkring.syntax import TRUE, const, parse

from strategies import primitives, simple_sets

C, D = const("c"), const("d")
GRAFT = NormalFormula.parse("l(y) = x & r(y) = #c")
IDENTITY = NormalFormula.parse("y = x")
PIECEWISE = "piece l(x)=#c :: y = x\npiece l(x)!=#c :: l(y) = #d & r(y) = x\n"


def xor(f, g):
    return (f & ~g) | (~f & g)


def full(p):
    return SimpleSet.full(p)


class TestNormalForm:
    def test_valid(self):
        validate_normal(GRAFT)
        validate_normal(IDENTITY)

    def test_underdetermined(self):
        with pytest.raises(NotAFunction):
            validate_normal(NormalFormula.parse("l(y) = x"))

    def test_not_extended(self):
        with pytest.raises(NotExtended):
            validate_normal(NormalFormula.parse("y = x & l(y) = #c"))

    def test_shape_errors(self):
        with pytest.raises(WrongShape):
            NormalFormula.parse("l(x) = r(x)")
        with pytest.raises(WrongShape):
            NormalFormula.parse("l(y) != x")

    def test_orientation(self):
        nf = NormalFormula.parse("x = l(y) & #c = r(y)")
        assert nf == GRAFT

    def test_frontier(self):
        assert GRAFT.frontier() == {"l": parse("x = x").lhs, "r": C}


class TestInjective:
    def test_graft(self):
        assert injective_on(GRAFT, full(1))

    def test_constant_map(self):
        assert not injective_on(NormalFormula.parse("l(y) = #a & r(y) = #b"), full(1))

    def test_only_free_class_recovered(self):
        nf = NormalFormula.parse("l(y) = l(x) & r(y) = #c")
        assert not injective_on(nf, full(1))
        assert injective_on(nf, SimpleSet.build(1, pins=[("r", D)]))

    def test_domain_mismatch(self):
        nf = NormalFormula(parse("l(x) = #c"), GRAFT.constraints)
        with pytest.raises(DomainMismatch):
            injective_on(nf, full(1))

    def test_only_free_class_oracle(self):
        # two points of r -> #d with the same image l(y) = l(x) are equal
        g = parse("l(x1) = l(x2) & r(x1) = #d & r(x2) = #d & x1 != x2")
        assert not oracle_sat(g, 2)
        assert oracle_sat(parse("l(x1) = l(x2) & x1 != x2"), 2)


class TestImages:
    def test_graft_full(self):
        q, img = image_of_simple(GRAFT, full(1))
        assert q == 2
        assert img == SimpleSet.build(2, pins=[("rl", const("c", "l")), ("rr", const("c", "r"))])
        assert image_matches(GRAFT.frontier(), full(1), img.to_formula(), q)

    def test_graft_merged(self):
        b = SimpleSet.build(1, [("l", "r")])
        q, img = image_of_simple(GRAFT, b)
        assert q == 2
        assert ("ll", "lr") in img.classes
        assert img.constants[img.leaf_class["rl"]] == const("c", "l")
        assert image_matches(GRAFT.frontier(), b, img.to_formula(), q)

    def test_identity(self):
        b = SimpleSet.build(2, [("ll", "rr")], [("lr", C)])
        assert image_of_simple(IDENTITY, b) == (2, b)

    def test_not_injective(self):
        with pytest.raises(NotInjective):
            image_of_simple(NormalFormula.parse("l(y) = #a & r(y) = #b"), full(1))

    def test_non_simple_image(self):
        rotate = catalog()["rotate"].pieces[0]
        b = SimpleSet.build(1, [("l", "r")])
        with pytest.raises(WrongShape):
            image_of_simple(rotate, b)
        f = image_primitive(rotate, b)
        assert class_of_formula(f) == class_of_formula(b.to_formula())

    def test_wrong_claim_rejected(self):
        q, img = image_of_simple(GRAFT, full(1))
        assert not image_matches(GRAFT.frontier(), full(1), parse("r(x) = #c & l(l(x)) = #d"), q)

    @settings(max_examples=40)
    @given(st.sampled_from(["identity", "swap", "graft_right", "graft_left", "swap_left", "mirror"]),
           simple_sets(p=2))
    def test_monotone(self, name, x):
        nf = catalog()[name].pieces[0]
        b = full(2)
        q, big = image_of_simple(nf, b)
        if not injective_on(nf, x):
            reject()
        _, small = image_of_simple(nf, x, q)
        assert big.includes(small)

    @settings(max_examples=25)
    @given(st.sampled_from(["identity", "swap", "graft_right", "graft_left"]), simple_sets(p=1))
    def test_direct_image(self, name, b):
        nf = catalog()[name].pieces[0]
        if b.empty:
            reject()
        q, img = image_of_simple(nf, b)
        assert image_matches(nf.frontier(), b, img.to_formula(), q)


class TestExtend:
    def test_full_space(self):
        nf = NormalFormula(parse("l(x) != #c"), NormalFormula.parse("l(y) = x & r(y) = #d").constraints)
        ext = extend_to(nf, full(1))
        assert ext.domain == TRUE or not oracle_sat(xor(ext.domain, TRUE), 1)
        assert injective_on(ext, full(1))

    def test_merged(self):
        b = SimpleSet.build(1, [("l", "r")])
        nf = NormalFormula(parse("l(x) = r(x) & l(x) != #c"), GRAFT.constraints)
        ext = extend_to(nf, b)
        assert not oracle_sat(xor(ext.domain, b.to_formula()), 1)

    def test_identity(self):
        b = SimpleSet.build(1, [("l", "r")])
        nf = NormalFormula(parse("l(x) = r(x) & l(x) != #c"), IDENTITY.constraints)
        assert extend_to(nf, b).constraints == IDENTITY.constraints

    def test_disjoint_domain(self):
        nf = NormalFormula(parse("l(x) = #d"), GRAFT.constraints)
        with pytest.raises(DomainMismatch):
            extend_to(nf, SimpleSet.build(1, pins=[("l", C)]))


class TestPiecewise:
    def test_text_round_trip(self):
        h = PiecewiseFunction.from_text("-- comment\n" + PIECEWISE + "\n")
        assert len(h.pieces) == 2
        assert PiecewiseFunction.from_text(h.to_text()) == h
        assert h.to_text() == "piece l(x) = #c :: y = x\npiece l(x) != #c :: l(y) = #d & r(y) = x\n"

    def test_json_round_trip(self, tmp_path):
        h = PiecewiseFunction.from_text(PIECEWISE, "pw")
        assert PiecewiseFunction.from_json(h.to_json()) == h
        path = tmp_path / "pw.json"
        path.write_text(json.dumps(h.to_json()))
        assert PiecewiseFunction.load(path) == h
        txt = tmp_path / "pw.map"
        txt.write_text(PIECEWISE)
        assert PiecewiseFunction.load(txt).pieces == h.pieces

    def test_bad_line(self):
        with pytest.raises(WrongShape):
            PiecewiseFunction.from_text("l(x)=#c :: y = x")

    def test_check_ok(self):
        assert check_function(PiecewiseFunction.from_text(PIECEWISE)).ok

    def test_identity_plus_graft_not_injective(self):
        h = PiecewiseFunction.from_text("piece l(x)=#c :: y = x\npiece l(x)!=#c :: l(y) = x & r(y) = #c")
        rep = check_function(h)
        assert not rep.ok and rep.problems == ["pieces 0 and 1 identify two points"]

    def test_overlapping_guards(self):
        h = PiecewiseFunction.from_text("piece l(x)=#c :: y = x\npiece r(x)=#c :: y = x")
        assert "guards 0 and 1 overlap" in check_function(h).problems

    def test_invalid_piece_reported(self):
        h = PiecewiseFunction.from_text("piece true :: l(y) = x")
        rep = check_function(h)
        assert not rep.ok and rep.problems[0].startswith("piece 0: NotAFunction")

    def test_restricted_domain(self):
        const_map = PiecewiseFunction.from_text("piece true :: l(y) = #a & r(y) = #b")
        assert not check_function(const_map).ok
        assert check_function(const_map, parse("x = #c")).ok

    @pytest.mark.parametrize("name", sorted(catalog()))
    def test_catalog_is_injective(self, name):
        rep = check_function(catalog()[name])
        assert rep.ok, rep.problems


class TestAdapted:
    def test_swap(self):
        ad = adapted_decomposition(catalog()["swap"], TRUE)
        assert len(ad.pieces) == 1 and ad.q == 1
        assert ad.pieces[0].image_simple == full(1)
        assert ad.counts_match()

    def test_graft(self):
        ad = adapted_decomposition(catalog()["graft_right"], TRUE)
        assert len(ad.pieces) == 1 and ad.q == 2
        (ap,) = ad.pieces
        assert not oracle_sat(xor(ap.image_formula(), parse("r(x) = #c")), 2)
        assert ap.counts() == (0, 0, 0, 0)

    def test_piecewise(self):
        h = PiecewiseFunction.from_text(PIECEWISE)
        ad = adapted_decomposition(h, TRUE)
        assert len(ad.pieces) == 2
        assert sorted(ap.branch for ap in ad.pieces) == [0, 1]
        assert ad.counts_match()
        assert ad.image_class() == class_of_formula(TRUE)
        a, b = (ap.image_formula() for ap in ad.pieces)
        assert not oracle_sat(a & b, 2)

    def test_not_injective(self):
        h = PiecewiseFunction.from_text("piece true :: l(y) = l(x) & r(y) = #c")
        with pytest.raises(NotInjective):
            adapted_decomposition(h, TRUE)

    def test_outside_guards(self):
        h = PiecewiseFunction.from_text("piece l(x) = #c :: y = x")
        with pytest.raises(DomainMismatch):
            adapted_decomposition(h, TRUE)

    def test_image_formula(self):
        f = image_formula(catalog()["graft_left"], parse("x = #d"))
        assert not oracle_sat(xor(f, parse("l(x) = #c & r(x) = #d")), 2)

    def test_json(self):
        data = adapted_decomposition(catalog()["graft_right"], TRUE).to_json()
        assert data["p"] == 1 and data["q"] == 2
        assert data["pieces"][0]["counts"] == {"C": 0, "C'": 0, "singletonsC": 0, "singletonsC'": 0}

    @settings(max_examples=25)
    @given(st.sampled_from(sorted(catalog())), primitives(depth=2, max_atoms=2))
    def test_transport(self, name, a):
        try:
            ad = adapted_decomposition(catalog()[name], a)
        except DepthBudgetExceeded:
            reject()
        assert ad.counts_match()
        assert ad.image_class() == class_of_formula(a)
