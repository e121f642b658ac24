from gkring.fuzz import FormulaGenerator, FuzzConfig, compare, run_fuzz
from gkring.oracle import problem_constants
from gkring.syntax import pack_variables, parse, to_text


def test_generator_is_deterministic():
    cfg = FuzzConfig(n=30, seed=11)
    a = [to_text(f) for f in FormulaGenerator(cfg)]
    b = [to_text(f) for f in FormulaGenerator(cfg)]
    assert a == b and len(a) == 30
    c = [to_text(f) for f in FormulaGenerator(FuzzConfig(n=30, seed=12))]
    assert a != c


def test_generated_formulas_parse_back_and_respect_caps():
    cfg = FuzzConfig(n=40, seed=3)
    for f in FormulaGenerator(cfg):
        assert parse(to_text(f)) == f
        assert len(problem_constants(pack_variables(f))) <= cfg.max_leaf_constants


def test_small_run_agrees():
    rep = run_fuzz(FuzzConfig(n=40, seed=5))
    assert rep.checked == 40
    assert rep.ok, [d.to_json() for d in rep.disagreements]


def test_report_json():
    rep = run_fuzz(FuzzConfig(n=3, seed=1))
    data = rep.to_json()
    assert set(data) == {"n", "seed", "maxDepth", "budgetErrors", "disagreements", "seconds"}
    assert data["n"] == 3 and data["seed"] == 1 and data["disagreements"] == []


def test_compare_examples():
    assert compare(parse("l(x) = #c | l(x) = #d")) == []
    assert compare(parse("x1 != x2")) == []


def test_progress_callback():
    seen = []
    run_fuzz(FuzzConfig(n=5, seed=2), progress=lambda r: seen.append(r.checked))
    assert seen == [1, 2, 3, 4, 5]
