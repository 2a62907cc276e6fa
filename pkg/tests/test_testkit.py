import pytest
from hypothesis import given, settings, strategies as st

from crashlens.parser import parse_expr
from crashlens.syntax import ERR, App, Ctor, IntLit, Match, Var, free_vars, print_expr, size
from crashlens.testkit import (
    PROPERTIES, VARIANTS, GenConfig, Outcome, check_failure, check_preservation,
    check_type_substitution, check_unsat_after_matching, check_value_substitution,
    check_weakening, gen_crash_cond, gen_expr, gen_value, run_property, shrink, variants,
)
from crashlens.types import INT, CtorT, free_tvars

LEN = "(rec len(x) -> match x { Nil -> Zero | Cons(h, t) -> Succ(len t) })"


def test_gen_config_validation():
    with pytest.raises(ValueError):
        GenConfig(alphabet=())
    with pytest.raises(ValueError):
        GenConfig(max_depth=0)


def test_generation_is_deterministic():
    assert gen_expr(GenConfig(42)) == gen_expr(GenConfig(42))
    assert gen_value(GenConfig(42)) == gen_value(GenConfig(42))
    assert gen_crash_cond(GenConfig(42)) == gen_crash_cond(GenConfig(42))


def test_depth_one_gives_a_leaf():
    for seed in range(200):
        e = gen_expr(GenConfig(seed, 1))
        assert isinstance(e, IntLit) or e == ERR or (isinstance(e, Ctor) and not e.args)


def test_every_variant_is_generated():
    counts = dict.fromkeys(VARIANTS, 0)
    for seed in range(2000):
        for v in variants(gen_expr(GenConfig(seed))):
            counts[v] += 1
    assert min(counts.values()) >= 20, counts


def test_open_generation_uses_y():
    frees = [free_vars(gen_expr(GenConfig(s, 4, closed_only=False))) for s in range(200)]
    assert any(frees) and all(f <= {"y"} for f in frees)
    assert not any(free_vars(gen_expr(GenConfig(s, 4))) for s in range(200))


# -- individual checks ---------------------------------------------------------

def test_failure_examples():
    assert not check_failure(App(IntLit(5), IntLit(3))).failed
    assert not check_failure(IntLit(7)).failed
    assert not check_failure(parse_expr("(rec g(x) -> g x) A")).failed


def test_preservation_examples():
    assert not check_preservation(parse_expr("(rec f(x) -> x) 5")).failed
    assert not check_preservation(parse_expr(f"{LEN} Cons(1, Cons(2, Nil))")).failed
    assert not check_preservation(App(IntLit(5), IntLit(3))).failed


def test_lemma_examples():
    assert not check_weakening(IntLit(5), INT).failed
    e = Match(Var("y"), ())
    assert not check_value_substitution(e, Ctor("Nil")).failed
    assert not check_type_substitution(App(Var("y"), IntLit(1)), CtorT("Nil")).failed
    assert not check_unsat_after_matching(parse_expr(f"match Zero {{ Zero -> {LEN} 1 }}")).failed


# -- shrinking -----------------------------------------------------------------

def test_shrink_requires_failing_input():
    with pytest.raises(ValueError):
        shrink(IntLit(1), lambda e: False)


def test_shrink_minimal_term_is_fixpoint():
    assert shrink(IntLit(0), lambda e: isinstance(e, IntLit)) == IntLit(0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_shrunk_term_still_fails(seed):
    e = gen_expr(GenConfig(seed))
    failing = lambda x: "Cons" in print_expr(x)
    if not failing(e):
        return
    small = shrink(e, failing)
    assert failing(small)
    assert size(small) <= size(e)
    assert size(small) <= 10


# -- runner ----------------------------------------------------------------------

@pytest.mark.parametrize("name", PROPERTIES)
def test_properties_pass_on_small_runs(name):
    report = run_property(name, cases=100, seed=7)
    assert report.cases == 100
    assert report.ok, [f.repro() for f in report.failures]
    assert report.summary().startswith(f"{name}: 100 cases")


def test_unknown_property():
    with pytest.raises(ValueError):
        run_property("nope", 1)


def test_failures_are_shrunk_and_reported(monkeypatch):
    from crashlens import testkit
    broken = lambda e: Outcome("Cons" in print_expr(e), "no Cons", print_expr(e))
    monkeypatch.setattr(testkit, "check_roundtrip", broken)
    report = run_property("roundtrip", cases=200, seed=0, max_failures=2)
    assert len(report.failures) == 2 and not report.ok
    for f in report.failures:
        assert broken(f.shrunk).failed
        assert size(f.shrunk) <= size(f.original)
        assert f.repro().startswith(f"-- seed {f.seed}\n-- expected: no Cons\n")
        assert parse_expr(f.repro()) == f.shrunk


def test_crash_conditions_are_ground():
    for seed in range(50):
        assert not free_tvars(gen_crash_cond(GenConfig(seed)))
