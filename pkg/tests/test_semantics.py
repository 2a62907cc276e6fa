import pytest
from hypothesis import given, settings, strategies as st

from crashlens.parser import parse_expr
from crashlens.semantics import (
    Done, Error, FuelExhausted, Stepped, StuckError, Value, evaluate, step, trace,
)
from crashlens.syntax import ERR, App, Arm, Ctor, IntLit, Match, Rec, Var, is_value
from crashlens.testkit import GenConfig, gen_expr

LEN = "(rec len(x) -> match x { Nil -> Zero | Cons(h, t) -> Succ(len t) })"
IDENT = Rec("f", "x", Var("x"))


def test_step_rules():
    assert step(App(IDENT, IntLit(5))) == Stepped(IntLit(5))             # SApp
    assert step(App(IntLit(5), IntLit(3))) == Stepped(ERR)               # SAppErr1
    assert step(Match(Ctor("A"), ())) == Stepped(ERR)                    # SMatchNextErr
    assert step(Ctor("Cons", (ERR, IntLit(1)))) == Stepped(ERR)          # SCtorErr
    assert step(App(ERR, IntLit(1))) == Stepped(ERR)                     # SAppErr2
    assert step(App(IDENT, ERR)) == Stepped(ERR)
    assert step(Match(ERR, (Arm("A", (), IntLit(1)),))) == Stepped(ERR)  # SMatchErr


def test_match_skips_non_matching_arms():
    e = parse_expr("match Succ(Zero) { Zero -> 1 | Succ(n) -> n }")
    assert step(e) == Stepped(parse_expr("match Succ(Zero) { Succ(n) -> n }"))
    assert step(step(e).expr) == Stepped(Ctor("Zero"))


def test_values_are_done():
    v = Ctor("Cons", (IntLit(1), Ctor("Nil")))
    assert step(v) == Done(v)
    assert step(ERR) == Done(ERR)


def test_leftmost_innermost_order():
    e = parse_expr("Cons((rec f(x) -> x) 1, (rec f(x) -> x) 2)")
    assert step(e) == Stepped(parse_expr("Cons(1, (rec f(x) -> x) 2)"))
    app = parse_expr("((rec f(x) -> x) (rec g(y) -> y)) ((rec f(x) -> x) 3)")
    assert step(app).expr == parse_expr("(rec g(y) -> y) ((rec f(x) -> x) 3)")


def test_recursive_binding_substitutes_function():
    e = parse_expr("(rec f(x) -> f) 1")
    assert step(e) == Stepped(parse_expr("rec f(x) -> f"))


def test_open_term_is_stuck():
    with pytest.raises(StuckError):
        step(App(Var("y"), IntLit(1)))


def test_evaluate_length():
    res = evaluate(parse_expr(f"{LEN} Cons(1, Cons(2, Nil))"), 1000)
    assert isinstance(res, Value)
    assert res.value == parse_expr("Succ(Succ(Zero))")


def test_evaluate_length_of_non_list_errors():
    assert isinstance(evaluate(parse_expr(f"{LEN} Zero"), 1000), Error)


def test_evaluate_self_loop_runs_out_of_fuel():
    res = evaluate(parse_expr("(rec g(x) -> g x) A"), 100)
    assert isinstance(res, FuelExhausted)
    assert res.steps == 100


def test_evaluate_rejects_zero_fuel():
    with pytest.raises(ValueError):
        evaluate(IntLit(1), 0)


def test_long_lists_do_not_overflow():
    # building a 3000-element list recursively
    mk = "(rec mk(n) -> match n { Zero -> Nil | Succ(m) -> Cons(0, mk m) }) "
    src = mk + "Succ(" * 3000 + "Zero" + ")" * 3000
    res = evaluate(parse_expr(src), 20_000)
    assert isinstance(res, Value)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_evaluate_agrees_with_stepping(seed):
    e = gen_expr(GenConfig(seed))
    steps = trace(e, 300)
    res = evaluate(e, 300)
    if isinstance(res, FuelExhausted):
        assert len(steps) == 301 and res.last == steps[-1]
    else:
        assert res.steps == len(steps) - 1
        last = steps[-1]
        assert is_value(last)
        assert isinstance(res, Error) == (last == ERR)
        if isinstance(res, Value):
            assert res.value == last
