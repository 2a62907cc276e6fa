import pytest
from hypothesis import given, settings, strategies as st

from crashlens.parser import ErrorKind, ParseError, parse_expr, parse_program
from crashlens.syntax import (
    ERR, App, Arm, Ctor, IntLit, Match, Rec, Var, alpha_equal, free_vars, is_value,
    print_expr, print_program, subst_value,
)
from crashlens.testkit import GenConfig, gen_expr

ZERO = Ctor("Zero")
NIL = Ctor("Nil")

LEN_SRC = "rec len(x) -> match x { Nil -> Zero | Cons(h,t) -> Succ(len t) }"
LEN_AST = Rec("len", "x", Match(Var("x"), (
    Arm("Nil", (), ZERO),
    Arm("Cons", ("h", "t"), Ctor("Succ", (App(Var("len"), Var("t")),))),
)))


def test_parse_identity():
    assert parse_expr("rec f(x) -> x") == Rec("f", "x", Var("x"))


def test_parse_length():
    assert parse_expr(LEN_SRC) == LEN_AST


def test_application_is_left_associative():
    e = parse_expr("(rec f(x) -> x) 1 2")
    assert e == App(App(Rec("f", "x", Var("x")), IntLit(1)), IntLit(2))


def test_negative_literal_and_err():
    assert parse_expr("-3") == IntLit(-3)
    assert parse_expr("err") == ERR


@pytest.mark.parametrize("src, kind", [
    ("match Zero { Nil -> 1 | Nil -> 2 }", ErrorKind.DUPLICATE_PATTERN_CTOR),
    ("Cons(1, Nil) Cons(Nil)", ErrorKind.ARITY_MISMATCH),
    ("rec f(x) ->", ErrorKind.SYNTAX),
    ("match Zero { Zero -> 1", ErrorKind.SYNTAX),
])
def test_parse_errors(src, kind):
    with pytest.raises(ParseError) as exc:
        parse_expr(src)
    assert exc.value.kind is kind


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_program("let x = 1;\nlet y = );")
    assert (exc.value.line, exc.value.col) == (2, 9)


def test_program_declarations_fix_arity():
    with pytest.raises(ParseError) as exc:
        parse_program("ctor Pair/2;\nPair(1)")
    assert exc.value.kind is ErrorKind.ARITY_MISMATCH


def test_program_rejects_unbound_and_duplicate_names():
    with pytest.raises(ParseError) as exc:
        parse_program("let f = g;")
    assert exc.value.kind is ErrorKind.UNBOUND_NAME
    with pytest.raises(ParseError) as exc:
        parse_program("let f = 1;\nlet f = 2;")
    assert exc.value.kind is ErrorKind.DUPLICATE_DEF


def test_program_inlines_definitions():
    p = parse_program("let id = rec f(x) -> x;\nlet one = id 1;\none")
    assert p.resolved_main() == App(Rec("f", "x", Var("x")), IntLit(1))
    assert print_program(parse_program(print_program(p))) == print_program(p)


def test_print_examples():
    assert print_expr(IntLit(5)) == "5"
    assert print_expr(NIL) == "Nil"
    assert print_expr(App(Rec("f", "x", Var("x")), IntLit(3))) == "(rec f(x) -> x) 3"


def test_print_nested_application_reparses():
    e = App(App(NIL, ZERO), Match(ZERO, ()))
    assert parse_expr(print_expr(e)) == e


def test_subst_value_examples():
    five = IntLit(5)
    assert subst_value(Var("x"), "x", five) == five
    ident = Rec("f", "x", Var("x"))
    assert subst_value(ident, "x", five) == ident
    assert subst_value(Ctor("Cons", (Var("x"), Var("y"))), "x", ZERO) == Ctor("Cons", (ZERO, Var("y")))


def test_subst_respects_arm_binders():
    e = Match(Var("y"), (Arm("Cons", ("y", "t"), Var("y")),))
    out = subst_value(e, "y", ZERO)
    assert out == Match(ZERO, (Arm("Cons", ("y", "t"), Var("y")),))


def test_free_vars_examples():
    assert free_vars(Var("x")) == {"x"}
    assert free_vars(Rec("f", "x", App(Var("f"), Var("x")))) == frozenset()
    assert free_vars(Match(Var("y"), (Arm("Cons", ("a", "b"), Var("a")),))) == {"y"}


def test_values():
    assert is_value(Rec("f", "x", Var("x")))
    assert is_value(Ctor("Cons", (IntLit(1), NIL)))
    assert not is_value(Ctor("Cons", (App(Var("f"), NIL), NIL)))


def test_alpha_equal_renames_binders():
    assert alpha_equal(parse_expr("rec f(x) -> f x"), parse_expr("rec g(y) -> g y"))
    assert not alpha_equal(parse_expr("rec f(x) -> x"), parse_expr("rec f(x) -> f"))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 7))
def test_print_parse_round_trip(seed, depth):
    e = gen_expr(GenConfig(seed, depth))
    back = parse_expr(print_expr(e))
    assert alpha_equal(back, e)
    assert print_expr(back) == print_expr(e)
