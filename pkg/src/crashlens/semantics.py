"""Deterministic small-step evaluator.

Evaluation order is leftmost-innermost call-by-value: constructor
arguments left to right, function before argument, scrutinee before arms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .syntax import (
    ERR, App, Ctor, Err, Expr, Match, Rec, Var, is_nonfun_value,
    is_value, subst_value,
)

DEFAULT_FUEL = 10_000


class StuckError(RuntimeError):
    """Raised when an open term reaches a free variable in redex position."""


@dataclass(frozen=True)
class Stepped:
    expr: Expr


@dataclass(frozen=True)
class Done:
    value: Expr


StepResult = Union[Stepped, Done]


@dataclass(frozen=True)
class Value:
    value: Expr
    steps: int


@dataclass(frozen=True)
class Error:
    steps: int


@dataclass(frozen=True)
class FuelExhausted:
    steps: int
    last: Expr


EvalOutcome = Union[Value, Error, FuelExhausted]


def step(e: Expr) -> StepResult:
    if is_value(e):
        return Done(e)
    return Stepped(_reduce(e))


def _reduce(e: Expr) -> Expr:
    # Walk down evaluation contexts to the redex, contract it, and rebuild.
    # Iterative so that long constructor spines do not exhaust the C stack.
    path: list[tuple[Expr, int]] = []
    while True:
        hole = _hole(e)
        if hole is None:
            break
        path.append((e, hole))
        e = _child(e, hole)
    out = _contract(e)
    for node, i in reversed(path):
        out = _plug(node, i, out)
    return out


def _hole(e: Expr) -> int | None:
    """Index of the child to reduce next, or ``None`` if ``e`` is a redex."""
    if isinstance(e, Ctor):
        for i, arg in enumerate(e.args):
            if isinstance(arg, Err):
                return None                                  # SCtorErr
            if not is_value(arg):
                return i
        raise AssertionError("constructor of values is a value")
    if isinstance(e, App):
        if not is_value(e.fun):
            return 0
        if isinstance(e.fun, Err):
            return None
        if not is_value(e.arg):
            return 1
        return None
    if isinstance(e, Match):
        return None if is_value(e.scrutinee) else 0
    if isinstance(e, Var):
        raise StuckError(f"free variable {e.name}")
    raise AssertionError(f"no rule applies to {e!r}")


def _child(e: Expr, i: int) -> Expr:
    if isinstance(e, Ctor):
        return e.args[i]
    if isinstance(e, App):
        return e.fun if i == 0 else e.arg
    return e.scrutinee


def _plug(e: Expr, i: int, sub: Expr) -> Expr:
    if isinstance(e, Ctor):
        args = e.args[:i] + (sub,) + e.args[i + 1:]
        out = Ctor(e.name, args)
        # args before i are values and the rest are unchanged: settle the flag here
        flag = not isinstance(sub, Err) and is_value(sub) and all(
            is_value(a) and not isinstance(a, Err) for a in args[i + 1:])
        object.__setattr__(out, "_is_value", flag)
        return out
    if isinstance(e, App):
        return App(sub, e.arg) if i == 0 else App(e.fun, sub)
    return Match(sub, e.arms)


def _contract(e: Expr) -> Expr:
    if isinstance(e, Ctor):
        return ERR                                           # SCtorErr
    if isinstance(e, App):
        fun, arg = e.fun, e.arg
        if isinstance(fun, Err) or isinstance(arg, Err):
            return ERR                                       # SAppErr2
        if is_nonfun_value(fun):
            return ERR                                       # SAppErr1
        assert isinstance(fun, Rec)
        body = subst_value(fun.body, fun.param, arg)        # SApp
        if fun.fname != fun.param:
            body = subst_value(body, fun.fname, fun)
        return body
    assert isinstance(e, Match)
    scrut = e.scrutinee
    if isinstance(scrut, Err):
        return ERR                                           # SMatchErr
    if not isinstance(scrut, Ctor) or not e.arms:
        return ERR                                           # SMatchNextErr
    head = e.arms[0]
    if head.ctor == scrut.name and len(head.binders) == len(scrut.args):
        body = head.body                                     # SMatch
        for x, v in zip(head.binders, scrut.args):
            body = subst_value(body, x, v)
        return body
    return Match(scrut, e.arms[1:])                          # SMatchNext


def evaluate(e: Expr, fuel: int = DEFAULT_FUEL) -> EvalOutcome:
    """Run at most ``fuel`` steps of :func:`step`.

    The evaluation context is kept between steps instead of being searched
    for from the root each time; the sequence of contractions is the same.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    frames: list[tuple[Expr, int]] = []
    cur = e
    n = 0
    while True:
        if is_value(cur):
            if not frames:
                return Error(n) if isinstance(cur, Err) else Value(cur, n)
            node, i = frames.pop()
            cur = _plug(node, i, cur)
            continue
        hole = _hole(cur)
        if hole is not None:
            frames.append((cur, hole))
            cur = _child(cur, hole)
            continue
        if n == fuel:
            for node, i in reversed(frames):
                cur = _plug(node, i, cur)
            return FuelExhausted(fuel, cur)
        cur = _contract(cur)
        n += 1


def trace(e: Expr, max_steps: int) -> list[Expr]:
    """``e`` followed by up to ``max_steps`` successors."""
    out = [e]
    while len(out) <= max_steps and not is_value(out[-1]):
        out.append(_reduce(out[-1]))
    return out
