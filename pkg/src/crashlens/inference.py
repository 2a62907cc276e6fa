"""Inference of output types and crash conditions, plus bounded subtyping."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .syntax import App, Arm, Ctor, Err, Expr, IntLit, Match, Rec, Var
from .types import (
    BOT, FALSE, INT, TRUE, CrashCond, Fun, HasCtor, HasNoCtor, SelfVar, TVar, Type,
    and_, ccapp, ctor_t, guard, not_fun, or_, proj, simplify_cc, tapp, union,
)

TypeEnv = Mapping[str, Type]


class UnboundVariable(Exception):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name}")
        self.name = name


@dataclass(frozen=True)
class Typing:
    type: Type
    crash: CrashCond


class _Fresh:
    def __init__(self):
        self.n = itertools.count()

    def pair(self) -> tuple[str, str]:
        i = next(self.n)
        return f"a{i}", f"X{i}"


def infer(env: TypeEnv, e: Expr) -> Typing:
    """Derive ``env |- e : type & crash``.

    Fresh binder names restart at ``a0``/``X0`` for every call, so two
    inferences of the same term produce identical output.
    """
    return _infer(dict(env), e, _Fresh())


def _infer(env: dict[str, Type], e: Expr, fresh: _Fresh) -> Typing:
    if isinstance(e, IntLit):
        return Typing(INT, FALSE)
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundVariable(e.name)
        return Typing(env[e.name], FALSE)
    if isinstance(e, Err):
        return Typing(BOT, TRUE)
    if isinstance(e, Ctor):
        parts = [_infer(env, a, fresh) for a in e.args]
        crash: CrashCond = FALSE
        for p in parts:
            crash = or_(crash, p.crash)
        return Typing(ctor_t(e.name, (p.type for p in parts)), crash)
    if isinstance(e, Rec):
        a, x = fresh.pair()
        inner = {**env, e.fname: SelfVar(x), e.param: TVar(a)}
        body = _infer(inner, e.body, fresh)
        return Typing(Fun(a, x, body.type, simplify_cc(body.crash)), FALSE)
    if isinstance(e, App):
        f = _infer(env, e.fun, fresh)
        v = _infer(env, e.arg, fresh)
        crash = or_(or_(or_(ccapp(f.type, v.type), f.crash), v.crash), not_fun(f.type))
        return Typing(tapp(f.type, v.type), crash)
    if isinstance(e, Match):
        s = _infer(env, e.scrutinee, fresh)
        p = _infer_patterns(env, TRUE, s.type, e.arms, fresh)
        return Typing(p.type, or_(s.crash, p.crash))
    raise TypeError(f"not an expression: {e!r}")


def infer_patterns(env: TypeEnv, cm: CrashCond, t0: Type, arms: tuple[Arm, ...] | list[Arm]) -> Typing:
    """Type a list of match arms against scrutinee type ``t0``.

    ``cm`` accumulates the condition that no earlier arm matched.  Each arm's
    type is guarded by the condition under which that arm is taken.
    """
    return _infer_patterns(dict(env), cm, t0, tuple(arms), _Fresh())


def _infer_patterns(env, cm, t0, arms, fresh) -> Typing:
    if not arms:
        return Typing(BOT, cm)
    arm = arms[0]
    inner = dict(env)
    for i, x in enumerate(arm.binders, start=1):
        inner[x] = proj(t0, arm.ctor, i)
    body = _infer(inner, arm.body, fresh)
    rest = _infer_patterns(env, and_(cm, HasNoCtor(arm.ctor, t0)), t0, arms[1:], fresh)
    taken = and_(cm, HasCtor(arm.ctor, t0))
    return Typing(union(rest.type, guard(taken, body.type)),
                  or_(and_(taken, body.crash), rest.crash))


def subtype(t1: Type, t2: Type, budget: int = 5):
    """Bounded check of ``t1 <= t2``; returns a three-valued answer."""
    from .solver import subtype as _subtype
    return _subtype(t1, t2, budget)
