"""Bounded three-valued evaluation of crash conditions.

A type over-approximates the values an expression may produce, so a
predicate is only reported true when it holds for *every* possible member
and false when it fails for every member of a set that certainly has one.
Anything else is ``UNKNOWN``.  The budget ``k`` bounds how many function
types may be unfolded along one path (by type- or crash-level application).

A crash-level application that reappears on the unfolding stack with the
same function and argument is taken to be true: any evaluation that returns
normally would need a strictly shorter normal return of the same call,
so the call crashes or diverges.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .syntax import Ctor, Expr, IntLit, Program, ctor_arities
from .types import (
    BOT, INT, And, Bot, CCApp, CrashCond, CtorT, FF, Fun, Guard, HasCtor, HasNoCtor,
    IntT, NotFun, Or, Proj, SelfVar, TApp, TT, TVar, Type, Union, alpha_key, ccapp,
    subst, subst_cc, tapp, walk,
)

DEFAULT_K = 5


def default_k() -> int:
    raw = os.environ.get("CRASHLENS_K")
    if raw is None:
        return DEFAULT_K
    k = int(raw)
    if k < 0:
        raise ValueError("CRASHLENS_K must be non-negative")
    return k


class TruthValue(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __and__(self, other: "TruthValue") -> "TruthValue":
        if self is FALSE_ or other is FALSE_:
            return FALSE_
        if self is TRUE_ and other is TRUE_:
            return TRUE_
        return UNKNOWN_

    def __or__(self, other: "TruthValue") -> "TruthValue":
        if self is TRUE_ or other is TRUE_:
            return TRUE_
        if self is FALSE_ and other is FALSE_:
            return FALSE_
        return UNKNOWN_

    @staticmethod
    def of(b: bool) -> "TruthValue":
        return TRUE_ if b else FALSE_


TRUE_, FALSE_, UNKNOWN_ = TruthValue.TRUE, TruthValue.FALSE, TruthValue.UNKNOWN


@dataclass(frozen=True)
class Members:
    """Possible members of a type: ``(member, certain, remaining depth)``.

    ``certain`` is set when every guard on the way to the member holds.
    ``complete`` is cleared when a free variable or the budget cut the
    enumeration short.
    """

    items: tuple[tuple[Type, bool, int], ...]
    complete: bool


_EMPTY = Members((), True)
_CUT = Members((), False)


def _merge(parts: Iterable[Members]) -> Members:
    items: dict[tuple[Type, bool, int], None] = {}
    complete = True
    for p in parts:
        complete &= p.complete
        for it in p.items:
            items[it] = None
    return Members(tuple(items), complete)


def _weaken(ms: Members, certain: bool) -> Members:
    if certain:
        return ms
    return Members(tuple((m, False, d) for m, _, d in ms.items), ms.complete)


class Solver:
    """Evaluation state for one query; caches are valid for its lifetime."""

    def __init__(self):
        self._members: dict[tuple[Type, int], Members] = {}
        self._nonempty: dict[tuple[Type, int], bool] = {}
        self._preds: dict[tuple[CrashCond, int], TruthValue] = {}
        self._stack: set = set()
        self.unfoldings = 0

    # -- members ---------------------------------------------------------------

    def members(self, t: Type, d: int) -> Members:
        key = (t, d)
        hit = self._members.get(key)
        if hit is None:
            hit = self._compute_members(t, d)
            self._members[key] = hit
        return hit

    def _compute_members(self, t: Type, d: int) -> Members:
        if isinstance(t, (IntT, CtorT, Fun)):
            return Members(((t, True, d),), True)
        if isinstance(t, Bot):
            return _EMPTY
        if isinstance(t, (TVar, SelfVar)):
            return _CUT
        if isinstance(t, Union):
            return _merge((self.members(t.left, d), self.members(t.right, d)))
        if isinstance(t, Guard):
            v = self.eval(t.cond, d)
            if v is FALSE_:
                return _EMPTY
            return _weaken(self.members(t.t, d), v is TRUE_)
        if isinstance(t, TApp):
            head = self.members(t.fn, d)
            parts = [Members((), head.complete)]
            for m, certain, dm in head.items:
                if not isinstance(m, Fun):
                    continue
                if dm <= 0:
                    parts.append(_CUT)
                    continue
                self.unfoldings += 1
                # an empty argument means the function is never called
                sure = certain and self.nonempty(t.arg, dm)
                parts.append(_weaken(self.members(tapp(m, t.arg), dm - 1), sure))
            return _merge(parts)
        if isinstance(t, Proj):
            of = self.members(t.of, d)
            parts = [Members((), of.complete)]
            for m, certain, dm in of.items:
                if isinstance(m, CtorT) and m.name == t.ctor:
                    if t.index > len(m.args):
                        raise ValueError(f"{m.name} has arity {len(m.args)}")
                    # the constructor is only built if every other component is
                    i = t.index - 1
                    sure = certain and all(self.nonempty(a, dm)
                                           for j, a in enumerate(m.args) if j != i)
                    parts.append(_weaken(self.members(m.args[i], dm), sure))
            return _merge(parts)
        raise TypeError(f"not a type: {t!r}")

    def nonempty(self, t: Type, d: int) -> bool:
        """True when ``t`` certainly has an inhabitant."""
        key = (t, d)
        hit = self._nonempty.get(key)
        if hit is None:
            self._nonempty[key] = False  # guards against cyclic re-entry
            hit = any(certain and self._inhabited(m, dm)
                      for m, certain, dm in self.members(t, d).items)
            self._nonempty[key] = hit
        return hit

    def _inhabited(self, m: Type, d: int) -> bool:
        if isinstance(m, CtorT):
            return all(self.nonempty(a, d) for a in m.args)
        return True

    # -- crash conditions ------------------------------------------------------

    def eval(self, c: CrashCond, d: int) -> TruthValue:
        if isinstance(c, TT):
            return TRUE_
        if isinstance(c, FF):
            return FALSE_
        if isinstance(c, And):
            left = self.eval(c.left, d)
            if left is FALSE_:
                return FALSE_
            return left & self.eval(c.right, d)
        if isinstance(c, Or):
            left = self.eval(c.left, d)
            if left is TRUE_:
                return TRUE_
            return left | self.eval(c.right, d)
        if isinstance(c, CCApp):
            return self._ccapp(c, d)
        key = (c, d)
        hit = self._preds.get(key)
        if hit is None:
            hit = self._predicate(c, d)
            self._preds[key] = hit
        return hit

    def _predicate(self, c: CrashCond, d: int) -> TruthValue:
        ms = self.members(c.t, d)
        if isinstance(c, NotFun):
            is_hit = [isinstance(m, Fun) for m, _, _ in ms.items]
        elif isinstance(c, (HasCtor, HasNoCtor)):
            is_hit = [isinstance(m, CtorT) and m.name == c.ctor for m, _, _ in ms.items]
        else:
            raise TypeError(f"not a crash condition: {c!r}")
        if not ms.complete:
            return UNKNOWN_
        # An empty type means the subject never yields a value, so the test
        # is never reached: every predicate over it is false.
        if isinstance(c, HasCtor):
            if not any(is_hit):
                return FALSE_
            if all(is_hit) and self.nonempty(c.t, d):
                return TRUE_
            return UNKNOWN_
        # HasNoCtor and NotFun: no member may be a hit
        if all(is_hit):
            return FALSE_
        if not any(is_hit) and self.nonempty(c.t, d):
            return TRUE_
        return UNKNOWN_

    def _ccapp(self, c: CCApp, d: int) -> TruthValue:
        head = self.members(c.fn, d)
        results = []
        arg_key = alpha_key(_cheap(c.arg))
        for m, _, dm in head.items:
            if not isinstance(m, Fun):
                results.append(TRUE_)  # applying a non-function crashes
                continue
            key = (alpha_key(m), arg_key)
            if key in self._stack:
                results.append(TRUE_)
                continue
            if dm <= 0:
                results.append(UNKNOWN_)
                continue
            self.unfoldings += 1
            self._stack.add(key)
            try:
                results.append(self.eval(ccapp(m, c.arg), dm - 1))
            finally:
                self._stack.discard(key)
        if not head.complete:
            return UNKNOWN_
        if all(r is FALSE_ for r in results):
            return FALSE_
        if (all(r is TRUE_ for r in results)
                and self.nonempty(c.fn, d) and self.nonempty(c.arg, d)):
            return TRUE_
        return UNKNOWN_


def _cheap(t: Type) -> Type:
    """Resolve projections of literal constructor types."""
    if isinstance(t, Proj):
        of = _cheap(t.of)
        if isinstance(of, CtorT):
            if of.name != t.ctor:
                return BOT
            return _cheap(of.args[t.index - 1])
        return t if of is t.of else Proj(of, t.ctor, t.index)
    return t


# -- public API ------------------------------------------------------------------

def eval_cc(c: CrashCond, k: int | None = None) -> TruthValue:
    """Three-valued truth of ``c`` with unfolding budget ``k``."""
    if k is None:
        k = default_k()
    if k < 0:
        raise ValueError("k must be non-negative")
    return Solver().eval(c, k)


def apply_interp(i: Mapping[str, Type], t: Type) -> Type:
    """Instantiate free type variables; function binders shadow."""
    return subst(t, dict(i))


def apply_interp_cc(i: Mapping[str, Type], c: CrashCond) -> CrashCond:
    return subst_cc(c, dict(i))


def entails(i: Mapping[str, Type], c: CrashCond, k: int | None = None) -> TruthValue:
    return eval_cc(apply_interp_cc(i, c), k)


def members(t: Type, k: int) -> Members:
    return Solver().members(t, k)


def subtype(t1: Type, t2: Type, budget: int = DEFAULT_K) -> TruthValue:
    return _sub(Solver(), t1, t2, budget)


def _sub(s: Solver, t1: Type, t2: Type, d: int) -> TruthValue:
    if isinstance(t1, Bot) or t1 == t2 or alpha_key(t1) == alpha_key(t2):
        return TRUE_
    left, right = s.members(t1, d), s.members(t2, d)
    verdicts = []
    for m, certain, dm in left.items:
        per = [_sub_member(s, m, n, min(dm, dn), sure) for n, sure, dn in right.items]
        found = any(v is TRUE_ and sure for v, (_, sure, _) in zip(per, right.items))
        if found:
            verdicts.append(TRUE_)
        elif right.complete and all(v is FALSE_ for v in per) and certain and s._inhabited(m, dm):
            verdicts.append(FALSE_)
        else:
            verdicts.append(UNKNOWN_)
    if FALSE_ in verdicts:
        return FALSE_
    if left.complete and all(v is TRUE_ for v in verdicts):
        return TRUE_
    return UNKNOWN_


def _sub_member(s: Solver, m: Type, n: Type, d: int, _sure: bool) -> TruthValue:
    if isinstance(m, IntT):
        return TruthValue.of(isinstance(n, IntT))
    if isinstance(m, CtorT):
        if not isinstance(n, CtorT) or n.name != m.name or len(n.args) != len(m.args):
            return FALSE_
        out = TRUE_
        for a, b in zip(m.args, n.args):
            out = out & _sub(s, a, b, d)
            if out is FALSE_:
                break
        return out
    if isinstance(m, Fun):
        if not isinstance(n, Fun):
            return FALSE_
        return TRUE_ if alpha_key(m) == alpha_key(n) else UNKNOWN_
    return UNKNOWN_


# -- verdicts ----------------------------------------------------------------------

class VerdictKind(str, Enum):
    CRASH = "crash"
    NO_CRASH_AT_BOUND = "no_crash_at_bound"
    UNKNOWN = "unknown"


_KIND = {TRUE_: VerdictKind.CRASH, FALSE_: VerdictKind.NO_CRASH_AT_BOUND,
         UNKNOWN_: VerdictKind.UNKNOWN}


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    k: int
    type: Type
    crash: CrashCond
    witnesses: tuple[Type, ...] = ()

    @property
    def definite(self) -> bool:
        return self.kind is VerdictKind.CRASH


def verdict_of(value: TruthValue) -> VerdictKind:
    return _KIND[value]


def decide(e: Expr, env: Mapping[str, Type] | None = None, k: int | None = None) -> Verdict:
    """Infer ``e`` and evaluate its crash condition at budget ``k``."""
    from .inference import infer
    if k is None:
        k = default_k()
    typing = infer(env or {}, e)
    return Verdict(verdict_of(eval_cc(typing.crash, k)), k, typing.type, typing.crash)


# -- witnesses -------------------------------------------------------------------

MAX_GROUND = 20_000


def alphabet_of(t: Type | CrashCond) -> dict[str, int]:
    """Constructors mentioned in ``t`` with their arity.

    Constructors only seen in projections get the largest projected index
    as arity; those only seen in predicates get arity 0.
    """
    exact: dict[str, int] = {}
    guessed: dict[str, int] = {}
    for n in walk(t):
        if isinstance(n, CtorT):
            exact[n.name] = len(n.args)
        elif isinstance(n, Proj):
            guessed[n.ctor] = max(guessed.get(n.ctor, 0), n.index)
        elif isinstance(n, (HasCtor, HasNoCtor)):
            guessed.setdefault(n.ctor, 0)
    return {**guessed, **exact}


def ground_types(alphabet: Mapping[str, int], depth: int, limit: int = MAX_GROUND) -> list[Type]:
    """Constructor trees of height at most ``depth``, breadth-first.

    Within a level constructors come in name order and ``int`` last.
    """
    names = sorted(alphabet)
    out: list[Type] = []
    heights: dict[Type, int] = {}
    for h in range(1, depth + 1):
        if h == 1:
            level: list[Type] = [CtorT(c) for c in names if alphabet[c] == 0] + [INT]
        else:
            pool = list(out)
            level = []
            for c in names:
                n = alphabet[c]
                if n == 0:
                    continue
                for args in itertools.product(pool, repeat=n):
                    if max(heights[a] for a in args) == h - 1:
                        level.append(CtorT(c, args))
        for t in level:
            heights[t] = h
        out.extend(level)
        if len(out) >= limit:
            return out[:limit]
    return out


def find_crashing_inputs(f: Type, depth: int, k: int | None = None,
                         alphabet: Mapping[str, int] | None = None) -> list[Type]:
    """Ground argument types on which ``f`` definitely crashes or diverges."""
    if not isinstance(f, Fun):
        raise TypeError("find_crashing_inputs expects a function type")
    if k is None:
        k = default_k()
    if alphabet is None:
        alphabet = alphabet_of(f)
    return [t for t in ground_types(alphabet, depth)
            if Solver().eval(ccapp(f, t), k) is TRUE_]


def inhabitant(t: Type) -> Expr:
    """A concrete value of the ground constructor type ``t`` (ints become 0)."""
    if isinstance(t, IntT):
        return IntLit(0)
    if isinstance(t, CtorT):
        return Ctor(t.name, tuple(inhabitant(a) for a in t.args))
    raise ValueError(f"no canonical inhabitant for {t!r}")


def fixpoint_probe(c: CrashCond, k1: int, k2: int) -> bool:
    """True when the verdict for ``c`` is the same at both budgets."""
    if not k1 < k2:
        raise ValueError("fixpoint_probe needs k1 < k2")
    return eval_cc(c, k1) is eval_cc(c, k2)


def program_alphabet(p: Program) -> dict[str, int]:
    out = dict(p.alphabet)
    for _, body in p.defs:
        out.update({k: v for k, v in ctor_arities(body).items() if k not in out})
    return out
