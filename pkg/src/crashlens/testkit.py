"""Random programs and executable versions of the metatheory.

Each ``check_*`` function returns an :class:`Outcome`: passed, failed
with a description, or skipped (not counted).  :func:`run_property`
drives one property over many seeds and shrinks whatever fails.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .inference import Typing, infer, infer_patterns
from .semantics import StuckError, Value, evaluate, trace
from .solver import FALSE_, TRUE_, VerdictKind, decide, eval_cc, subtype
from .syntax import (
    ERR, App, Arm, Ctor, Expr, IntLit, Match, Rec, Var, alpha_equal as expr_alpha_equal,
    free_vars, print_expr, size, subst_value, contains_err,
)
from .parser import parse_expr
from .types import (
    FALSE, INT, TRUE, And, CCApp, CrashCond, CtorT, Fun, Guard, HasCtor, HasNoCtor,
    NotFun, Or, Proj, TApp, TVar, Type, Union, alpha_key, canonical_binders, map_types, normalize,
    normalize_cc, render, simplify_cc, subst, subst_cc,
)

DEFAULT_ALPHABET: tuple[tuple[str, int], ...] = (
    ("Nil", 0), ("Zero", 0), ("Succ", 1), ("Cons", 2),
)

VARIANTS = ("IntLit", "Var", "Ctor", "App", "Match", "Rec", "Err",
            "EmptyMatch", "NonFunApp")


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 6
    alphabet: tuple[tuple[str, int], ...] = DEFAULT_ALPHABET
    int_range: tuple[int, int] = (-3, 9)
    closed_only: bool = True

    def __post_init__(self):
        if not self.alphabet:
            raise ValueError("alphabet must be nonempty")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


_FUN_NAMES = ("f", "g")
_VAR_NAMES = ("x", "y", "z")
_BINDERS = ("h", "t", "x", "y")


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.nullary = [c for c, n in cfg.alphabet if n == 0]

    def sub(self, d: int) -> int:
        # children are usually deep, sometimes shallow
        return d if self.rng.random() < 0.6 else self.rng.randint(1, d)

    def leaf(self, scope: tuple[str, ...]) -> Expr:
        r = self.rng.random()
        if scope and r < 0.4:
            return Var(self.rng.choice(scope))
        if r < 0.55 or not self.nullary:
            return IntLit(self.rng.randint(*self.cfg.int_range))
        if r < 0.93:
            return Ctor(self.rng.choice(self.nullary))
        return ERR

    def expr(self, depth: int, scope: tuple[str, ...]) -> Expr:
        if depth <= 1:
            return self.leaf(scope)
        rng = self.rng
        kind = rng.choices(
            ("leaf", "ctor", "app", "match", "rec"),
            weights=(2, 3, 4, 4, 3))[0]
        d = depth - 1
        if kind == "leaf":
            return self.leaf(scope)
        if kind == "ctor":
            name, arity = rng.choice(self.cfg.alphabet)
            return Ctor(name, tuple(self.expr(self.sub(d), scope) for _ in range(arity)))
        if kind == "app":
            if rng.random() < 0.5:
                fun = self.rec(d, scope)
            else:
                fun = self.expr(self.sub(d), scope)
            return App(fun, self.expr(self.sub(d), scope))
        if kind == "match":
            return self.match(d, scope)
        return self.rec(d, scope)

    def rec(self, depth: int, scope: tuple[str, ...]) -> Expr:
        f = self.rng.choice(_FUN_NAMES)
        x = self.rng.choice(_VAR_NAMES)
        inner = tuple(sorted(set(scope) | {f, x}))
        if depth <= 1:
            return Rec(f, x, Var(self.rng.choice((f, x, x))))
        return Rec(f, x, self.expr(self.sub(depth), inner))

    def match(self, depth: int, scope: tuple[str, ...]) -> Expr:
        rng = self.rng
        scrut = self.expr(self.sub(depth), scope)
        ctors = list(self.cfg.alphabet)
        rng.shuffle(ctors)
        n = rng.choices(range(len(ctors) + 1), weights=[1] + [3] * len(ctors))[0]
        arms = []
        for name, arity in ctors[:n]:
            binders = tuple(rng.sample(_BINDERS, arity)) if arity <= len(_BINDERS) else ()
            inner = tuple(sorted(set(scope) | set(binders)))
            arms.append(Arm(name, binders, self.expr(self.sub(depth), inner)))
        return Match(scrut, tuple(arms))


def gen_expr(cfg: GenConfig, scope: tuple[str, ...] = ()) -> Expr:
    """Random well-formed expression; deterministic in ``cfg.seed``.

    Variables are drawn from ``scope`` and from enclosing binders only, so
    with an empty scope the result is closed.  With ``closed_only`` unset a
    free variable ``y`` may also appear.
    """
    rng = random.Random(cfg.seed)
    if not cfg.closed_only and not scope:
        scope = ("y",)
    return _Gen(cfg, rng).expr(cfg.max_depth, scope)


def gen_value(cfg: GenConfig) -> Expr:
    """Random closed value without ``err``: an integer, function or constructor tree."""
    rng = random.Random(cfg.seed)
    g = _Gen(cfg, rng)

    def value(d: int) -> Expr:
        r = rng.random()
        if d <= 1 or r < 0.3:
            if rng.random() < 0.5 and g.nullary:
                return Ctor(rng.choice(g.nullary))
            return IntLit(rng.randint(*cfg.int_range))
        if r < 0.55:
            while True:
                f = g.rec(d - 1, ())
                if not contains_err(f):
                    return f
        name, arity = rng.choice(cfg.alphabet)
        return Ctor(name, tuple(value(d - 1) for _ in range(arity)))

    return value(max(1, cfg.max_depth - 2))


def gen_crash_cond(cfg: GenConfig, depth: int = 3) -> CrashCond:
    """Random crash condition without free type variables.

    Leaves are predicates on the types of generated values, applications
    of generated function types to such types, and crash conditions of
    whole generated programs; inner nodes are ``and``/``or``.
    """
    rng = random.Random(cfg.seed)
    g = _Gen(cfg, rng)

    def value_type() -> Type:
        return infer({}, gen_value(GenConfig(rng.randrange(2**32), 4, cfg.alphabet))).type

    def leaf() -> CrashCond:
        r = rng.random()
        if r < 0.35:
            kind = rng.choice((HasCtor, HasNoCtor))
            return kind(rng.choice(cfg.alphabet)[0], value_type())
        if r < 0.45:
            return NotFun(value_type())
        if r < 0.8:
            return CCApp(infer({}, g.rec(rng.randint(2, cfg.max_depth), ())).type, value_type())
        return infer({}, g.expr(cfg.max_depth, ())).crash

    def node(d: int) -> CrashCond:
        if d <= 1 or rng.random() < 0.3:
            return leaf()
        return rng.choice((Or, And))(node(d - 1), node(d - 1))

    return node(depth)


def variants(e: Expr) -> set[str]:
    """Syntactic forms occurring in ``e`` (with two derived ones)."""
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        out.add(type(n).__name__)
        if isinstance(n, Ctor):
            stack.extend(n.args)
        elif isinstance(n, App):
            if isinstance(n.fun, (IntLit, Ctor)):
                out.add("NonFunApp")
            stack.extend((n.fun, n.arg))
        elif isinstance(n, Match):
            if not n.arms:
                out.add("EmptyMatch")
            stack.append(n.scrutinee)
            stack.extend(a.body for a in n.arms)
        elif isinstance(n, Rec):
            stack.append(n.body)
    return out


# -- reports -------------------------------------------------------------------

@dataclass
class Failure:
    """A failing case; the subject is a program, or a crash condition for monotonicity."""

    seed: int
    original: Expr | CrashCond
    shrunk: Expr | CrashCond
    expected: str
    actual: str

    def repro(self) -> str:
        body = render(self.shrunk) if _is_cc(self.shrunk) else print_expr(self.shrunk)
        return (f"-- seed {self.seed}\n-- expected: {self.expected}\n"
                f"-- actual: {self.actual}\n{body}\n")


@dataclass
class PropertyReport:
    name: str
    cases: int = 0
    skipped: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.failures)} failing"
        extra = f", {self.skipped} skipped" if self.skipped else ""
        return f"{self.name}: {self.cases} cases{extra}, {status}"


@dataclass(frozen=True)
class Outcome:
    """Result of one property case: failed or not, and whether it counted."""

    failed: bool
    expected: str = ""
    actual: str = ""
    counted: bool = True


PASS = Outcome(False)
SKIP = Outcome(False, counted=False)


# -- theorem checks ------------------------------------------------------------

def check_failure(e: Expr, fuel: int = 2000, k: int = 5) -> Outcome:
    """A definite crash verdict must be confirmed by the evaluator."""
    v = decide(e, {}, k)
    if v.kind is not VerdictKind.CRASH:
        return PASS
    out = evaluate(e, fuel)
    if isinstance(out, Value):
        return Outcome(True, "Error or FuelExhausted", f"Value {print_expr(out.value)}")
    return PASS


def check_preservation(e: Expr, max_steps: int = 50, k: int = 5) -> Outcome:
    """Along reduction, types only shrink and crash verdicts never contradict."""
    steps = trace(e, max_steps)
    prev = infer({}, steps[0])
    prev_v = eval_cc(prev.crash, k)
    for i in range(1, len(steps)):
        cur = infer({}, steps[i])
        st = subtype(cur.type, prev.type, k)
        if st is FALSE_:
            return Outcome(True, "subtype(t', t) not false",
                           f"step {i}: false for {print_expr(steps[i - 1])}")
        cur_v = eval_cc(cur.crash, k)
        if {prev_v, cur_v} == {TRUE_, FALSE_}:
            return Outcome(True, "consistent crash verdicts",
                           f"step {i}: {prev_v.value} then {cur_v.value}")
        prev, prev_v = cur, cur_v
    return PASS


# -- lemma checks ----------------------------------------------------------------

def canonical(x):
    """Key used to compare typings: normalized, simplified, up to renaming."""
    if isinstance(x, Typing):
        return (canonical(x.type), canonical(x.crash))
    if _is_cc(x):
        return alpha_key(_simplify_deep_cc(canonical_binders(normalize_cc(x))))
    return alpha_key(_simplify_deep(canonical_binders(normalize(x))))


def _is_cc(x) -> bool:
    return isinstance(x, (Or, And, HasCtor, HasNoCtor, NotFun, CCApp)) or x in (TRUE, FALSE)


def _simplify_deep(t: Type) -> Type:
    return _Deep().type(t)


def _simplify_deep_cc(c: CrashCond) -> CrashCond:
    return _Deep().cc(c)


class _Deep:
    """Simplify every crash condition nested anywhere in a type, sharing work."""

    def __init__(self):
        self.memo: dict = {}

    def type(self, t: Type) -> Type:
        hit = self.memo.get(t)
        if hit is None:
            hit = self._type(t)
            self.memo[t] = hit
        return hit

    def _type(self, t: Type) -> Type:
        if isinstance(t, Fun):
            return Fun(t.arg, t.self_, self.type(t.ret), self.cc(t.crash))
        if isinstance(t, CtorT):
            return CtorT(t.name, tuple(self.type(a) for a in t.args))
        if isinstance(t, Union):
            return Union(self.type(t.left), self.type(t.right))
        if isinstance(t, TApp):
            return TApp(self.type(t.fn), self.type(t.arg))
        if isinstance(t, Proj):
            return Proj(self.type(t.of), t.ctor, t.index)
        if isinstance(t, Guard):
            return Guard(self.cc(t.cond), self.type(t.t))
        return t

    def cc(self, c: CrashCond) -> CrashCond:
        hit = self.memo.get(c)
        if hit is None:
            hit = simplify_cc(map_types(simplify_cc(c), self.type))
            self.memo[c] = hit
        return hit


def _converged(x) -> bool:
    # normalization ran to completion if a second pass changes nothing
    if _is_cc(x):
        n = normalize_cc(x)
        return alpha_key(normalize_cc(n)) == alpha_key(n)
    n = normalize(x)
    return alpha_key(normalize(n)) == alpha_key(n)


def _same(a, b) -> bool:
    # structurally equal inputs have equal keys; skip the costly canonical form
    return a == b or canonical(a) == canonical(b)


def check_weakening(e: Expr, extra: Type, name: str = "w_fresh") -> Outcome:
    a = infer({}, e)
    b = infer({name: extra}, e)
    if not _same(a, b):
        return Outcome(True, "identical typing", "typing changed by a fresh binding")
    return PASS


def check_value_substitution(e: Expr, v: Expr, y: str = "y") -> Outcome:
    tv = infer({}, v)
    if simplify_cc(tv.crash) != FALSE:
        return SKIP
    before = infer({y: tv.type}, e)
    after = infer({}, subst_value(e, y, v))
    if not _same(before, after):
        return Outcome(True, "typing preserved by value substitution",
                       f"v = {print_expr(v)}")
    return PASS


def check_type_substitution(e: Expr, replacement: Type, y: str = "y",
                            alpha: str = "y_a") -> Outcome:
    """Typing under ``y: alpha`` then substituting equals typing under ``y: replacement``."""
    open_t = infer({y: TVar(alpha)}, e)
    lhs = Typing(subst(open_t.type, {alpha: replacement}),
                 subst_cc(open_t.crash, {alpha: replacement}))
    rhs = infer({y: replacement}, e)
    if not all(_converged(x) for x in (lhs.type, lhs.crash, rhs.type, rhs.crash)):
        return SKIP
    if not _same(lhs, rhs):
        return Outcome(True, "typing commutes with type substitution",
                       f"replacement {replacement!r}")
    return PASS


def check_unsat_after_matching(e: Expr, k: int = 5) -> Outcome:
    """Arms checked under an already-false accumulator never definitely crash."""
    if not isinstance(e, Match):
        e = Match(e, ())
    t0 = infer({}, e.scrutinee).type
    for t in (t0, TVar("y_a")):
        c = infer_patterns({}, FALSE, t, e.arms).crash
        for interp in ({}, {"y_a": INT}, {"y_a": CtorT("Nil")}):
            if eval_cc(subst_cc(c, interp), k) is TRUE_:
                return Outcome(True, "not entailed", "definitely true")
    return PASS


# -- shrinking -----------------------------------------------------------------

def _candidates(e: Expr) -> Iterator[Expr]:
    """Smaller variants of ``e``: replacements at the root, then in children."""
    if not isinstance(e, IntLit) or e.value != 0:
        yield IntLit(0)
    if not (isinstance(e, Ctor) and not e.args):
        yield Ctor("Nil")
    if isinstance(e, Ctor):
        yield from e.args
        for i, a in enumerate(e.args):
            for c in _candidates(a):
                yield Ctor(e.name, e.args[:i] + (c,) + e.args[i + 1:])
    elif isinstance(e, App):
        yield e.fun
        yield e.arg
        for c in _candidates(e.fun):
            yield App(c, e.arg)
        for c in _candidates(e.arg):
            yield App(e.fun, c)
    elif isinstance(e, Match):
        yield e.scrutinee
        for a in e.arms:
            yield a.body
        for i in range(len(e.arms)):
            yield Match(e.scrutinee, e.arms[:i] + e.arms[i + 1:])
        for c in _candidates(e.scrutinee):
            yield Match(c, e.arms)
        for i, a in enumerate(e.arms):
            for c in _candidates(a.body):
                yield Match(e.scrutinee, e.arms[:i] + (Arm(a.ctor, a.binders, c),) + e.arms[i + 1:])
    elif isinstance(e, Rec):
        yield e.body
        for c in _candidates(e.body):
            yield Rec(e.fname, e.param, c)


def shrink(e: Expr, failing: Callable[[Expr], bool], max_rounds: int = 200) -> Expr:
    """Greedy structural shrinking to a local minimum that still fails."""
    if not failing(e):
        raise ValueError("shrink needs a failing input")
    closed = not free_vars(e)
    for _ in range(max_rounds):
        for c in _candidates(e):
            if size(c) >= size(e) or (closed and free_vars(c)):
                continue
            try:
                if failing(c):
                    e = c
                    break
            except (StuckError, RecursionError):
                continue
        else:
            return e
    return e


# -- runner ----------------------------------------------------------------------

PROPERTIES = ("failure", "preservation", "weakening", "value-substitution",
              "type-substitution", "unsat-after-matching", "monotonicity", "roundtrip")


def _case(name: str, seed: int, cfg: GenConfig, fuel: int, k: int) -> tuple[Expr | CrashCond, Callable]:
    e = gen_expr(GenConfig(seed, cfg.max_depth, cfg.alphabet, cfg.int_range, True))
    if name == "failure":
        return e, lambda x: check_failure(x, fuel, k)
    if name == "preservation":
        return e, lambda x: check_preservation(x, 50, k)
    if name == "weakening":
        extra = infer({}, gen_value(GenConfig(seed + 1, 4, cfg.alphabet))).type
        return e, lambda x: check_weakening(x, extra)
    if name == "value-substitution":
        e = gen_expr(GenConfig(seed, cfg.max_depth, cfg.alphabet, cfg.int_range, False))
        v = gen_value(GenConfig(seed + 1, 4, cfg.alphabet))
        return e, lambda x: check_value_substitution(x, v)
    if name == "type-substitution":
        e = gen_expr(GenConfig(seed, cfg.max_depth, cfg.alphabet, cfg.int_range, False))
        r = infer({}, gen_value(GenConfig(seed + 1, 4, cfg.alphabet))).type
        return e, lambda x: check_type_substitution(x, r)
    if name == "unsat-after-matching":
        return e, lambda x: check_unsat_after_matching(x, k)
    if name == "monotonicity":
        return gen_crash_cond(GenConfig(seed, cfg.max_depth, cfg.alphabet)), check_monotonicity
    if name == "roundtrip":
        return e, check_roundtrip
    raise ValueError(f"unknown property {name!r}")


def check_roundtrip(e: Expr) -> Outcome:
    back = parse_expr(print_expr(e))
    if not expr_alpha_equal(back, e):
        return Outcome(True, print_expr(e), print_expr(back))
    return PASS


def check_monotonicity(c: CrashCond, ks: tuple[int, ...] = (0, 1, 2, 3, 5)) -> Outcome:
    """Once a budget decides ``c``, every larger budget agrees."""
    decided = None
    for k in ks:
        v = eval_cc(c, k)
        if decided is not None and v is not decided[1]:
            return Outcome(True, f"{decided[1].value} at k={decided[0]}",
                           f"{v.value} at k={k}")
        if decided is None and v is not v.UNKNOWN:
            decided = (k, v)
    return PASS


def run_property(name: str, cases: int = 1000, seed: int = 0, fuel: int = 2000, k: int = 5,
                 cfg: GenConfig | None = None, max_failures: int = 5) -> PropertyReport:
    """Run ``cases`` counted cases of ``name``; skipped cases are replaced."""
    cfg = cfg or GenConfig()
    report = PropertyReport(name)
    s = seed
    while report.cases < cases:
        e, check = _case(name, s, cfg, fuel, k)
        out = check(e)
        if out.counted:
            report.cases += 1
        else:
            report.skipped += 1
        if out.failed:
            small = e if _is_cc(e) else shrink(e, lambda x: _safe_fails(check, x))
            report.failures.append(Failure(s, e, small, out.expected, out.actual))
            if len(report.failures) >= max_failures:
                break
        s += 1
    return report


def _safe_fails(check: Callable[[Expr], Outcome], e: Expr) -> bool:
    try:
        return check(e).failed
    except Exception:
        return False
