"""Types, crash conditions and the operators that relate them.

Raw dataclass constructors build nodes verbatim.  The lower-case helpers
(``union``, ``guard``, ``ctor_t``, ``or_``, ``and_``, ``not_fun``) are smart
constructors applying only structural identities; the operators ``tapp``,
``proj`` and ``ccapp`` perform one reduction step each.

Besides the core forms there are two additions:

* ``SelfVar`` is the recursion variable bound by a function type.  It is
  kept apart from ``TVar`` so that ``NotFun`` of it is known to be false.
* ``Guard(cond, t)`` is a union member that is only present when ``cond``
  holds.  Match arms produce guarded types, which lets the solver drop
  arms that certainly are not taken.  ``erase_guards`` recovers the
  unguarded type.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Iterator, Union as _U


def _cache_hash(cls):
    # types are deep, shared trees: hash each node once
    generated = cls.__hash__

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = generated(self)
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = __hash__
    return cls


def _canon(x):
    while True:
        nxt = x.__dict__.get("_canon")
        if nxt is None:
            return x
        x = nxt


def _cache_eq(cls):
    # Structural equality on shared DAGs is exponential if done naively.
    # Equal nodes are linked to one representative so repeated comparisons
    # of the same subterms are constant time.
    names = [f.name for f in fields(cls)]

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not cls:
            return NotImplemented
        a, b = _canon(self), _canon(other)
        if a is b:
            return True
        if hash(a) != hash(b):
            return False
        for n in names:
            if getattr(a, n) != getattr(b, n):
                return False
        object.__setattr__(b, "_canon", a)
        return True

    cls.__eq__ = __eq__
    return cls


def _node(cls):
    return _cache_eq(_cache_hash(dataclass(frozen=True)(cls)))


# -- types ---------------------------------------------------------------------

@_node
class TVar:
    name: str


@_node
class SelfVar:
    name: str


@_node
class Fun:
    arg: str
    self_: str
    ret: "Type"
    crash: "CrashCond"


@_node
class CtorT:
    name: str
    args: tuple = ()


@_node
class Union:
    left: "Type"
    right: "Type"


@_node
class IntT:
    pass


@_node
class Bot:
    pass


@_node
class TApp:
    fn: "Type"
    arg: "Type"


@_node
class Proj:
    of: "Type"
    ctor: str
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"projection index must be positive, got {self.index}")


@_node
class Guard:
    cond: "CrashCond"
    t: "Type"


INT = IntT()
BOT = Bot()

Type = _U[TVar, SelfVar, Fun, CtorT, Union, IntT, Bot, TApp, Proj, Guard]


# -- crash conditions ----------------------------------------------------------

@_node
class FF:
    pass


@_node
class TT:
    pass


@_node
class Or:
    left: "CrashCond"
    right: "CrashCond"


@_node
class And:
    left: "CrashCond"
    right: "CrashCond"


@_node
class HasCtor:
    ctor: str
    t: Type


@_node
class HasNoCtor:
    ctor: str
    t: Type


@_node
class NotFun:
    t: Type


@_node
class CCApp:
    fn: Type
    arg: Type


FALSE = FF()
TRUE = TT()

CrashCond = _U[FF, TT, Or, And, HasCtor, HasNoCtor, NotFun, CCApp]

PREDICATES = (HasCtor, HasNoCtor, NotFun)
SYMBOLIC_HEADS = (TVar, SelfVar, TApp, Proj)


def is_type(x) -> bool:
    return isinstance(x, (TVar, SelfVar, Fun, CtorT, Union, IntT, Bot, TApp, Proj, Guard))


# -- smart constructors --------------------------------------------------------

def union(a: Type, b: Type) -> Type:
    if isinstance(a, Bot):
        return b
    if isinstance(b, Bot) or a == b:
        return a
    return Union(a, b)


def union_all(ts: Iterable[Type]) -> Type:
    out: Type = BOT
    for t in ts:
        out = union(out, t)
    return out


def guard(c: CrashCond, t: Type) -> Type:
    if isinstance(c, TT):
        return t
    if isinstance(c, FF) or isinstance(t, Bot):
        return BOT
    return Guard(c, t)


def ctor_t(name: str, args: Iterable[Type] = ()) -> Type:
    args = tuple(args)
    if any(isinstance(a, Bot) for a in args):
        return BOT
    return CtorT(name, args)


def or_(a: CrashCond, b: CrashCond) -> CrashCond:
    if isinstance(a, TT) or isinstance(b, FF):
        return a
    if isinstance(b, TT) or isinstance(a, FF):
        return b
    return a if a == b else Or(a, b)


def and_(a: CrashCond, b: CrashCond) -> CrashCond:
    if isinstance(a, FF) or isinstance(b, TT):
        return a
    if isinstance(b, FF) or isinstance(a, TT):
        return b
    return a if a == b else And(a, b)


def not_fun(t: Type) -> CrashCond:
    # the recursion variable always stands for the enclosing function
    if isinstance(t, SelfVar):
        return FALSE
    return NotFun(t)


# -- operators -----------------------------------------------------------------

def _distribute(t: Type, leaf: Callable[[Type], Type]) -> Type:
    # push ``leaf`` through unions and guards; shared sub-DAGs are visited once
    memo: dict[int, Type] = {}

    def go(x: Type) -> Type:
        hit = memo.get(id(x))
        if hit is None:
            if isinstance(x, Union):
                hit = union(go(x.left), go(x.right))
            elif isinstance(x, Guard):
                hit = guard(x.cond, go(x.t))
            else:
                hit = leaf(x)
            memo[id(x)] = hit
        return hit

    return go(t)


def tapp(t1: Type, t2: Type) -> Type:
    """One step of type-level application ``t1<t2>``."""
    return _distribute(t1, lambda f: _tapp_leaf(f, t2))


def _tapp_leaf(t1: Type, t2: Type) -> Type:
    if isinstance(t1, Fun):
        return subst(t1.ret, {t1.arg: t2, t1.self_: t1})
    if isinstance(t1, SYMBOLIC_HEADS):
        return TApp(t1, t2)
    return BOT


def proj(t: Type, ctor: str, index: int) -> Type:
    """One step of projecting component ``index`` (1-based) of ``ctor``."""
    if index < 1:
        raise ValueError(f"projection index must be positive, got {index}")
    return _distribute(t, lambda u: _proj_leaf(u, ctor, index))


def _proj_leaf(t: Type, ctor: str, index: int) -> Type:
    if isinstance(t, CtorT):
        if t.name != ctor:
            return BOT
        if index > len(t.args):
            raise ValueError(f"{ctor} has arity {len(t.args)}, cannot project {index}")
        return t.args[index - 1]
    if isinstance(t, SYMBOLIC_HEADS):
        return Proj(t, ctor, index)
    return BOT


def ccapp(t1: Type, t2: Type) -> CrashCond:
    """One step of crash-condition-level application.

    Unions and guarded heads stay symbolic: the solver requires every
    possible function to crash, which a plain disjunction would not say.
    """
    if isinstance(t1, Fun):
        return subst_cc(t1.crash, {t1.arg: t2, t1.self_: t1})
    if isinstance(t1, (TVar, SelfVar, TApp, Proj, Union, Guard)):
        return CCApp(t1, t2)
    return TRUE


# -- variables and substitution ------------------------------------------------

_fresh = itertools.count()


def fresh_name(prefix: str = "r") -> str:
    return f"{prefix}{next(_fresh)}"


def _fresh_avoiding(prefix: str, avoid: frozenset[str]) -> str:
    while True:
        n = fresh_name(prefix)
        if n not in avoid:
            return n


def free_tvars(x: Type | CrashCond) -> frozenset[str]:
    """Free type and self variables of a type or crash condition."""
    cached = x.__dict__.get("_ftv")
    if cached is not None:
        return cached
    if isinstance(x, (TVar, SelfVar)):
        out = frozenset((x.name,))
    elif isinstance(x, Fun):
        out = (free_tvars(x.ret) | free_tvars(x.crash)) - {x.arg, x.self_}
    elif isinstance(x, CtorT):
        out = frozenset().union(*(free_tvars(a) for a in x.args))
    else:
        out = frozenset().union(*(free_tvars(c) for c in _children(x)))
    object.__setattr__(x, "_ftv", out)
    return out


def _children(x) -> tuple:
    if isinstance(x, (Union, Or, And)):
        return (x.left, x.right)
    if isinstance(x, (TApp, CCApp)):
        return (x.fn, x.arg)
    if isinstance(x, Proj):
        return (x.of,)
    if isinstance(x, Guard):
        return (x.cond, x.t)
    if isinstance(x, (HasCtor, HasNoCtor, NotFun)):
        return (x.t,)
    if isinstance(x, CtorT):
        return x.args
    if isinstance(x, Fun):
        return (x.ret, x.crash)
    return ()


def subst(t: Type, m: dict[str, Type]) -> Type:
    """Simultaneous capture-avoiding substitution of type and self variables.

    No operator is reduced; the result may contain new redexes.
    """
    return _Subst(m).type(t) if m else t


def subst_cc(c: CrashCond, m: dict[str, Type]) -> CrashCond:
    return _Subst(m).cc(c) if m else c


class _Subst:
    # types are DAGs with heavy sharing, so results are memoised per node
    def __init__(self, m: dict[str, Type]):
        self.m = m
        self.keys = frozenset(m)
        self.memo: dict[int, object] = {}

    def type(self, t: Type) -> Type:
        if isinstance(t, (TVar, SelfVar)):
            return self.m.get(t.name, t)
        if isinstance(t, (IntT, Bot)) or self.keys.isdisjoint(free_tvars(t)):
            return t
        hit = self.memo.get(id(t))
        if hit is not None:
            return hit
        if isinstance(t, Fun):
            out = self.fun(t)
        elif isinstance(t, CtorT):
            out = CtorT(t.name, tuple(self.type(a) for a in t.args))
        elif isinstance(t, Union):
            out = Union(self.type(t.left), self.type(t.right))
        elif isinstance(t, TApp):
            out = TApp(self.type(t.fn), self.type(t.arg))
        elif isinstance(t, Proj):
            out = Proj(self.type(t.of), t.ctor, t.index)
        elif isinstance(t, Guard):
            out = Guard(self.cc(t.cond), self.type(t.t))
        else:
            raise TypeError(f"not a type: {t!r}")
        self.memo[id(t)] = out
        return out

    def fun(self, t: Fun) -> Fun:
        # binders shadow; rename a binder that would capture a replacement's variable
        m = {k: v for k, v in self.m.items() if k not in (t.arg, t.self_)}
        if not m:
            return t
        incoming = frozenset().union(*(free_tvars(v) for v in m.values()))
        arg, self_ = t.arg, t.self_
        rename: dict[str, Type] = {}
        # a new binder name must not be captured, substituted, or already in use
        avoid = incoming | self.keys | free_tvars(t) | {arg, self_}
        if arg in incoming:
            arg = _fresh_avoiding("a", avoid)
            rename[t.arg] = TVar(arg)
        if self_ in incoming:
            self_ = _fresh_avoiding("X", avoid)
            rename[t.self_] = SelfVar(self_)
        ret, crash = t.ret, t.crash
        if rename:
            r = _Subst(rename)
            ret, crash = r.type(ret), r.cc(crash)
        inner = _Subst(m)
        return Fun(arg, self_, inner.type(ret), inner.cc(crash))

    def cc(self, c: CrashCond) -> CrashCond:
        if isinstance(c, (TT, FF)) or self.keys.isdisjoint(free_tvars(c)):
            return c
        hit = self.memo.get(id(c))
        if hit is not None:
            return hit
        if isinstance(c, Or):
            out = Or(self.cc(c.left), self.cc(c.right))
        elif isinstance(c, And):
            out = And(self.cc(c.left), self.cc(c.right))
        elif isinstance(c, HasCtor):
            out = HasCtor(c.ctor, self.type(c.t))
        elif isinstance(c, HasNoCtor):
            out = HasNoCtor(c.ctor, self.type(c.t))
        elif isinstance(c, NotFun):
            out = NotFun(self.type(c.t))
        elif isinstance(c, CCApp):
            out = CCApp(self.type(c.fn), self.type(c.arg))
        else:
            raise TypeError(f"not a crash condition: {c!r}")
        self.memo[id(c)] = out
        return out


def subst_tvar(x: Type | CrashCond, alpha: str, replacement: Type) -> Type | CrashCond:
    """Substitute ``replacement`` for the type variable ``alpha``."""
    if is_type(x):
        return subst(x, {alpha: replacement})
    return subst_cc(x, {alpha: replacement})


def erase_guards(x):
    """Drop guards, keeping the guarded types as plain union members."""
    if isinstance(x, Guard):
        return erase_guards(x.t)
    if isinstance(x, (TVar, SelfVar, IntT, Bot, TT, FF)):
        return x
    if isinstance(x, Fun):
        return Fun(x.arg, x.self_, erase_guards(x.ret), erase_guards(x.crash))
    if isinstance(x, CtorT):
        return CtorT(x.name, tuple(erase_guards(a) for a in x.args))
    kw = {f.name: erase_guards(getattr(x, f.name)) if not isinstance(getattr(x, f.name), (str, int))
          else getattr(x, f.name) for f in fields(x)}
    return type(x)(**kw)


def union_members(t: Type) -> Iterator[Type]:
    """Flattened, syntactic union members of ``t``."""
    stack = [t]
    while stack:
        n = stack.pop()
        if isinstance(n, Union):
            stack.append(n.right)
            stack.append(n.left)
        elif not isinstance(n, Bot):
            yield n


def walk(x) -> Iterator:
    """All type and crash-condition nodes below ``x`` (inclusive)."""
    stack = [x]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(_children(n))


def ctor_names(x) -> dict[str, int]:
    """Constructor names with arities mentioned in ``x``."""
    out: dict[str, int] = {}
    for n in walk(x):
        if isinstance(n, CtorT):
            out.setdefault(n.name, len(n.args))
        elif isinstance(n, (HasCtor, HasNoCtor)):
            out.setdefault(n.ctor, -1)
        elif isinstance(n, Proj):
            out.setdefault(n.ctor, -1)
    return out


# -- normalization -------------------------------------------------------------

NORMALIZE_FUEL = 256


class _Fuel:
    def __init__(self, n: int):
        self.n = n
        self.memo: dict = {}
        self.active: set = set()

    def take(self) -> bool:
        if self.n <= 0:
            return False
        self.n -= 1
        return True


def normalize(t: Type, fuel: int = NORMALIZE_FUEL) -> Type:
    """Reduce operator redexes and tidy unions.

    Unfolding a function type may produce new redexes indefinitely (e.g. an
    infinite generator), so at most ``fuel`` unfoldings are performed; any
    remaining applications stay symbolic.  On types that reach a normal form
    within the budget the result is idempotent.
    """
    return _norm(t, _Fuel(fuel))


def normalize_cc(c: CrashCond, fuel: int = NORMALIZE_FUEL) -> CrashCond:
    return _norm_cc(c, _Fuel(fuel))


def _norm(t: Type, fuel: _Fuel) -> Type:
    # keyed up to renaming, so fresh binder names do not hide repetitions
    key = alpha_key(t)
    hit = fuel.memo.get(key)
    if hit is None:
        if key in fuel.active:
            return t  # unfolding reproduced a term still being normalized
        fuel.active.add(key)
        try:
            hit = _norm_raw(t, fuel)
        finally:
            fuel.active.discard(key)
        fuel.memo[key] = hit
    return hit


def _norm_raw(t: Type, fuel: _Fuel) -> Type:
    if isinstance(t, (TVar, SelfVar, IntT, Bot)):
        return t
    if isinstance(t, Fun):
        return Fun(t.arg, t.self_, _norm(t.ret, fuel), _norm_cc(t.crash, fuel))
    if isinstance(t, CtorT):
        return ctor_t(t.name, (_norm(a, fuel) for a in t.args))
    if isinstance(t, Union):
        members: list[Type] = []
        seen: set = set()
        for m in union_members(t):
            nm = _norm(m, fuel)
            for part in union_members(nm):
                k = alpha_key(part)
                if k not in seen:
                    seen.add(k)
                    members.append(part)
        return _rebuild_union(members)
    if isinstance(t, Guard):
        return guard(_norm_cc(t.cond, fuel), _norm(t.t, fuel))
    if isinstance(t, Proj):
        of = _norm(t.of, fuel)
        r = proj(of, t.ctor, t.index)
        return r if isinstance(r, Proj) else _norm(r, fuel)
    if isinstance(t, TApp):
        fn, arg = _norm(t.fn, fuel), _norm(t.arg, fuel)
        if isinstance(fn, SYMBOLIC_HEADS):
            return TApp(fn, arg)
        if _has_fun_head(fn) and not fuel.take():
            return TApp(fn, arg)
        return _norm(tapp(fn, arg), fuel)
    raise TypeError(f"not a type: {t!r}")


def _has_fun_head(t: Type) -> bool:
    return any(isinstance(m, Fun) or (isinstance(m, Guard) and _has_fun_head(m.t))
               for m in union_members(t))


def _rebuild_union(members: list[Type]) -> Type:
    if not members:
        return BOT
    out = members[-1]
    for m in reversed(members[:-1]):
        out = Union(m, out)
    return out


def _norm_cc(c: CrashCond, fuel: _Fuel) -> CrashCond:
    # keyed up to renaming, so fresh binder names do not hide repetitions
    key = alpha_key(c)
    hit = fuel.memo.get(key)
    if hit is None:
        if key in fuel.active:
            return c  # unfolding reproduced a term still being normalized
        fuel.active.add(key)
        try:
            hit = _norm_cc_raw(c, fuel)
        finally:
            fuel.active.discard(key)
        fuel.memo[key] = hit
    return hit


def _norm_cc_raw(c: CrashCond, fuel: _Fuel) -> CrashCond:
    if isinstance(c, (TT, FF)):
        return c
    if isinstance(c, Or):
        return or_(_norm_cc(c.left, fuel), _norm_cc(c.right, fuel))
    if isinstance(c, And):
        return and_(_norm_cc(c.left, fuel), _norm_cc(c.right, fuel))
    if isinstance(c, HasCtor):
        return HasCtor(c.ctor, _norm(c.t, fuel))
    if isinstance(c, HasNoCtor):
        return HasNoCtor(c.ctor, _norm(c.t, fuel))
    if isinstance(c, NotFun):
        return not_fun(_norm(c.t, fuel))
    if isinstance(c, CCApp):
        fn, arg = _norm(c.fn, fuel), _norm(c.arg, fuel)
        if isinstance(fn, Fun) and fuel.take():
            return _norm_cc(ccapp(fn, arg), fuel)
        if isinstance(fn, Fun):
            return CCApp(fn, arg)
        return ccapp(fn, arg)
    raise TypeError(f"not a crash condition: {c!r}")


# -- alpha equivalence ---------------------------------------------------------

def alpha_key(x):
    """Hashable key identifying ``x`` up to binder renaming and union order.

    Bound variables are keyed by de Bruijn index, so the key of a subterm
    does not depend on where it occurs.
    """
    cached = x.__dict__.get("_akey")
    if cached is None:
        rep = _canon(x)
        cached = rep.__dict__.get("_akey")
        if cached is None:
            cached = _AKey().top(rep)
            object.__setattr__(rep, "_akey", cached)
        object.__setattr__(x, "_akey", cached)
    return cached


_KEY_IDS: dict[tuple, int] = {}


def _intern(k: tuple) -> int:
    # keys are flat tuples of child ids, so hashing and comparing them is cheap
    i = _KEY_IDS.get(k)
    if i is None:
        i = _KEY_IDS[k] = len(_KEY_IDS)
    return i


class _AKey:
    def __init__(self):
        self.memo: dict = {}

    def top(self, x):
        if isinstance(x, (TVar, SelfVar, IntT, Bot, TT, FF)):
            return self.key(x, {}, 0)
        return self._compute(x, {}, 0)

    def key(self, x, env: dict[str, int], depth: int):
        if isinstance(x, (TVar, SelfVar)):
            lvl = env.get(x.name)
            return _intern((type(x).__name__, x.name if lvl is None else depth - lvl))
        if isinstance(x, (IntT, Bot, TT, FF)):
            return _intern((type(x).__name__,))
        if not env:
            return alpha_key(x)
        bound = free_tvars(x).intersection(env)
        if not bound:
            return alpha_key(x)
        mk = (id(x), frozenset((v, depth - env[v]) for v in bound))
        hit = self.memo.get(mk)
        if hit is None:
            hit = self._compute(x, env, depth)
            self.memo[mk] = hit
        return hit

    def _compute(self, x, env, depth):
        k = self.key
        if isinstance(x, Fun):
            inner = {**env, x.arg: depth, x.self_: depth + 1}
            return _intern(("Fun", k(x.ret, inner, depth + 2), k(x.crash, inner, depth + 2)))
        if isinstance(x, Union):
            return _intern(("Union", frozenset(k(m, env, depth) for m in union_members(x))))
        if isinstance(x, CtorT):
            return _intern(("CtorT", x.name) + tuple(k(a, env, depth) for a in x.args))
        if isinstance(x, Proj):
            return _intern(("Proj", x.ctor, x.index, k(x.of, env, depth)))
        if isinstance(x, (HasCtor, HasNoCtor)):
            return _intern((type(x).__name__, x.ctor, k(x.t, env, depth)))
        return _intern((type(x).__name__,) + tuple(k(c, env, depth) for c in _children(x)))


def canonical_binders(x):
    """Rename every binder after its nesting depth.

    Alpha-equivalent subterms become structurally equal, so syntactic
    simplifications such as deduplication also apply up to renaming.
    """
    return _Canon().any(x, 0)


class _Canon:
    def __init__(self):
        self.memo: dict = {}

    def any(self, x, d: int):
        if isinstance(x, (TVar, SelfVar, IntT, Bot, TT, FF)):
            return x
        key = (x, d)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._rebuild(x, d)
            self.memo[key] = hit
        return hit

    def _rebuild(self, x, d: int):
        f = lambda y: self.any(y, d)
        if isinstance(x, Fun):
            a, s = f"_a{d}", f"_x{d}"
            ren = {x.arg: TVar(a), x.self_: SelfVar(s)}
            return Fun(a, s, self.any(subst(x.ret, ren), d + 1),
                       self.any(subst_cc(x.crash, ren), d + 1))
        if isinstance(x, CtorT):
            return CtorT(x.name, tuple(f(a) for a in x.args))
        if isinstance(x, (Union, Or, And)):
            return type(x)(f(x.left), f(x.right))
        if isinstance(x, (TApp, CCApp)):
            return type(x)(f(x.fn), f(x.arg))
        if isinstance(x, Proj):
            return Proj(f(x.of), x.ctor, x.index)
        if isinstance(x, Guard):
            return Guard(f(x.cond), f(x.t))
        if isinstance(x, (HasCtor, HasNoCtor)):
            return type(x)(x.ctor, f(x.t))
        if isinstance(x, NotFun):
            return NotFun(f(x.t))
        raise TypeError(f"not a type or crash condition: {x!r}")


def alpha_equal(a: Type | CrashCond, b: Type | CrashCond) -> bool:
    """Equality up to binder renaming and union reordering after normalization."""
    if is_type(a) and is_type(b):
        a, b = normalize(a), normalize(b)
    elif not is_type(a) and not is_type(b):
        a, b = normalize_cc(a), normalize_cc(b)
    else:
        return False
    return alpha_key(a) == alpha_key(b)


# -- boolean simplification ----------------------------------------------------

def _flatten(c: CrashCond, kind: type) -> list[CrashCond]:
    if isinstance(c, kind):
        return _flatten(c.left, kind) + _flatten(c.right, kind)
    return [c]


def _dedupe(xs: Iterable) -> list:
    out, seen = [], set()
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def _nest(kind: type, xs: list[CrashCond]) -> CrashCond:
    out = xs[-1]
    for x in reversed(xs[:-1]):
        out = kind(x, out)
    return out


def simplify_cc(c: CrashCond) -> CrashCond:
    """Purely boolean rewriting: flattening, units, duplicates, absorption,
    and factoring conjuncts shared by every disjunct out of a disjunction.
    Predicates are never evaluated."""
    if isinstance(c, And):
        parts: list[CrashCond] = []
        for p in _flatten(c, And):
            p = simplify_cc(p)
            if isinstance(p, FF):
                return FALSE
            if not isinstance(p, TT):
                parts.extend(_flatten(p, And))
        parts = _dedupe(parts)
        # absorption: a and (a or b) == a
        present = set(parts)
        parts = [p for p in parts if not (isinstance(p, Or) and
                                          any(d in present for d in _flatten(p, Or)))]
        return _nest(And, parts) if parts else TRUE
    if isinstance(c, Or):
        parts = []
        for p in _flatten(c, Or):
            p = simplify_cc(p)
            if isinstance(p, TT):
                return TRUE
            if not isinstance(p, FF):
                parts.extend(_flatten(p, Or))
        parts = _dedupe(parts)
        if not parts:
            return FALSE
        if len(parts) == 1:
            return parts[0]
        return _factor(parts)
    return c


def _factor(disjuncts: list[CrashCond]) -> CrashCond:
    conj = [_flatten(d, And) for d in disjuncts]
    common = [x for x in conj[0] if all(x in other for other in conj[1:])]
    if not common:
        return _nest(Or, disjuncts)
    rests = [[x for x in cs if x not in common] for cs in conj]
    if any(not r for r in rests):
        # absorption: a or (a and b) == a
        return _nest(And, common)
    rest = simplify_cc(_nest(Or, [_nest(And, r) for r in rests]))
    return _nest(And, common + [rest])


# -- rendering -----------------------------------------------------------------

def render(x, guards: bool = True) -> str:
    """Canonical text form of a type or crash condition.

    With ``guards=False`` guarded union members are shown unguarded.
    """
    if is_type(x):
        return _rt(x, guards, top=True)
    return _rc(x, guards, 0)


def _rt(t: Type, g: bool, top: bool = False) -> str:
    if isinstance(t, (TVar, SelfVar)):
        return t.name
    if isinstance(t, IntT):
        return "int"
    if isinstance(t, Bot):
        return "bot"
    if isinstance(t, CtorT):
        if not t.args:
            return t.name
        return f"{t.name}({', '.join(_rt(a, g, True) for a in t.args)})"
    if isinstance(t, Union):
        s = " | ".join(_rt(m, g) for m in _union_view(t, g))
        return s if top else f"({s})"
    if isinstance(t, Proj):
        return f"{t.ctor}.{t.index}({_rt(t.of, g, True)})"
    if isinstance(t, TApp):
        return f"{_rt(t.fn, g)}<{_rt(t.arg, g, True)}>"
    if isinstance(t, Guard):
        if not g:
            return _rt(t.t, g, top)
        return f"{{{_rc(t.cond, g, 0)} ? {_rt(t.t, g, True)}}}"
    if isinstance(t, Fun):
        s = f"[{t.arg},{t.self_}]{_rt(t.ret, g, True)} & {_rc(t.crash, g, 0)}"
        return s if top else f"({s})"
    raise TypeError(f"not a type: {t!r}")


def _union_view(t: Type, g: bool) -> list[Type]:
    out = []
    for m in union_members(t):
        if not g and isinstance(m, Guard):
            out.extend(_union_view(erase_guards(m), g))
        else:
            out.append(m)
    return out


def _rc(c: CrashCond, g: bool, prec: int) -> str:
    # prec: 0 top, 1 operand of "or", 2 operand of "and"
    if isinstance(c, TT):
        return "tt"
    if isinstance(c, FF):
        return "ff"
    if isinstance(c, Or):
        s = " or ".join(_rc(p, g, 1) for p in _flatten(c, Or))
        return f"({s})" if prec >= 2 else s
    if isinstance(c, And):
        s = " and ".join(_rc(p, g, 2) for p in _flatten(c, And))
        return s
    if isinstance(c, HasCtor):
        return f"{c.ctor} in {_rt(c.t, g)}"
    if isinstance(c, HasNoCtor):
        return f"{c.ctor} notin {_rt(c.t, g)}"
    if isinstance(c, NotFun):
        return f"nofun {_rt(c.t, g)}"
    if isinstance(c, CCApp):
        return f"cc({_rt(c.fn, g, True)}, {_rt(c.arg, g, True)})"
    raise TypeError(f"not a crash condition: {c!r}")


def map_types(x, fn: Callable):
    """Apply ``fn`` to every maximal type inside a crash condition."""
    if isinstance(x, (Or, And)):
        return type(x)(map_types(x.left, fn), map_types(x.right, fn))
    if isinstance(x, (HasCtor, HasNoCtor)):
        return type(x)(x.ctor, fn(x.t))
    if isinstance(x, NotFun):
        return NotFun(fn(x.t))
    if isinstance(x, CCApp):
        return CCApp(fn(x.fn), fn(x.arg))
    return x
