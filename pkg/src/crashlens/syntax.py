"""Abstract syntax of the constructor language, plus substitution and printing."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Ctor:
    name: str
    args: tuple[Expr, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class App:
    fun: Expr
    arg: Expr


@dataclass(frozen=True)
class Arm:
    ctor: str
    binders: tuple[str, ...]
    body: Expr


@dataclass(frozen=True)
class Match:
    scrutinee: Expr
    arms: tuple[Arm, ...] = ()


@dataclass(frozen=True)
class Rec:
    fname: str
    param: str
    body: Expr


@dataclass(frozen=True)
class Err:
    pass


ERR = Err()

Expr = Union[IntLit, Var, Ctor, App, Match, Rec, Err]


@dataclass
class Program:
    """Parsed source file.

    ``defs`` keep their source form; :meth:`resolved` inlines earlier
    definitions into later ones and into ``main``.
    """

    defs: list[tuple[str, Expr]] = field(default_factory=list)
    main: Expr | None = None
    alphabet: dict[str, int] = field(default_factory=dict)

    def resolved(self) -> dict[str, Expr]:
        out: dict[str, Expr] = {}
        for name, body in self.defs:
            out[name] = inline(body, out)
        return out

    def resolved_main(self) -> Expr | None:
        if self.main is None:
            return None
        return inline(self.main, self.resolved())


def inline(e: Expr, defs: dict[str, Expr]) -> Expr:
    for name in free_vars(e):
        if name in defs:
            e = subst_value(e, name, defs[name])
    return e


# -- classification -----------------------------------------------------------

def is_value(e: Expr) -> bool:
    if isinstance(e, (IntLit, Rec, Err)):
        return True
    if isinstance(e, Ctor):
        return _ctor_is_value(e)
    return False


def _ctor_is_value(e: Ctor) -> bool:
    # memoised on the node; shared subtrees make repeated walks exponential
    cached = e.__dict__.get("_is_value")
    if cached is None:
        cached = all(is_value(a) and not isinstance(a, Err) for a in e.args)
        object.__setattr__(e, "_is_value", cached)
    return cached


def is_nonfun_value(e: Expr) -> bool:
    return isinstance(e, IntLit) or (isinstance(e, Ctor) and is_value(e))


def contains_err(e: Expr) -> bool:
    return any(isinstance(n, Err) for n in subterms(e))


def subterms(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Ctor):
            stack.extend(n.args)
        elif isinstance(n, App):
            stack.extend((n.fun, n.arg))
        elif isinstance(n, Match):
            stack.append(n.scrutinee)
            stack.extend(a.body for a in n.arms)
        elif isinstance(n, Rec):
            stack.append(n.body)


def size(e: Expr) -> int:
    return sum(1 for _ in subterms(e))


def ctor_arities(e: Expr) -> dict[str, int]:
    out: dict[str, int] = {}
    for n in subterms(e):
        if isinstance(n, Ctor):
            out.setdefault(n.name, n.arity)
        elif isinstance(n, Match):
            for a in n.arms:
                out.setdefault(a.ctor, len(a.binders))
    return out


# -- variables and substitution ----------------------------------------------

def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, (IntLit, Err)):
        return frozenset()
    if isinstance(e, Ctor):
        if not e.args:
            return frozenset()
        cached = e.__dict__.get("_fv")
        if cached is None:
            cached = frozenset().union(*(free_vars(a) for a in e.args))
            object.__setattr__(e, "_fv", cached)
        return cached
    if isinstance(e, App):
        return free_vars(e.fun) | free_vars(e.arg)
    if isinstance(e, Rec):
        return free_vars(e.body) - {e.fname, e.param}
    if isinstance(e, Match):
        out = set(free_vars(e.scrutinee))
        for arm in e.arms:
            out |= free_vars(arm.body) - set(arm.binders)
        return frozenset(out)
    raise TypeError(f"not an expression: {e!r}")


def subst_value(e: Expr, x: str, v: Expr) -> Expr:
    """Replace free occurrences of ``x`` in ``e`` by the closed term ``v``.

    Binders shadow: a ``rec`` binding ``x`` (as function or parameter) and
    a match arm binding ``x`` leave their bodies untouched.  Since ``v`` is
    closed no renaming is ever needed.
    """
    if isinstance(e, Var):
        return v if e.name == x else e
    if isinstance(e, (IntLit, Err)):
        return e
    if x not in free_vars(e):
        return e
    if isinstance(e, Ctor):
        return Ctor(e.name, tuple(subst_value(a, x, v) for a in e.args))
    if isinstance(e, App):
        return App(subst_value(e.fun, x, v), subst_value(e.arg, x, v))
    if isinstance(e, Rec):
        if x in (e.fname, e.param):
            return e
        return Rec(e.fname, e.param, subst_value(e.body, x, v))
    if isinstance(e, Match):
        arms = tuple(
            a if x in a.binders else Arm(a.ctor, a.binders, subst_value(a.body, x, v))
            for a in e.arms
        )
        return Match(subst_value(e.scrutinee, x, v), arms)
    raise TypeError(f"not an expression: {e!r}")


def alpha_equal(a: Expr, b: Expr) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Expr, b: Expr, ma: dict[str, int], mb: dict[str, int], level: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = ma.get(a.name), mb.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, IntLit):
        return a.value == b.value
    if isinstance(a, Err):
        return True
    if isinstance(a, Ctor):
        return (a.name == b.name and len(a.args) == len(b.args)
                and all(_alpha(x, y, ma, mb, level) for x, y in zip(a.args, b.args)))
    if isinstance(a, App):
        return _alpha(a.fun, b.fun, ma, mb, level) and _alpha(a.arg, b.arg, ma, mb, level)
    if isinstance(a, Rec):
        ma2 = {**ma, a.fname: level, a.param: level + 1}
        mb2 = {**mb, b.fname: level, b.param: level + 1}
        return _alpha(a.body, b.body, ma2, mb2, level + 2)
    if isinstance(a, Match):
        if len(a.arms) != len(b.arms) or not _alpha(a.scrutinee, b.scrutinee, ma, mb, level):
            return False
        for x, y in zip(a.arms, b.arms):
            if x.ctor != y.ctor or len(x.binders) != len(y.binders):
                return False
            ma2 = dict(ma)
            mb2 = dict(mb)
            for i, (p, q) in enumerate(zip(x.binders, y.binders)):
                ma2[p] = level + i
                mb2[q] = level + i
            if not _alpha(x.body, y.body, ma2, mb2, level + len(x.binders)):
                return False
        return True
    raise TypeError(f"not an expression: {a!r}")


# -- printing -----------------------------------------------------------------

def print_expr(e: Expr) -> str:
    """Render ``e`` in the concrete syntax accepted by the parser."""
    if isinstance(e, Rec):
        return f"rec {e.fname}({e.param}) -> {print_expr(e.body)}"
    if isinstance(e, App):
        parts = []
        while isinstance(e, App):
            parts.append(e.arg)
            e = e.fun
        parts.append(e)
        parts.reverse()
        rendered = [_print_atom(p) for p in parts]
        for i in reversed(range(len(parts) - 1)):
            # a bare nullary constructor followed by "(" would parse as a call
            if (isinstance(parts[i], Ctor) and not parts[i].args
                    and rendered[i + 1].startswith("(")):
                rendered[i] = f"({rendered[i]})"
        return " ".join(rendered)
    return _print_atom(e)


def _print_atom(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Err):
        return "err"
    if isinstance(e, Ctor):
        if not e.args:
            return e.name
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, Match):
        if not e.arms:
            return f"match {print_expr(e.scrutinee)} {{}}"
        arms = " | ".join(_print_arm(a) for a in e.arms)
        return f"match {print_expr(e.scrutinee)} {{ {arms} }}"
    return f"({print_expr(e)})"


def _print_arm(a: Arm) -> str:
    pat = a.ctor if not a.binders else f"{a.ctor}({', '.join(a.binders)})"
    return f"{pat} -> {print_expr(a.body)}"


def print_program(p: Program) -> str:
    lines = [f"ctor {name}/{arity};" for name, arity in p.alphabet.items()]
    lines += [f"let {name} = {print_expr(body)};" for name, body in p.defs]
    if p.main is not None:
        lines.append(print_expr(p.main))
    return "\n".join(lines) + "\n"
