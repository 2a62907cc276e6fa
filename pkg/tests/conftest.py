from pathlib import Path

import pytest

from crashlens.types import (
    And, CCApp, CtorT, Fun, HasCtor, HasNoCtor, Or, Proj, SelfVar, TApp, TVar, Union,
)

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"

LEN_SRC = "rec len(x) -> match x { Nil -> Zero | Cons(h, t) -> Succ(len t) }"


def c_len(alpha, self_var=SelfVar("X")):
    """Crash condition of the length function, written out by hand."""
    tail = Proj(alpha, "Cons", 2)
    return And(HasNoCtor("Nil", alpha),
               Or(And(HasCtor("Cons", alpha), CCApp(self_var, tail)),
                  HasNoCtor("Cons", alpha)))


def tau_len() -> Fun:
    """``[a]Zero | Succ(X<a.Cons.2>) & c_len(a)``, the reference length type."""
    a = TVar("a")
    ret = Union(CtorT("Zero"), CtorT("Succ", (TApp(SelfVar("X"), Proj(a, "Cons", 2)),)))
    return Fun("a", "X", ret, c_len(a))


def list_type(n: int):
    """Type of a nil-terminated list of ``n`` integers."""
    from crashlens.types import INT
    t = CtorT("Nil")
    for _ in range(n):
        t = CtorT("Cons", (INT, t))
    return t


@pytest.fixture
def len_type():
    return tau_len()
