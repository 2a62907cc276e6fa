"""Lexer and recursive-descent parser for ``.lc`` source files.

Grammar::

    program  ::= { decl } [ expr [ ";" ] ]
    decl     ::= "ctor" UIDENT "/" INT ";"
               | "let" LIDENT "=" expr ";"
    expr     ::= "rec" LIDENT "(" LIDENT ")" "->" expr
               | atom { atom }                      -- left-assoc application
    atom     ::= INT | LIDENT | "err" | "(" expr ")"
               | UIDENT [ "(" expr { "," expr } ")" ]
               | "match" expr "{" [ arm { "|" arm } ] "}"
    arm      ::= UIDENT [ "(" LIDENT { "," LIDENT } ")" ] "->" expr

``--`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .syntax import (
    ERR, App, Arm, Ctor, Expr, IntLit, Match, Program, Rec, Var, free_vars,
)


class ErrorKind(str, Enum):
    SYNTAX = "Syntax"
    ARITY_MISMATCH = "ArityMismatch"
    DUPLICATE_PATTERN_CTOR = "DuplicatePatternCtor"
    DUPLICATE_DEF = "DuplicateDef"
    UNBOUND_NAME = "UnboundName"


class ParseError(Exception):
    def __init__(self, kind: ErrorKind, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {kind.value}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = {"rec", "match", "err", "let", "ctor"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<int>-?[0-9]+)
  | (?P<arrow>->)
  | (?P<uident>[A-Z][A-Za-z0-9_']*)
  | (?P<lident>[a-z_][A-Za-z0-9_']*)
  | (?P<punct>[(){}|,;=/])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(ErrorKind.SYNTAX, f"unexpected character {text[pos]!r}",
                             line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "lident" and chunk in KEYWORDS:
                kind = chunk
            elif kind == "punct":
                kind = chunk
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: dict[str, int] | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.alphabet: dict[str, int] = dict(alphabet or {})

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, kind: ErrorKind, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(kind, msg, tok.line, tok.col)

    def expect(self, kind: str) -> Token:
        tok = self.tok
        if tok.kind != kind:
            shown = tok.text or "end of input"
            raise self.error(ErrorKind.SYNTAX, f"expected {kind!r}, found {shown!r}")
        self.i += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            self.i += 1
            return self.toks[self.i - 1]
        return None

    def note_arity(self, name: str, arity: int, tok: Token) -> None:
        known = self.alphabet.setdefault(name, arity)
        if known != arity:
            raise self.error(
                ErrorKind.ARITY_MISMATCH,
                f"constructor {name} used with arity {arity}, previously {known}", tok)

    # -- program ------------------------------------------------------------

    def program(self) -> Program:
        prog = Program(alphabet=self.alphabet)
        seen: set[str] = set()
        while self.tok.kind in ("ctor", "let"):
            if self.accept("ctor"):
                name_tok = self.expect("uident")
                self.expect("/")
                arity_tok = self.expect("int")
                arity = int(arity_tok.text)
                if arity < 0:
                    raise self.error(ErrorKind.SYNTAX, "negative arity", arity_tok)
                self.note_arity(name_tok.text, arity, name_tok)
                self.expect(";")
            else:
                self.expect("let")
                name_tok = self.expect("lident")
                if name_tok.text in seen:
                    raise self.error(ErrorKind.DUPLICATE_DEF,
                                     f"duplicate definition {name_tok.text}", name_tok)
                self.expect("=")
                start = self.tok
                body = self.expr()
                self.expect(";")
                self.check_closed(body, seen, start)
                seen.add(name_tok.text)
                prog.defs.append((name_tok.text, body))
        if self.tok.kind != "eof":
            start = self.tok
            prog.main = self.expr()
            self.accept(";")
            self.check_closed(prog.main, seen, start)
        self.expect("eof")
        return prog

    def check_closed(self, e: Expr, known: set[str], tok: Token) -> None:
        unbound = sorted(free_vars(e) - known)
        if unbound:
            raise self.error(ErrorKind.UNBOUND_NAME, f"unbound name {unbound[0]}", tok)

    # -- expressions --------------------------------------------------------

    def expr(self) -> Expr:
        if self.accept("rec"):
            f = self.expect("lident").text
            self.expect("(")
            x = self.expect("lident").text
            self.expect(")")
            self.expect("arrow")
            return Rec(f, x, self.expr())
        e = self.atom()
        while self.starts_atom():
            e = App(e, self.atom())
        return e

    def starts_atom(self) -> bool:
        return self.tok.kind in ("int", "lident", "uident", "err", "(", "match")

    def atom(self) -> Expr:
        tok = self.tok
        if self.accept("int"):
            return IntLit(int(tok.text))
        if self.accept("lident"):
            return Var(tok.text)
        if self.accept("err"):
            return ERR
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("uident"):
            args: list[Expr] = []
            if self.accept("("):
                args.append(self.expr())
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
            self.note_arity(tok.text, len(args), tok)
            return Ctor(tok.text, tuple(args))
        if self.accept("match"):
            scrutinee = self.expr()
            self.expect("{")
            arms: list[tuple[Arm, Token]] = []
            if self.tok.kind != "}":
                arms.append(self.arm())
                while self.accept("|"):
                    arms.append(self.arm())
            self.expect("}")
            seen: set[str] = set()
            for arm, arm_tok in arms:
                if arm.ctor in seen:
                    raise self.error(ErrorKind.DUPLICATE_PATTERN_CTOR,
                                     f"constructor {arm.ctor} matched twice", arm_tok)
                seen.add(arm.ctor)
            return Match(scrutinee, tuple(a for a, _ in arms))
        shown = tok.text or "end of input"
        raise self.error(ErrorKind.SYNTAX, f"unexpected {shown!r}")

    def arm(self) -> tuple[Arm, Token]:
        tok = self.expect("uident")
        binders: list[str] = []
        if self.accept("("):
            binders.append(self.expect("lident").text)
            while self.accept(","):
                binders.append(self.expect("lident").text)
            self.expect(")")
        if len(set(binders)) != len(binders):
            raise self.error(ErrorKind.SYNTAX, "repeated pattern variable", tok)
        self.note_arity(tok.text, len(binders), tok)
        self.expect("arrow")
        return Arm(tok.text, tuple(binders), self.expr()), tok


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_expr(text: str, alphabet: dict[str, int] | None = None) -> Expr:
    """Parse a single expression; free variables are allowed."""
    p = _Parser(text, alphabet)
    e = p.expr()
    p.accept(";")
    p.expect("eof")
    return e
