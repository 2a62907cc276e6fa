"""Command-line interface: ``crashlens analyze|eval|check|fuzz``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from .inference import infer
from .parser import ParseError, parse_program
from .semantics import DEFAULT_FUEL, Error, FuelExhausted, evaluate
from .solver import (
    Verdict, VerdictKind, decide, default_k, eval_cc, find_crashing_inputs,
    program_alphabet, verdict_of,
)
from .syntax import Program, print_expr
from .testkit import PROPERTIES, GenConfig, run_property
from .types import Fun, render, simplify_cc

EXIT_OK = 0
EXIT_DEFINITE = 1
EXIT_PARSE = 2
EXIT_RUNTIME_ERROR = 3
EXIT_FUEL = 4
EXIT_PROPERTY = 5


@dataclass
class CliConfig:
    command: str
    paths: list[str] = field(default_factory=list)
    k: int = 5
    fuel: int = DEFAULT_FUEL
    json: bool = False
    witness_depth: int = 3
    cases: int = 1000
    seed: int = 0
    properties: list[str] = field(default_factory=list)
    out_dir: str = "fuzz-failures"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.fuel < 1:
            raise ValueError("fuel must be at least 1")


@dataclass(frozen=True)
class Record:
    """One analyzed definition, serialized with the stable JSON schema."""

    name: str
    type: str
    crash_condition: str
    verdict: VerdictKind
    k: int
    witnesses: tuple[str, ...] = ()

    def as_json(self) -> dict:
        return {"def": self.name, "type": self.type, "crash_condition": self.crash_condition,
                "verdict": self.verdict.value, "k": self.k, "witnesses": list(self.witnesses)}


class _Abort(Exception):
    def __init__(self, code: int):
        self.code = code


def _load(path: str, err: TextIO) -> Program:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=err)
        raise _Abort(EXIT_PARSE)
    try:
        return parse_program(text)
    except ParseError as exc:
        print(f"{path}:{exc}", file=err)
        raise _Abort(EXIT_PARSE)


def analyze_program(p: Program, k: int, witness_depth: int) -> list[Record]:
    """Records for every top-level definition, then for ``main`` if present.

    Definitions are analyzed independently, with earlier definitions inlined.
    For a function the reported condition is the one on its argument and
    the witnesses are ground inputs that definitely crash it.
    """
    alphabet = program_alphabet(p)
    items = list(p.resolved().items())
    if p.main is not None:
        items.append(("main", p.resolved_main()))
    out = []
    for name, e in items:
        typing = infer({}, e)
        t = typing.type
        if isinstance(t, Fun):
            crash = t.crash
            witnesses = tuple(render(w) for w in find_crashing_inputs(t, witness_depth, k, alphabet))
        else:
            crash = simplify_cc(typing.crash)
            witnesses = ()
        out.append(Record(name, render(t, guards=False), render(crash, guards=False),
                          verdict_of(eval_cc(crash, k)), k, witnesses))
    return out


def _print_records(path: str, records: list[Record], out: TextIO) -> None:
    print(path, file=out)
    for r in records:
        print(f"  {r.name} : {r.type}", file=out)
        print(f"    crash: {r.crash_condition}", file=out)
        print(f"    verdict: {r.verdict.value} (k={r.k})", file=out)
        if r.witnesses:
            print(f"    witnesses: {', '.join(r.witnesses)}", file=out)


def _emit_json(results: dict[str, list[dict]], out: TextIO) -> None:
    # one file: a list of records; several: an object keyed by path
    doc = next(iter(results.values())) if len(results) == 1 else results
    print(json.dumps(doc, indent=2), file=out)


def cmd_analyze(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    results: dict[str, list[dict]] = {}
    for path in cfg.paths:
        records = analyze_program(_load(path, err), cfg.k, cfg.witness_depth)
        if cfg.json:
            results[path] = [r.as_json() for r in records]
        else:
            _print_records(path, records, out)
    if cfg.json:
        _emit_json(results, out)
    return EXIT_OK


def cmd_check(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    """Exit 1 iff the ``main`` of some file is a definite error.

    Only ``main`` is judged: a crashing definition that is never used does
    not make the program fail.
    """
    code = EXIT_OK
    results: dict[str, list[dict]] = {}
    for path in cfg.paths:
        p = _load(path, err)
        if p.main is None:
            if not cfg.json:
                print(f"{path}: no main expression, nothing to check", file=out)
            results[path] = []
            continue
        v: Verdict = decide(p.resolved_main(), {}, cfg.k)
        crash = simplify_cc(v.crash)
        if v.definite:
            code = EXIT_DEFINITE
        if cfg.json:
            rec = Record("main", render(v.type, guards=False), render(crash, guards=False),
                         v.kind, v.k)
            results[path] = [rec.as_json()]
        elif v.definite:
            print(f"{path}: definite error in main: crash condition holds at k={v.k}", file=out)
            print(f"  {render(crash, guards=False)}", file=out)
        else:
            print(f"{path}: no definite error found ({v.kind.value}, k={v.k})", file=out)
    if cfg.json:
        _emit_json(results, out)
    return code


def cmd_eval(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    if len(cfg.paths) != 1:
        print("eval takes exactly one file", file=err)
        return EXIT_PARSE
    path = cfg.paths[0]
    p = _load(path, err)
    main = p.resolved_main()
    if main is None:
        print(f"{path}: no main expression to evaluate", file=err)
        return EXIT_PARSE
    res = evaluate(main, cfg.fuel)
    if isinstance(res, Error):
        print(f"error after {res.steps} steps", file=out)
        return EXIT_RUNTIME_ERROR
    if isinstance(res, FuelExhausted):
        print(f"fuel exhausted after {res.steps} steps", file=out)
        return EXIT_FUEL
    print(print_expr(res.value), file=out)
    return EXIT_OK


def cmd_fuzz(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    code = EXIT_OK
    for name in cfg.properties or list(PROPERTIES):
        report = run_property(name, cfg.cases, cfg.seed, cfg.fuel, cfg.k, GenConfig(cfg.seed))
        print(report.summary(), file=out)
        if report.failures:
            code = EXIT_PROPERTY
            d = Path(cfg.out_dir)
            d.mkdir(parents=True, exist_ok=True)
            for f in report.failures:
                target = d / f"{name}-seed{f.seed}.lc"
                target.write_text(f.repro())
                print(f"  repro written to {target}", file=out)
    return code


COMMANDS = {"analyze": cmd_analyze, "check": cmd_check, "eval": cmd_eval, "fuzz": cmd_fuzz}


def run(cfg: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return COMMANDS[cfg.command](cfg, out, err)
    except _Abort as exc:
        return exc.code


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crashlens", description="Crash-condition analysis for .lc programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, files: bool = True) -> None:
        if files:
            p.add_argument("paths", nargs="+", metavar="FILE")
        p.add_argument("-k", type=_nonneg, default=None,
                       help="unfolding budget (default: $CRASHLENS_K or 5)")
        p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, help="evaluation step limit")

    p = sub.add_parser("analyze", help="print type, crash condition and verdict per definition")
    common(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--witness-depth", type=_nonneg, default=3)

    p = sub.add_parser("check", help="exit 1 if main is a definite error")
    common(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval", help="evaluate main")
    common(p)

    p = sub.add_parser("fuzz", help="run the property-based checks")
    common(p, files=False)
    p.add_argument("--property", action="append", choices=PROPERTIES, dest="properties")
    p.add_argument("--cases", type=_positive, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="fuzz-failures", help="directory for repro files")
    return ap


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(
        command=ns.command,
        paths=getattr(ns, "paths", []),
        k=default_k() if ns.k is None else ns.k,
        fuel=ns.fuel,
        json=getattr(ns, "json", False),
        witness_depth=getattr(ns, "witness_depth", 3),
        cases=getattr(ns, "cases", 1000),
        seed=getattr(ns, "seed", 0),
        properties=getattr(ns, "properties", None) or [],
        out_dir=getattr(ns, "out", "fuzz-failures"),
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
