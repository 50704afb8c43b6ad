"""Command-line front end: check, test, gen, refactor and simulate.

Exit codes: 0 success, 1 test failures or behavior differences, 2 usage,
parse or well-formedness errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence, TextIO

from amt.config import Configuration
from amt.evolution import TransformationError, parse_transformations, pipeline, regress
from amt.executor import (
    ExecutionError, InstantiationError, SynthesisError, instantiate, make_event,
    run_script, trace_to_json, with_synthesized,
)
from amt.executor.runtime import TraceEntry, literal_args
from amt.generator import PATH, Bounds, ValuePool, generate
from amt.expr import lit
from amt.model import Model, ModelError, merge
from amt.ocl.values import to_json
from amt.syntax import ParseFailure, parse, parse_messages, print_model
from amt.syntax.printer import format_literal
from amt.testkit import EACH_STEP, FINAL, run_suite
from amt.wellformed import check_wellformed, lint

OK, FAILED, USAGE = 0, 1, 2


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _Exit(USAGE)


def _color(stream: TextIO) -> bool:
    return os.environ.get("AMT_COLOR", "1") != "0" and stream.isatty()


def _paint(text: str, code: str, stream: TextIO = sys.stdout) -> str:
    return f"\033[{code}m{text}\033[0m" if _color(stream) else text


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def load(files: Sequence[str]) -> Model:
    """Parse and merge ``files``; report problems on stderr and exit 2."""
    models = []
    failed = False
    for path in files:
        try:
            with open(path, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            _err(f"{path}: cannot read: {e.strerror}")
            failed = True
            continue
        try:
            models.append(parse(text, path))
        except ParseFailure as e:
            for pe in e.errors:
                _err(_paint(str(pe), "31", sys.stderr))
            failed = True
    if failed:
        raise _Exit(USAGE)
    model = merge(models)
    diags = check_wellformed(model)
    for d in diags:
        _err(_paint(str(d), "31", sys.stderr))
    if diags:
        raise _Exit(USAGE)
    return model


def _warnings(model: Model) -> None:
    for d in lint(model):
        _err(_paint(f"warning: {d}", "33", sys.stderr))


def _synthesized(model: Model) -> Model:
    try:
        return with_synthesized(model)
    except SynthesisError as e:
        for c in e.conflicts:
            _err(f"E_SYNTHESIS {c} (scenarios: {', '.join(c.sds)})")
        raise _Exit(USAGE)


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        _err(f"{path}: cannot write: {e.strerror}")
        raise _Exit(USAGE)


# -- subcommands -------------------------------------------------------------

def cmd_check(args) -> int:
    model = load(args.files)
    _warnings(model)
    return OK


def cmd_test(args) -> int:
    model = _synthesized(load(args.files))
    report = run_suite(model, jobs=args.jobs, check=args.check_invariants)
    for r in report.results:
        label = {"pass": _paint("PASS", "32"), "fail": _paint("FAIL", "31"),
                 "error": _paint("ERROR", "35")}[r.verdict.kind]
        print(f"{label} {r.name}")
        for reason in r.verdict.to_json():
            print("  " + json.dumps(reason, sort_keys=True))
    print(report.summary())
    if args.json:
        _write(args.json, json.dumps(report.to_json(), indent=2) + "\n")
    return OK if report.ok else FAILED


def cmd_gen(args) -> int:
    model = _synthesized(load(args.files))
    pool = ValuePool()
    if args.pool:
        try:
            with open(args.pool, encoding="utf-8") as f:
                pool = ValuePool.from_json(f.read())
        except (OSError, ValueError) as e:
            _err(f"{args.pool}: bad value pool: {e}")
            return USAGE
    if args.depth < 1:
        _err("--depth must be at least 1")
        return USAGE
    try:
        gen = generate(model, args.fixture, args.cls, args.coverage, pool,
                       Bounds(args.max_nodes, args.max_depth), args.depth)
    except (ModelError, InstantiationError) as e:
        _err(str(e))
        return USAGE
    out = replace(model, tests=model.tests + tuple(gen.tests))
    _write(args.out, print_model(out))
    print(json.dumps(gen.report.to_json(), indent=2))
    return OK


def cmd_refactor(args) -> int:
    model = load(args.files)
    try:
        steps = parse_transformations(args.apply)
    except ValueError as e:
        _err(str(e))
        return USAGE
    try:
        result = pipeline(model, steps)
    except TransformationError as e:
        _err(f"transformation {e.index + 1} ({steps[e.index].spec()}) is not applicable:")
        for v in e.violations:
            _err(f"  {v}")
        return USAGE
    _write(args.out, print_model(result.model))
    if not args.check:
        return OK
    before, after = _synthesized(model), _synthesized(result.model)
    report = regress(before, after, result.renames, jobs=args.jobs)
    for t in report.tests:
        mark = "same" if t.same else _paint("DIFFERENT", "31")
        print(f"{t.name}: {t.verdict_before} -> {t.verdict_after}, "
              f"trace {'equal' if t.trace_equal else 'differs'} ({mark})")
    print(f"preserved: {'true' if report.preserved else 'false'}")
    if args.json:
        _write(args.json, json.dumps(report.to_json(), indent=2) + "\n")
    return OK if report.preserved else FAILED


def _show(e: TraceEntry) -> str:
    if e.kind in ("call", "send", "dropped"):
        args = ", ".join(format_literal(a) for a in literal_args(e.args))
        return f"{e.kind} {e.src} -> {e.dst}.{e.op}({args})"
    if e.kind == "assign":
        return f"assign {e.dst}.{e.attr}: {to_json(e.old)} -> {to_json(e.new)}"
    return f"state_change {e.dst}: {e.from_} -> {e.to}"


def _final(config: Configuration) -> list[str]:
    out = []
    for o in config.objects:
        parts = [f"{k} = {format_literal(lit(v))};" for k, v in o.attrs]
        if o.state is not None:
            parts.append(f"state = {o.state};")
        out.append(f"{o.name} : {o.cls} {{ {' '.join(parts)} }}".replace("{  }", "{ }"))
    return out


def cmd_simulate(args) -> int:
    model = _synthesized(load(args.files))
    try:
        config = instantiate(model, args.fixture)
        msgs = parse_messages(args.events)
        events = [make_event(model, config, m) for m in msgs]
    except (InstantiationError, ModelError) as e:
        _err(str(e))
        return USAGE
    except ParseFailure as e:
        for pe in e.errors:
            _err(f"--events: {pe}")
        return USAGE
    code = OK
    try:
        final, trace = run_script(model, config, events, args.budget)
    except ExecutionError as e:
        final, trace = e.config, e.trace
        _err(f"{type(e).__name__}: {e}")
        code = FAILED
    if args.json:
        print(json.dumps({"trace": trace_to_json(trace),
                          "final": [_obj_json(o) for o in final.objects]}, indent=2))
    else:
        for i, e in enumerate(trace):
            print(f"{i:>4} {_show(e)}")
        print("final:")
        for line in _final(final):
            print(f"  {line}")
    return code


def _obj_json(o) -> dict:
    d = {"name": o.name, "class": o.cls, "attrs": {k: to_json(v) for k, v in o.attrs}}
    if o.state is not None:
        d["state"] = o.state
    return d


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="amt", description="Executable requirements models: "
                "check, test, generate tests, refactor, simulate.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="parse and check well-formedness")
    c.add_argument("files", nargs="+")
    c.set_defaults(run=cmd_check)

    t = sub.add_parser("test", help="run every test of the model")
    t.add_argument("files", nargs="+")
    t.add_argument("--json", metavar="PATH")
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--check-invariants", choices=(EACH_STEP, FINAL), default=FINAL)
    t.set_defaults(run=cmd_test)

    g = sub.add_parser("gen", help="generate tests for a coverage criterion")
    g.add_argument("files", nargs="+")
    g.add_argument("--class", dest="cls", required=True)
    g.add_argument("--fixture", required=True)
    g.add_argument("--coverage", choices=("state", "transition", PATH), required=True)
    g.add_argument("--depth", type=int, default=3, help="path length k for path coverage")
    g.add_argument("--pool", metavar="PATH", help="JSON object: type name -> values")
    g.add_argument("--out", metavar="PATH", required=True)
    g.add_argument("--max-depth", type=int, default=Bounds().max_depth)
    g.add_argument("--max-nodes", type=int, default=Bounds().max_nodes)
    g.set_defaults(run=cmd_gen)

    r = sub.add_parser("refactor", help="apply transformations")
    r.add_argument("files", nargs="+")
    r.add_argument("--apply", required=True, metavar="SPEC[;SPEC...]")
    r.add_argument("--out", required=True, metavar="PATH")
    r.add_argument("--check", action="store_true", help="run the regression comparison")
    r.add_argument("--json", metavar="PATH")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(run=cmd_refactor)

    s = sub.add_parser("simulate", help="animate the model on an event script")
    s.add_argument("files", nargs="+")
    s.add_argument("--fixture", required=True)
    s.add_argument("--events", required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("--budget", type=int, default=10_000)
    s.set_defaults(run=cmd_simulate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            _err("--jobs must be at least 1")
            return USAGE
        return args.run(args)
    except _Exit as e:
        return e.code
    except SystemExit as e:  # --help
        return int(e.code or 0)


def entry() -> None:
    sys.exit(main())
