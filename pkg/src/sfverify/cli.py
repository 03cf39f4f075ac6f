"""Command-line front end.

    sfverify validate chart.sfc ...
    sfverify simulate chart.sfc [--input trace.sfi | --steps N] [--seed S]
    sfverify generate chart.sfc [-o FILE] [--emit ir|c]
    sfverify retrieve chart.sfc [impl] [--format text|json]
    sfverify verify chart.sfc impl [--traces N] [--match exact] ...

Exit codes: 0 success (verify: PASS), 1 failure (verify: FAIL, chart or
trace problems, a step error mid-run), 2 unreadable or unwritable files,
3 the candidate does not fit the architectural pattern (NONCONFORMANT).

Candidate programs are read by file extension: `.c` goes through the
restricted C reader, anything else is parsed as IR text.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .chart.model import ChartDef
from .chart.parser import try_parse_chart
from .chart.validate import validate_chart
from .diagnostics import Diagnostic, SourceError
from .impl.codegen import generate_reference
from .impl.creader import try_read_c
from .impl.ir import ImplProgram
from .impl.parser import try_parse_impl
from .impl.printer import print_program, render_c
from .refine.cosim import CosimConfig, draw_step, trace_seed
from .refine.pipeline import verify
from .report import (
    RunConfig,
    json_line,
    retrieve_document,
    retrieve_text,
    step_record,
    to_json,
    verdict_text,
    verify_document,
)
from .retrieve import ConformanceError, check_functional_total_surjective, synthesize
from .sim.interp import ChartInterp, StepError
from .sim.traces import parse_trace

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2
EXIT_NONCONFORMANT = 3


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise _Exit(EXIT_IO, f"cannot read {path}: {e.strerror or e}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise _Exit(EXIT_IO, f"cannot write {path}: {e.strerror or e}") from None


def _print_diags(path: str, diags: list[Diagnostic], file=sys.stderr) -> None:
    for d in diags:
        if d.line:
            print(f"{path}:{d.render()}", file=file)
        else:
            print(f"{path}: {d.render()}", file=file)


def _load_chart(path: str) -> ChartDef:
    c, diags = try_parse_chart(_read(path))
    if c is not None:
        diags = list(diags) + validate_chart(c)
    if diags or c is None:
        _print_diags(path, diags)
        raise _Exit(EXIT_FAIL)
    return c


def _load_impl(path: str) -> tuple[ImplProgram, tuple[str, ...]]:
    """Read a candidate program; returns (program, reader notes)."""
    text = _read(path)
    if path.endswith(".c"):
        res = try_read_c(text)
        if not res.ok:
            _print_diags(path, res.diagnostics)
            raise _Exit(EXIT_NONCONFORMANT)
        return res.program, tuple(res.notes)
    p, diags = try_parse_impl(text)
    if p is None or diags:
        _print_diags(path, diags)
        raise _Exit(EXIT_FAIL)
    return p, ()


def cmd_validate(args) -> int:
    worst = EXIT_OK
    for path in args.charts:
        c, diags = try_parse_chart(_read(path))
        if c is not None:
            diags = list(diags) + validate_chart(c)
        if diags:
            _print_diags(path, diags, file=sys.stdout)
            worst = EXIT_FAIL
        else:
            print(f"{path}: ok")
    return worst


def cmd_simulate(args) -> int:
    c = _load_chart(args.chart)
    if args.input:
        try:
            steps = parse_trace(_read(args.input))
        except SourceError as e:
            _print_diags(args.input, e.diagnostics)
            return EXIT_FAIL
    else:
        cfg = CosimConfig(seed=args.seed, domain=tuple(args.domain))
        rng = random.Random(trace_seed(args.seed, 0))
        steps = [draw_step(c, rng, cfg) for _ in range(args.steps)]

    interp = ChartInterp(c, broadcast_depth_limit=args.depth)
    state = interp.init_state()
    for i, inp in enumerate(steps):
        try:
            res = interp.step(state, inp)
        except StepError as e:
            print(f"{args.chart}: step {i}: {e}", file=sys.stderr)
            return EXIT_FAIL
        state = res.state
        print(json_line(step_record(i, inp, res)))
    return EXIT_OK


def cmd_generate(args) -> int:
    c = _load_chart(args.chart)
    p = generate_reference(c)
    text = render_c(p) if args.emit == "c" else print_program(p)
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_retrieve(args) -> int:
    c = _load_chart(args.chart)
    if args.impl:
        p, _notes = _load_impl(args.impl)
        paths = (args.chart, args.impl)
    else:
        p = generate_reference(c)
        paths = (args.chart,)
    cfg = RunConfig(command="retrieve", paths=paths, report_format=args.format)
    try:
        r = synthesize(c, p)
    except ConformanceError as e:
        print(f"NONCONFORMANT: {e}", file=sys.stderr)
        return EXIT_NONCONFORMANT
    check = check_functional_total_surjective(r, c, p)
    if args.format == "json":
        sys.stdout.write(to_json(retrieve_document(cfg, r, check)))
    else:
        sys.stdout.write(retrieve_text(r, check))
    return EXIT_OK if check.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    c = _load_chart(args.chart)
    p, notes = _load_impl(args.impl)
    cfg = RunConfig(
        command="verify",
        paths=(args.chart, args.impl),
        seed=args.seed,
        trace_count=args.traces,
        trace_len_max=args.max_steps,
        data_domain=tuple(args.domain),
        broadcast_depth_limit=args.depth,
        match_mode=args.match,
        report_format=args.format,
    )
    v = verify(c, p, cfg.cosim(args.workers), mode=args.match, depth=args.depth)
    if args.format == "json":
        doc = verify_document(cfg, v)
        if notes:
            doc["reader_notes"] = list(notes)
        sys.stdout.write(to_json(doc))
    else:
        sys.stdout.write(verdict_text(v))
        for n in notes:
            print(f"reader note: {n}")
    if v.outcome == "PASS":
        return EXIT_OK
    if v.outcome == "FAIL":
        return EXIT_FAIL
    return EXIT_NONCONFORMANT


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sfverify",
        description="Translation validation for hierarchical state-machine charts.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse charts and report structural problems")
    v.add_argument("charts", nargs="+", metavar="CHART")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="run a chart, one JSON record per step")
    s.add_argument("chart", metavar="CHART")
    s.add_argument("--input", metavar="TRACE", help="step inputs, one line per step (default: random steps)")
    s.add_argument("--steps", type=int, default=10, metavar="N", help="number of random steps (default 10)")
    s.add_argument("--seed", type=int, default=0, metavar="S")
    s.add_argument("--domain", type=int, nargs=2, default=(-10, 10), metavar=("LO", "HI"))
    s.add_argument("--depth", type=int, default=64, metavar="D", help="local event broadcast depth limit")
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("generate", help="emit the reference implementation of a chart")
    g.add_argument("chart", metavar="CHART")
    g.add_argument("-o", "--output", metavar="FILE")
    g.add_argument("--emit", choices=("ir", "c"), default="ir", help="output form (default ir)")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("retrieve", help="synthesize the state mapping and check it")
    r.add_argument("chart", metavar="CHART")
    r.add_argument("impl", nargs="?", metavar="IMPL", help="candidate program (default: the generated reference)")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.set_defaults(func=cmd_retrieve)

    w = sub.add_parser("verify", help="match a candidate against a chart and co-simulate")
    w.add_argument("chart", metavar="CHART")
    w.add_argument("impl", metavar="IMPL")
    w.add_argument("--seed", type=int, default=0, metavar="S")
    w.add_argument("--traces", type=int, default=100, metavar="N")
    w.add_argument("--max-steps", type=int, default=20, metavar="N")
    w.add_argument("--domain", type=int, nargs=2, default=(-10, 10), metavar=("LO", "HI"))
    w.add_argument("--depth", type=int, default=64, metavar="D", help="broadcast and inlining depth limit")
    w.add_argument("--match", choices=("normalized", "exact"), default="normalized")
    w.add_argument("--format", choices=("text", "json"), default="text")
    w.add_argument("--workers", type=int, default=1, metavar="K", help="co-simulation processes (never changes the report)")
    w.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as e:
        if e.message:
            print(e.message, file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
