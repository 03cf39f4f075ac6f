"""Single-site mutants of the generated reference implementations.

A checker needs evidence that it would notice real bugs.  Each entry here
takes the generated program for one bundled chart and changes exactly one
node of its step function: a named constant at one use site, one comparison
operator, one dropped assignment, or one dropped conditional arm.  The test
suite insists that every mutant is caught, by structural matching or by
co-simulation, with a short reproducing trace.

Sites are addressed by printed text (guard or statement) plus an occurrence
index, so each entry documents itself and breaks loudly if code generation
ever changes shape.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .chart.ast import Binary, COMPARE_OPS, Const, Unary, complement
from .chart.parser import parse_chart
from .corpus import load_chart_text
from .impl.codegen import generate_reference
from .impl.ir import FunctionDef, ImplProgram, SAssign, SCall, SIf
from .impl.printer import print_impl_expr, print_stmts


@dataclass(frozen=True)
class Mutant:
    name: str  # chart:slug
    chart: str
    kind: str  # const-swap | guard-flip | drop-assign | drop-arm
    site: str  # what changed, in printed form
    program: ImplProgram


class SiteNotFound(Exception):
    pass


def _map_expr(e, fn):
    match e:
        case Unary(op, x):
            return fn(Unary(op, _map_expr(x, fn)))
        case Binary(op, l, r):
            return fn(Binary(op, _map_expr(l, fn), _map_expr(r, fn)))
        case _:
            return fn(e)


def _map_body_exprs(body, fn):
    out = []
    for st in body:
        match st:
            case SAssign(lhs, rhs):
                out.append(SAssign(lhs, _map_expr(rhs, fn)))
            case SCall(f, args):
                out.append(SCall(f, tuple(_map_expr(a, fn) for a in args)))
            case SIf(arms):
                out.append(
                    SIf(
                        tuple(
                            (g if g is None else _map_expr(g, fn), _map_body_exprs(b, fn))
                            for g, b in arms
                        )
                    )
                )
    return tuple(out)


def _swap_const(old: str, new: str, occ: int = 0):
    def build(body):
        left = [occ]
        hit = [False]

        def fn(e):
            if isinstance(e, Const) and e.name == old and not hit[0]:
                if left[0] == 0:
                    hit[0] = True
                    return Const(new)
                left[0] -= 1
            return e

        body2 = _map_body_exprs(body, fn)
        if not hit[0]:
            raise SiteNotFound(f"no use {occ} of constant {old}")
        return body2, f"use {occ} of {old} replaced by {new}"

    return build


def _flip_guard(text: str, occ: int = 0):
    def build(body):
        left = [occ]
        hit = [False]

        def walk(stmts):
            res = []
            for st in stmts:
                if isinstance(st, SIf):
                    arms = []
                    for g, b in st.arms:
                        if (
                            g is not None
                            and isinstance(g, Binary)
                            and g.op in COMPARE_OPS
                            and not hit[0]
                            and print_impl_expr(g) == text
                        ):
                            if left[0] == 0:
                                hit[0] = True
                                g = complement(g)
                            else:
                                left[0] -= 1
                        arms.append((g, walk(b)))
                    res.append(SIf(tuple(arms)))
                else:
                    res.append(st)
            return tuple(res)

        body2 = walk(body)
        if not hit[0]:
            raise SiteNotFound(f"no guard {text!r} (occurrence {occ})")
        return body2, f"guard {text} flipped to its complement"

    return build


def _drop_assign(text: str, occ: int = 0):
    def build(body):
        left = [occ]
        hit = [False]

        def walk(stmts):
            res = []
            for st in stmts:
                if (
                    isinstance(st, SAssign)
                    and not hit[0]
                    and print_stmts((st,), "")[0] == text
                ):
                    if left[0] == 0:
                        hit[0] = True
                        continue
                    left[0] -= 1
                if isinstance(st, SIf):
                    st = SIf(tuple((g, walk(b)) for g, b in st.arms))
                res.append(st)
            return tuple(res)

        body2 = walk(body)
        if not hit[0]:
            raise SiteNotFound(f"no assignment {text!r} (occurrence {occ})")
        return body2, f"dropped {text}"

    return build


def _drop_arm(guard_text: str, occ: int = 0):
    def build(body):
        left = [occ]
        hit = [False]

        def walk(stmts):
            res = []
            for st in stmts:
                if isinstance(st, SIf):
                    arms = []
                    for g, b in st.arms:
                        gt = "else" if g is None else print_impl_expr(g)
                        if not hit[0] and gt == guard_text:
                            if left[0] == 0:
                                hit[0] = True
                                continue
                            left[0] -= 1
                        arms.append((g, walk(b)))
                    if arms:  # an if left with no arms is dropped whole
                        res.append(SIf(tuple(arms)))
                else:
                    res.append(st)
            return tuple(res)

        body2 = walk(body)
        if not hit[0]:
            raise SiteNotFound(f"no arm guarded by {guard_text!r} (occurrence {occ})")
        return body2, f"dropped the arm guarded by {guard_text}"

    return build


# (chart, slug, kind, site builder).  Every site is in the step function.
_SITES = (
    ("absolute_value", "activate-negative", "const-swap",
     _swap_const("AbsoluteValue_IN_P", "AbsoluteValue_IN_N")),
    ("absolute_value", "activity-test", "guard-flip",
     _flip_guard("DWork.is_active_c1 == 0")),
    ("absolute_value", "classify-sign", "guard-flip",
     _flip_guard("U.u >= 0")),
    ("absolute_value", "stale-negate", "drop-assign",
     _drop_assign("B.y := -U.u;")),
    ("absolute_value", "no-fall-to-n", "drop-arm",
     _drop_arm("U.u < 0")),

    ("counters", "a-gate", "guard-flip",
     _flip_guard("DWork.is_active_A != 0")),
    ("counters", "decrement-anytime", "guard-flip",
     _flip_guard("tid == 2")),
    ("counters", "ignore-delta", "drop-assign",
     _drop_assign("B.total := B.total + U.delta;")),
    ("counters", "never-activate", "drop-arm",
     _drop_arm("DWork.is_active_c1 == 0")),

    ("gearbox", "enter-drive-high", "const-swap",
     _swap_const("Gearbox_IN_Low", "Gearbox_IN_High", occ=2)),
    ("gearbox", "drive-exit", "guard-flip",
     _flip_guard("U.speed <= 0")),
    ("gearbox", "lost-shift-count", "drop-assign",
     _drop_assign("B.shifts := B.shifts + 1;")),
    ("gearbox", "ignore-reset", "drop-arm",
     _drop_arm("U.reset != 0")),

    ("heater", "activate-on", "const-swap",
     _swap_const("Heater_IN_Off", "Heater_IN_On")),
    ("heater", "power-gate", "guard-flip",
     _flip_guard("U.power == 0")),
    ("heater", "forget-history", "drop-assign",
     _drop_assign("DWork.was_On := Heater_IN_High;")),
    ("heater", "no-during", "drop-arm",
     _drop_arm("else")),

    ("alarm", "never-quiet", "const-swap",
     _swap_const("Alarm_IN_Quiet", "Alarm_IN_Loud", occ=1)),
    ("alarm", "arm-to-done", "const-swap",
     _swap_const("Alarm_IN_Active", "Alarm_IN_Done", occ=2)),
    ("alarm", "arm-gate", "guard-flip",
     _flip_guard("U.arm != 0")),
    ("alarm", "drop-active-tick", "drop-assign",
     _drop_assign("B.x := B.x + 2;")),
    ("alarm", "deaf-monitor", "drop-arm",
     _drop_arm("tid == 1")),
)


def _with_step(p: ImplProgram, body: tuple) -> ImplProgram:
    fn = p.functions[p.output_name]
    fns = dict(p.functions)
    fns[p.output_name] = FunctionDef(fn.name, fn.params, tuple(body))
    return replace(p, functions=fns)


def all_mutants() -> tuple[Mutant, ...]:
    out = []
    progs: dict[str, ImplProgram] = {}
    for chart, slug, kind, build in _SITES:
        p = progs.get(chart)
        if p is None:
            p = progs[chart] = generate_reference(parse_chart(load_chart_text(chart)))
        body, site = build(p.functions[p.output_name].body)
        out.append(Mutant(f"{chart}:{slug}", chart, kind, site, _with_step(p, body)))
    return tuple(out)


def mutants_for(chart: str) -> tuple[Mutant, ...]:
    return tuple(m for m in all_mutants() if m.chart == chart)
