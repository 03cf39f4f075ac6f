"""Canonical printer for charts; parse(print_chart(c)) == c."""

from __future__ import annotations

from .ast import Assign, Binary, Expr, FloatLit, IntLit, Send, Unary, Var
from .model import ChartDef, StateDef, TransitionDef

_PREC = {"or": 1, "and": 2, "<": 3, "<=": 3, ">": 3, ">=": 3, "==": 3, "!=": 3, "+": 4, "-": 4, "*": 5}


def print_expr(e: Expr, parent_prec: int = 0) -> str:
    match e:
        case IntLit(v):
            return str(v)
        case FloatLit(v):
            return repr(v)
        case Var(name):
            return name
        case Unary(op, operand):
            inner = print_expr(operand, 6)
            s = f"{op}{inner}"
            return f"({s})" if parent_prec > 6 else s
        case Binary(op, left, right):
            p = _PREC[op]
            sep = f" {op} " if op in ("and", "or") else f" {op} "
            s = f"{print_expr(left, p)}{sep}{print_expr(right, p + 1)}"
            return f"({s})" if p < parent_prec else s
    raise TypeError(f"not a chart expression: {e!r}")


def _print_actions(acts, indent: str) -> list[str]:
    out = []
    for a in acts:
        if isinstance(a, Assign):
            out.append(f"{indent}{a.target} := {print_expr(a.value)};")
        elif isinstance(a, Send):
            out.append(f"{indent}send {a.event};")
        else:
            raise TypeError(f"not an action: {a!r}")
    return out


def _print_state(c: ChartDef, s: StateDef, indent: str) -> list[str]:
    attrs = []
    if s.decomposition == "parallel":
        attrs.append("parallel")
    if s.has_history:
        attrs.append("history")
    suffix = f" ({', '.join(attrs)})" if attrs else ""
    body: list[str] = []
    inner = indent + "  "
    if s.entry:
        body.append(f"{inner}entry {{")
        body += _print_actions(s.entry, inner + "  ")
        body.append(f"{inner}}}")
    if s.during:
        body.append(f"{inner}during {{")
        body += _print_actions(s.during, inner + "  ")
        body.append(f"{inner}}}")
    if s.exit:
        body.append(f"{inner}exit {{")
        body += _print_actions(s.exit, inner + "  ")
        body.append(f"{inner}}}")
    for ev, acts in s.on_actions:
        body.append(f"{inner}on {ev} {{")
        body += _print_actions(acts, inner + "  ")
        body.append(f"{inner}}}")
    for j in c.junctions.values():
        if j.parent == s.id:
            body.append(f"{inner}junction {j.id};")
    for child in s.child_order:
        body += _print_state(c, c.states[child], inner)
    if not body:
        return [f"{indent}state {s.id}{suffix};"]
    return [f"{indent}state {s.id}{suffix} {{"] + body + [f"{indent}}}"]


def _print_transition(t: TransitionDef, indent: str) -> list[str]:
    inner = indent + "  "
    out = [f"{indent}transition {t.id} {{"]
    out.append(f"{inner}source {t.source if t.source is not None else 'none'};")
    out.append(f"{inner}target {t.target};")
    if t.trigger is not None:
        out.append(f"{inner}trigger {t.trigger};")
    if t.condition is not None:
        out.append(f"{inner}cond {print_expr(t.condition)};")
    if t.condition_action:
        out.append(f"{inner}condact {{")
        out += _print_actions(t.condition_action, inner + "  ")
        out.append(f"{inner}}}")
    if t.transition_action:
        out.append(f"{inner}act {{")
        out += _print_actions(t.transition_action, inner + "  ")
        out.append(f"{inner}}}")
    out.append(f"{inner}order {t.order};")
    out.append(f"{indent}}}")
    return out


def print_chart(c: ChartDef) -> str:
    lines: list[str] = []
    attr = " (parallel)" if c.root_decomposition == "parallel" else ""
    lines.append(f"chart {c.identifier}{attr} {{")
    for d in c.data:
        lines.append(f"  {d.kind} {d.name}: {d.sort};")
    for e in c.events:
        lines.append(f"  event {e.name}: {e.kind};")
    for j in c.junctions.values():
        if j.parent == c.identifier:
            lines.append(f"  junction {j.id};")
    for sid in c.root_child_order:
        lines += _print_state(c, c.states[sid], "  ")
    for t in c.transitions.values():
        lines += _print_transition(t, "  ")
    lines.append("}")
    return "\n".join(lines) + "\n"
