"""Renderers for ImplProgram: IR text (.sfi), C, and JSON."""

from __future__ import annotations

import json

from ..chart.ast import Binary, Const, Field, FloatLit, IntLit, StructIdent, StructLookup, Unary, Var
from .ir import FLOAT, INT, UINT8, FunctionDef, ImplProgram, RecordDecl, SAssign, SCall, SIf

_PREC = {"or": 1, "and": 2, "<": 3, "<=": 3, ">": 3, ">=": 3, "==": 3, "!=": 3, "+": 4, "-": 4, "*": 5}


def print_impl_expr(e, parent_prec: int = 0) -> str:
    match e:
        case IntLit(v):
            return str(v)
        case FloatLit(v):
            return repr(v)
        case Var(name):
            return name
        case Field(rec, fname):
            return f"{rec}.{fname}"
        case Const(cname):
            return cname
        case StructIdent(ident):
            return f"${ident}"
        case StructLookup(ident, attr):
            return f"states(${ident}).{attr}"
        case Unary(op, operand):
            inner = print_impl_expr(operand, 6)
            s = f"{op}{inner}"
            return f"({s})" if parent_prec > 6 else s
        case Binary(op, left, right):
            p = _PREC[op]
            s = f"{print_impl_expr(left, p)} {op} {print_impl_expr(right, p + 1)}"
            return f"({s})" if p < parent_prec else s
    raise TypeError(f"not an impl expression: {e!r}")


def print_stmts(body: tuple, indent: str) -> list[str]:
    out: list[str] = []
    for st in body:
        if isinstance(st, SAssign):
            out.append(f"{indent}{print_impl_expr(st.lhs)} := {print_impl_expr(st.rhs)};")
        elif isinstance(st, SCall):
            args = ", ".join(print_impl_expr(a) for a in st.args)
            out.append(f"{indent}{st.func}({args});")
        elif isinstance(st, SIf):
            for i, (g, arm) in enumerate(st.arms):
                if g is None:
                    head = f"{indent}}} else {{"
                elif i == 0:
                    head = f"{indent}if ({print_impl_expr(g)}) {{"
                else:
                    head = f"{indent}}} else if ({print_impl_expr(g)}) {{"
                out.append(head)
                out += print_stmts(arm, indent + "  ")
            out.append(f"{indent}}}")
        else:
            raise TypeError(f"not a statement: {st!r}")
    return out


def _print_record(r: RecordDecl) -> list[str]:
    if not r.fields:
        return [f"record {r.name} {{ }}"]
    lines = [f"record {r.name} {{"]
    for f in r.fields:
        lines.append(f"  {f.name}: {f.sort};")
    lines.append("}")
    return lines


def print_program(p: ImplProgram) -> str:
    lines = [f"program {p.name};"]
    if p.init_name:
        lines.append(f"init {p.init_name};")
    if p.output_name:
        lines.append(f"step {p.output_name};")
    lines.append("")
    for rec in (p.dwork, p.blocks, p.inputs, p.outputs):
        lines += _print_record(rec)
    if p.constants:
        lines.append("")
        for name, val in p.constants.items():
            lines.append(f"const {name} = {val};")
    for fn in p.functions.values():
        lines.append("")
        params = ", ".join(fn.params)
        lines.append(f"function {fn.name}({params}) {{")
        lines += print_stmts(fn.body, "  ")
        lines.append("}")
    return "\n".join(lines) + "\n"


# -- C rendering ------------------------------------------------------------

_C_SORTS = {UINT8: "unsigned char", INT: "long long", FLOAT: "double"}


def _c_record(p: ImplProgram, r: RecordDecl, tag: str) -> list[str]:
    lines = [f"typedef struct {{"]
    for f in r.fields:
        lines.append(f"  {_C_SORTS[f.sort]} {f.name};")
    if not r.fields:
        lines.append("  unsigned char _unused;")
    lines.append(f"}} {tag}_{p.name};")
    lines.append("")
    lines.append(f"static {tag}_{p.name} {p.name}_{tag};")
    return lines


def _c_expr(p: ImplProgram, e, parent_prec: int = 0) -> str:
    match e:
        case IntLit(v):
            return str(v)
        case FloatLit(v):
            return repr(v)
        case Field(rec, fname):
            return f"{p.name}_{rec}.{fname}"
        case Const(cname):
            return cname
        case Var(name):
            return name
        case Unary(op, operand):
            inner = _c_expr(p, operand, 6)
            s = f"{op}{inner}"
            return f"({s})" if parent_prec > 6 else s
        case Binary(op, left, right):
            cop = {"and": "&&", "or": "||"}.get(op, op)
            prec = _PREC[op]
            s = f"{_c_expr(p, left, prec)} {cop} {_c_expr(p, right, prec + 1)}"
            return f"({s})" if prec < parent_prec else s
    raise TypeError(f"cannot render {e!r} as C")


def _c_stmts(p: ImplProgram, body: tuple, indent: str) -> list[str]:
    out: list[str] = []
    for st in body:
        if isinstance(st, SAssign):
            out.append(f"{indent}{_c_expr(p, st.lhs)} = {_c_expr(p, st.rhs)};")
        elif isinstance(st, SCall):
            args = ", ".join(_c_expr(p, a) for a in st.args)
            out.append(f"{indent}{st.func}({args});")
        elif isinstance(st, SIf):
            for i, (g, arm) in enumerate(st.arms):
                if g is None:
                    out.append(f"{indent}}} else {{")
                elif i == 0:
                    out.append(f"{indent}if ({_c_expr(p, g)}) {{")
                else:
                    out.append(f"{indent}}} else if ({_c_expr(p, g)}) {{")
                out += _c_stmts(p, arm, indent + "  ")
            out.append(f"{indent}}}")
    return out


def render_c(p: ImplProgram) -> str:
    lines = [f"/* Step functions for chart {p.name}. */", ""]
    for rec, tag in ((p.dwork, "DWork"), (p.blocks, "B"), (p.inputs, "U"), (p.outputs, "Y")):
        lines += _c_record(p, rec, tag)
        lines.append("")
    for name, val in p.constants.items():
        lines.append(f"#define {name} {val}")
    if p.constants:
        lines.append("")
    for fn in p.functions.values():
        params = ", ".join(f"int {a}" for a in fn.params) or "void"
        lines.append(f"void {fn.name}({params})")
        lines.append("{")
        lines += _c_stmts(p, fn.body, "  ")
        lines.append("}")
        lines.append("")
    return "\n".join(lines)


# -- JSON dump ---------------------------------------------------------------

def _expr_json(e):
    match e:
        case IntLit(v):
            return {"int": v}
        case FloatLit(v):
            return {"float": v}
        case Field(rec, fname):
            return {"field": f"{rec}.{fname}"}
        case Const(cname):
            return {"const": cname}
        case Var(name):
            return {"var": name}
        case StructIdent(ident):
            return {"struct": ident}
        case StructLookup(ident, attr):
            return {"lookup": ident, "attr": attr}
        case Unary(op, operand):
            return {"op": op, "args": [_expr_json(operand)]}
        case Binary(op, left, right):
            return {"op": op, "args": [_expr_json(left), _expr_json(right)]}
    raise TypeError(repr(e))


def _stmt_json(st):
    if isinstance(st, SAssign):
        return {"assign": _expr_json(st.lhs), "value": _expr_json(st.rhs)}
    if isinstance(st, SCall):
        return {"call": st.func, "args": [_expr_json(a) for a in st.args]}
    if isinstance(st, SIf):
        return {
            "if": [
                {"guard": None if g is None else _expr_json(g), "body": [_stmt_json(s) for s in arm]}
                for g, arm in st.arms
            ]
        }
    raise TypeError(repr(st))


def program_to_json(p: ImplProgram) -> str:
    doc = {
        "name": p.name,
        "records": {
            r.name: [{"name": f.name, "sort": f.sort} for f in r.fields]
            for r in (p.dwork, p.blocks, p.inputs, p.outputs)
        },
        "constants": dict(p.constants),
        "init": p.init_name,
        "step": p.output_name,
        "functions": {
            fn.name: {"params": list(fn.params), "body": [_stmt_json(s) for s in fn.body]}
            for fn in p.functions.values()
        },
    }
    return json.dumps(doc, indent=2)
