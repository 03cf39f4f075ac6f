"""Frontend for the IR text format (.sfi files)."""

from __future__ import annotations

from .._lex import TokenStream, tokenize
from ..chart.ast import Binary, Const, Field, FloatLit, IntLit, Unary, Var
from ..diagnostics import Diagnostic, SourceError
from .ir import (
    FLOAT,
    INT,
    UINT8,
    FieldDecl,
    FunctionDef,
    ImplProgram,
    RecordDecl,
    SAssign,
    SCall,
    SIf,
    check_program,
)

PUNCTS = (
    "{", "}", "(", ")", ";", ":", ",", ":=", "=", ".",
    "+", "-", "*", "<", "<=", ">", ">=", "==", "!=",
)

KEYWORDS = {"program", "init", "step", "record", "const", "function", "if", "else", "and", "or"}
_SORTS = {"uint8": UINT8, "int": INT, "float": FLOAT}


class _Ctx:
    def __init__(self) -> None:
        self.constants: dict[str, int] = {}
        self.params: tuple[str, ...] = ()


def _parse_expr(ts: TokenStream, cx: _Ctx):
    return _parse_or(ts, cx)


def _parse_or(ts, cx):
    e = _parse_and(ts, cx)
    while ts.at("or"):
        ts.next()
        e = Binary("or", e, _parse_and(ts, cx))
    return e


def _parse_and(ts, cx):
    e = _parse_cmp(ts, cx)
    while ts.at("and"):
        ts.next()
        e = Binary("and", e, _parse_cmp(ts, cx))
    return e


def _parse_cmp(ts, cx):
    e = _parse_add(ts, cx)
    for op in ("<=", ">=", "==", "!=", "<", ">"):
        if ts.at(op):
            ts.next()
            return Binary(op, e, _parse_add(ts, cx))
    return e


def _parse_add(ts, cx):
    e = _parse_mul(ts, cx)
    while ts.at("+") or ts.at("-"):
        op = ts.next().text
        e = Binary(op, e, _parse_mul(ts, cx))
    return e


def _parse_mul(ts, cx):
    e = _parse_unary(ts, cx)
    while ts.at("*"):
        ts.next()
        e = Binary("*", e, _parse_unary(ts, cx))
    return e


def _parse_unary(ts, cx):
    if ts.at("-"):
        ts.next()
        return Unary("-", _parse_unary(ts, cx))
    return _parse_atom(ts, cx)


def _parse_atom(ts, cx):
    t = ts.peek()
    if t.kind == "num":
        ts.next()
        if "." in t.text or "e" in t.text or "E" in t.text:
            return FloatLit(float(t.text))
        return IntLit(int(t.text))
    if t.kind == "ident" and t.text not in KEYWORDS:
        ts.next()
        if ts.eat("."):
            fname = ts.expect_ident("field name")
            return Field(t.text, fname.text)
        if t.text in cx.params:
            return Var(t.text)
        return Const(t.text)
    if ts.eat("("):
        e = _parse_expr(ts, cx)
        ts.expect(")")
        return e
    raise SourceError.at(f"expected expression, found {t.text!r}", t.line, t.col)


def _parse_block(ts: TokenStream, cx: _Ctx) -> tuple:
    ts.expect("{")
    body = []
    while not ts.eat("}"):
        body.append(_parse_stmt(ts, cx))
    return tuple(body)


def _parse_stmt(ts: TokenStream, cx: _Ctx):
    t = ts.peek()
    if ts.eat("if"):
        arms = []
        ts.expect("(")
        guard = _parse_expr(ts, cx)
        ts.expect(")")
        arms.append((guard, _parse_block(ts, cx)))
        while ts.at("else"):
            ts.next()
            if ts.eat("if"):
                ts.expect("(")
                g = _parse_expr(ts, cx)
                ts.expect(")")
                arms.append((g, _parse_block(ts, cx)))
            else:
                arms.append((None, _parse_block(ts, cx)))
                break
        return SIf(tuple(arms))
    if t.kind == "ident" and t.text not in KEYWORDS:
        name = ts.next()
        if ts.eat("."):
            fname = ts.expect_ident("field name")
            ts.expect(":=")
            value = _parse_expr(ts, cx)
            ts.expect(";")
            return SAssign(Field(name.text, fname.text), value)
        ts.expect("(")
        args = []
        if not ts.eat(")"):
            while True:
                args.append(_parse_expr(ts, cx))
                if not ts.eat(","):
                    break
            ts.expect(")")
        ts.expect(";")
        return SCall(name.text, tuple(args))
    raise SourceError.at(f"expected statement, found {t.text!r}", t.line, t.col)


def _parse_record(ts: TokenStream) -> RecordDecl:
    name = ts.expect_ident("record name")
    ts.expect("{")
    fields = []
    while not ts.eat("}"):
        fname = ts.expect_ident("field name")
        ts.expect(":")
        st = ts.expect_ident("sort")
        if st.text not in _SORTS:
            raise SourceError.at(f"unknown sort {st.text!r}", st.line, st.col)
        ts.expect(";")
        fields.append(FieldDecl(fname.text, _SORTS[st.text]))
    return RecordDecl(name.text, tuple(fields))


def try_parse_impl(text: str) -> tuple[ImplProgram | None, list[Diagnostic]]:
    cx = _Ctx()
    records: dict[str, RecordDecl] = {}
    functions: dict[str, FunctionDef] = {}
    name = None
    init_name = "initialize"
    output_name = ""
    try:
        ts = TokenStream(tokenize(text, PUNCTS))
        ts.expect("program")
        name = ts.expect_ident("program name").text
        ts.expect(";")
        while ts.peek().kind != "eof":
            if ts.eat("init"):
                init_name = ts.expect_ident("function name").text
                ts.expect(";")
            elif ts.eat("step"):
                output_name = ts.expect_ident("function name").text
                ts.expect(";")
            elif ts.eat("record"):
                r = _parse_record(ts)
                records[r.name] = r
            elif ts.eat("const"):
                cn = ts.expect_ident("constant name")
                ts.expect("=")
                val = ts.peek()
                if val.kind != "num" or "." in val.text:
                    raise SourceError.at("constant must be an integer", val.line, val.col)
                ts.next()
                ts.expect(";")
                cx.constants[cn.text] = int(val.text)
            elif ts.eat("function"):
                fname = ts.expect_ident("function name")
                ts.expect("(")
                params = []
                if not ts.eat(")"):
                    while True:
                        params.append(ts.expect_ident("parameter").text)
                        if not ts.eat(","):
                            break
                    ts.expect(")")
                cx.params = tuple(params)
                body = _parse_block(ts, cx)
                cx.params = ()
                functions[fname.text] = FunctionDef(fname.text, tuple(params), body)
            else:
                t = ts.peek()
                raise SourceError.at(f"unexpected {t.text!r} at top level", t.line, t.col)
    except SourceError as e:
        return None, e.diagnostics

    diags = []
    for rec in ("DWork", "B", "U", "Y"):
        if rec not in records:
            records[rec] = RecordDecl(rec, ())
    p = ImplProgram(
        name=name,
        dwork=records["DWork"],
        blocks=records["B"],
        inputs=records["U"],
        outputs=records["Y"],
        constants=cx.constants,
        functions=functions,
        init_name=init_name,
        output_name=output_name,
    )
    diags += [Diagnostic(m) for m in check_program(p)]
    if diags:
        return None, diags
    return p, []


def parse_impl(text: str) -> ImplProgram:
    p, diags = try_parse_impl(text)
    if p is None:
        raise SourceError(diags)
    return p
