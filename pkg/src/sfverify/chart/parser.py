"""Frontend for the chart DSL (.sfc files).

Layout is block structured; state nesting gives the parent relation.
Transitions name their endpoints explicitly and may appear at chart level or
inside any state block. See docs/dsl.md for the grammar.
"""

from __future__ import annotations

from .._lex import TokenStream, tokenize
from ..diagnostics import Diagnostic, SourceError
from .ast import Assign, Binary, Expr, FloatLit, IntLit, Send, Unary, Var, expr_vars
from .model import ChartDef, DataDecl, EventDecl, JunctionDef, StateDef, TransitionDef

PUNCTS = (
    "{", "}", "(", ")", ";", ":", ",", ":=",
    "+", "-", "*", "<", "<=", ">", ">=", "==", "!=",
)

KEYWORDS = {
    "chart", "state", "junction", "transition", "event",
    "input", "output", "local", "int", "float",
    "entry", "during", "exit", "on", "send", "bind",
    "source", "target", "trigger", "cond", "condact", "act", "order",
    "none", "parallel", "history", "and", "or",
}


class _Builder:
    def __init__(self) -> None:
        self.states: dict[str, StateDef] = {}
        self.junctions: dict[str, JunctionDef] = {}
        self.transitions: dict[str, TransitionDef] = {}
        self.events: list[EventDecl] = []
        self.data: list[DataDecl] = []
        self.diags: list[Diagnostic] = []
        self.seen_ids: dict[str, str] = {}

    def claim(self, ident: str, what: str, line: int, col: int) -> None:
        if ident in self.seen_ids:
            self.diags.append(
                Diagnostic(f"duplicate identifier {ident!r} ({what} vs {self.seen_ids[ident]})", line, col)
            )
        else:
            self.seen_ids[ident] = what


def _parse_expr(ts: TokenStream) -> Expr:
    return _parse_or(ts)


def _parse_or(ts: TokenStream) -> Expr:
    e = _parse_and(ts)
    while ts.at("or"):
        ts.next()
        e = Binary("or", e, _parse_and(ts))
    return e


def _parse_and(ts: TokenStream) -> Expr:
    e = _parse_cmp(ts)
    while ts.at("and"):
        ts.next()
        e = Binary("and", e, _parse_cmp(ts))
    return e


def _parse_cmp(ts: TokenStream) -> Expr:
    e = _parse_add(ts)
    for op in ("<=", ">=", "==", "!=", "<", ">"):
        if ts.at(op):
            ts.next()
            return Binary(op, e, _parse_add(ts))
    return e


def _parse_add(ts: TokenStream) -> Expr:
    e = _parse_mul(ts)
    while ts.at("+") or ts.at("-"):
        op = ts.next().text
        e = Binary(op, e, _parse_mul(ts))
    return e


def _parse_mul(ts: TokenStream) -> Expr:
    e = _parse_unary(ts)
    while ts.at("*"):
        ts.next()
        e = Binary("*", e, _parse_unary(ts))
    return e


def _parse_unary(ts: TokenStream) -> Expr:
    if ts.at("-"):
        ts.next()
        return Unary("-", _parse_unary(ts))
    return _parse_atom(ts)


def _parse_atom(ts: TokenStream) -> Expr:
    t = ts.peek()
    if t.kind == "num":
        ts.next()
        if "." in t.text or "e" in t.text or "E" in t.text:
            return FloatLit(float(t.text))
        return IntLit(int(t.text))
    if t.kind == "ident" and t.text not in KEYWORDS:
        ts.next()
        return Var(t.text)
    if ts.eat("("):
        e = _parse_expr(ts)
        ts.expect(")")
        return e
    raise SourceError.at(f"expected expression, found {t.text!r}", t.line, t.col)


def _parse_actions(ts: TokenStream, b: _Builder) -> tuple:
    ts.expect("{")
    acts = []
    while not ts.eat("}"):
        t = ts.peek()
        if ts.eat("send"):
            ev = ts.expect_ident("event name")
            ts.expect(";")
            acts.append(Send(ev.text))
        elif t.kind == "ident" and t.text not in KEYWORDS:
            name = ts.next().text
            ts.expect(":=")
            value = _parse_expr(ts)
            ts.expect(";")
            acts.append(Assign(name, value))
        else:
            raise SourceError.at(f"expected action, found {t.text!r}", t.line, t.col)
    return tuple(acts)


def _parse_attrs(ts: TokenStream) -> set[str]:
    attrs: set[str] = set()
    if ts.eat("("):
        while True:
            t = ts.peek()
            if t.text in ("parallel", "history"):
                ts.next()
                attrs.add(t.text)
            else:
                raise SourceError.at(f"unknown attribute {t.text!r}", t.line, t.col)
            if not ts.eat(","):
                break
        ts.expect(")")
    return attrs


def _parse_transition(ts: TokenStream, b: _Builder) -> None:
    t0 = ts.expect_ident("transition name")
    b.claim(t0.text, "transition", t0.line, t0.col)
    ts.expect("{")
    source: str | None = None
    source_set = False
    target: str | None = None
    trigger: str | None = None
    condition: Expr | None = None
    condition_action: tuple = ()
    transition_action: tuple = ()
    order = 1
    while not ts.eat("}"):
        if ts.eat("source"):
            if ts.eat("none"):
                source = None
            else:
                source = ts.expect_ident("source id").text
            source_set = True
            ts.expect(";")
        elif ts.eat("target"):
            target = ts.expect_ident("target id").text
            ts.expect(";")
        elif ts.eat("trigger"):
            trigger = ts.expect_ident("event name").text
            ts.expect(";")
        elif ts.eat("cond"):
            condition = _parse_expr(ts)
            ts.expect(";")
        elif ts.eat("condact"):
            condition_action = _parse_actions(ts, b)
        elif ts.eat("act"):
            transition_action = _parse_actions(ts, b)
        elif ts.eat("order"):
            tnum = ts.peek()
            if tnum.kind != "num" or "." in tnum.text:
                raise SourceError.at("order takes an integer", tnum.line, tnum.col)
            ts.next()
            order = int(tnum.text)
            ts.expect(";")
        else:
            tk = ts.peek()
            raise SourceError.at(f"unexpected {tk.text!r} in transition", tk.line, tk.col)
    if not source_set or target is None:
        b.diags.append(Diagnostic(f"transition {t0.text!r} needs source and target", t0.line, t0.col))
        return
    b.transitions[t0.text] = TransitionDef(
        id=t0.text,
        source=source,
        target=target,
        trigger=trigger,
        condition=condition,
        condition_action=condition_action,
        transition_action=transition_action,
        order=order,
    )


def _parse_state(ts: TokenStream, b: _Builder, parent: str) -> str:
    t0 = ts.expect_ident("state name")
    b.claim(t0.text, "state", t0.line, t0.col)
    attrs = _parse_attrs(ts)
    entry: tuple = ()
    during: tuple = ()
    exit_: tuple = ()
    on_actions: list[tuple[str, tuple]] = []
    children: list[str] = []
    if not ts.eat(";"):
        ts.expect("{")
        while not ts.eat("}"):
            if ts.eat("entry"):
                entry = _parse_actions(ts, b)
            elif ts.eat("during"):
                during = _parse_actions(ts, b)
            elif ts.eat("exit"):
                exit_ = _parse_actions(ts, b)
            elif ts.eat("on"):
                ev = ts.expect_ident("event name")
                on_actions.append((ev.text, _parse_actions(ts, b)))
            elif ts.eat("bind"):
                tb = ts.expect_ident("bound name")
                ts.expect(";")
                b.diags.append(
                    Diagnostic(f"unsupported feature: binding action on {tb.text!r}", tb.line, tb.col)
                )
            elif ts.eat("state"):
                children.append(_parse_state(ts, b, t0.text))
            elif ts.eat("junction"):
                tj = ts.expect_ident("junction name")
                ts.expect(";")
                b.claim(tj.text, "junction", tj.line, tj.col)
                b.junctions[tj.text] = JunctionDef(tj.text, t0.text)
            elif ts.eat("transition"):
                _parse_transition(ts, b)
            else:
                tk = ts.peek()
                raise SourceError.at(f"unexpected {tk.text!r} in state body", tk.line, tk.col)
    b.states[t0.text] = StateDef(
        id=t0.text,
        parent=parent,
        decomposition="parallel" if "parallel" in attrs else "sequential",
        child_order=tuple(children),
        entry=entry,
        during=during,
        exit=exit_,
        on_actions=tuple(on_actions),
        has_history="history" in attrs,
    )
    return t0.text


def _check_references(c: ChartDef, diags: list[Diagnostic]) -> None:
    node_ids = set(c.states) | set(c.junctions)
    declared_vars = {d.name for d in c.data}
    events = {e.name: e.kind for e in c.events}

    def check_actions(acts, where: str) -> None:
        for a in acts:
            if isinstance(a, Assign):
                for v in expr_vars(a.value) | {a.target}:
                    if v not in declared_vars:
                        diags.append(Diagnostic(f"undeclared variable {v!r} in {where}"))
            else:
                if a.event not in events:
                    diags.append(Diagnostic(f"undeclared event {a.event!r} sent in {where}"))
                elif events[a.event] != "local":
                    diags.append(Diagnostic(f"broadcast of non-local event {a.event!r} in {where}"))

    for s in c.states.values():
        check_actions(s.entry, f"entry of {s.id}")
        check_actions(s.during, f"during of {s.id}")
        check_actions(s.exit, f"exit of {s.id}")
        for ev, acts in s.on_actions:
            if ev not in events:
                diags.append(Diagnostic(f"undeclared event {ev!r} in on-action of {s.id}"))
            check_actions(acts, f"on {ev} of {s.id}")
    for t in c.transitions.values():
        if t.source is not None and t.source not in node_ids:
            diags.append(Diagnostic(f"unknown source {t.source!r} in transition {t.id}"))
        if t.target not in node_ids:
            diags.append(Diagnostic(f"unknown target {t.target!r} in transition {t.id}"))
        if t.trigger is not None and t.trigger not in events:
            diags.append(Diagnostic(f"undeclared trigger {t.trigger!r} in transition {t.id}"))
        if t.condition is not None:
            for v in expr_vars(t.condition):
                if v not in declared_vars:
                    diags.append(Diagnostic(f"undeclared variable {v!r} in condition of {t.id}"))
        check_actions(t.condition_action, f"condition action of {t.id}")
        check_actions(t.transition_action, f"transition action of {t.id}")


def try_parse_chart(text: str) -> tuple[ChartDef | None, list[Diagnostic]]:
    """Parse; returns (chart, diagnostics). chart is None when unusable."""
    b = _Builder()
    try:
        ts = TokenStream(tokenize(text, PUNCTS))
        ts.expect("chart")
        name_tok = ts.expect_ident("chart name")
        b.claim(name_tok.text, "chart", name_tok.line, name_tok.col)
        attrs = _parse_attrs(ts)
        if "history" in attrs:
            b.diags.append(Diagnostic("chart root cannot carry history", name_tok.line, name_tok.col))
        ts.expect("{")
        top_children: list[str] = []
        while not ts.eat("}"):
            t = ts.peek()
            if ts.eat("state"):
                top_children.append(_parse_state(ts, b, name_tok.text))
            elif ts.eat("junction"):
                tj = ts.expect_ident("junction name")
                ts.expect(";")
                b.claim(tj.text, "junction", tj.line, tj.col)
                b.junctions[tj.text] = JunctionDef(tj.text, name_tok.text)
            elif ts.eat("transition"):
                _parse_transition(ts, b)
            elif ts.eat("event"):
                te = ts.expect_ident("event name")
                ts.expect(":")
                kt = ts.peek()
                if not (ts.eat("input") or ts.eat("local")):
                    raise SourceError.at("event kind must be input or local", kt.line, kt.col)
                ts.expect(";")
                b.claim(te.text, "event", te.line, te.col)
                b.events.append(EventDecl(te.text, kt.text))
            elif t.text in ("input", "output", "local"):
                kind = ts.next().text
                tv = ts.expect_ident("data name")
                ts.expect(":")
                st = ts.peek()
                if not (ts.eat("int") or ts.eat("float")):
                    raise SourceError.at("sort must be int or float", st.line, st.col)
                ts.expect(";")
                b.claim(tv.text, "data", tv.line, tv.col)
                b.data.append(DataDecl(tv.text, kind, st.text))
            else:
                raise SourceError.at(f"unexpected {t.text!r} in chart body", t.line, t.col)
        tail = ts.peek()
        if tail.kind != "eof":
            raise SourceError.at(f"trailing input {tail.text!r}", tail.line, tail.col)
    except SourceError as e:
        return None, b.diags + e.diagnostics

    chart = ChartDef(
        identifier=name_tok.text,
        states=b.states,
        transitions=b.transitions,
        junctions=b.junctions,
        events=tuple(b.events),
        data=tuple(b.data),
        root_decomposition="parallel" if "parallel" in attrs else "sequential",
        root_child_order=tuple(top_children),
    )
    _check_references(chart, b.diags)
    if b.diags:
        return None, b.diags
    return chart, []


def parse_chart(text: str) -> ChartDef:
    chart, diags = try_parse_chart(text)
    if chart is None:
        raise SourceError(diags)
    return chart
