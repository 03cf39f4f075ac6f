"""Static well-formedness checks over a constructed ChartDef.

The parser already guarantees most of these for parsed charts; validate_chart
re-checks everything so hand-built ChartDefs get the same scrutiny.
Diagnostics are emitted in a fixed traversal order (deterministic output).
"""

from __future__ import annotations

from ..diagnostics import Diagnostic
from .ast import Assign, Send, expr_vars
from .model import ChartDef


def validate_chart(c: ChartDef) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    say = lambda msg: diags.append(Diagnostic(msg))

    ids: dict[str, str] = {c.identifier: "chart"}
    for sid in c.states:
        if sid in ids:
            say(f"duplicate identifier {sid!r}")
        ids[sid] = "state"
    for jid in c.junctions:
        if jid in ids:
            say(f"duplicate identifier {jid!r}")
        ids[jid] = "junction"
    for tid in c.transitions:
        if tid in ids:
            say(f"duplicate identifier {tid!r}")
        ids[tid] = "transition"
    for e in c.events:
        if e.name in ids:
            say(f"duplicate identifier {e.name!r}")
        ids[e.name] = "event"
    for d in c.data:
        if d.name in ids:
            say(f"duplicate identifier {d.name!r}")
        ids[d.name] = "data"

    # parent relation is a tree rooted at the chart identifier
    for sid, s in c.states.items():
        if s.parent != c.identifier and s.parent not in c.states:
            say(f"state {sid!r} has unknown parent {s.parent!r}")
    for jid, j in c.junctions.items():
        if j.parent != c.identifier and j.parent not in c.states:
            say(f"junction {jid!r} has unknown parent {j.parent!r}")
    for sid in c.states:
        seen = {sid}
        cur = sid
        while cur != c.identifier:
            nxt = c.states[cur].parent if cur in c.states else c.identifier
            if nxt in seen:
                say(f"parent cycle through {sid!r}")
                break
            if nxt != c.identifier and nxt not in c.states:
                break
            seen.add(nxt)
            cur = nxt

    # child_order exactly lists the children
    scopes = [c.identifier] + list(c.states)
    for scope in scopes:
        declared = list(c.children(scope)) if scope == c.identifier or scope in c.states else []
        actual = [sid for sid, s in c.states.items() if s.parent == scope]
        if sorted(declared) != sorted(actual) or len(set(declared)) != len(declared):
            say(f"child_order of {scope!r} does not match its children")

    for sid, s in c.states.items():
        if s.has_history and s.decomposition != "sequential":
            say(f"history on non-sequential state {sid!r}")

    node_ids = set(c.states) | set(c.junctions)
    for t in c.transitions.values():
        if t.source is not None and t.source not in node_ids:
            say(f"unknown source in transition {t.id!r}")
            continue
        if t.target not in node_ids:
            say(f"unknown target in transition {t.id!r}")
            continue
        if t.source is None:
            scope = c.parent_of(t.target)
            if scope != c.identifier and scope not in c.states:
                continue
            if c.decomposition(scope) == "parallel":
                say(f"default transition {t.id!r} inside parallel scope {scope!r}")
        else:
            sp = c.parent_of(t.source)
            tp = c.parent_of(t.target)
            if sp == tp:
                if c.decomposition(sp) == "parallel":
                    say(f"transition {t.id!r} between parallel regions of {sp!r}")
            elif t.source in c.states and tp == t.source:
                # inner transition into the source composite
                if c.decomposition(t.source) == "parallel":
                    say(f"inner transition {t.id!r} into parallel composite {t.source!r}")
            else:
                say(f"transition {t.id!r} crosses hierarchy boundary")
        if t.trigger is not None and t.trigger not in {e.name for e in c.events}:
            say(f"undeclared trigger in transition {t.id!r}")

    # priority unique per source (default transitions: per target scope)
    by_source: dict[object, dict[int, str]] = {}
    for t in c.transitions.values():
        if t.source is None:
            if t.target not in node_ids:
                continue
            key = ("default", c.parent_of(t.target))
        else:
            key = ("from", t.source)
        prev = by_source.setdefault(key, {})
        if t.order in prev:
            where = key[1]
            say(f"duplicate priority at source {where}" if key[0] == "from" else f"duplicate default priority in scope {where}")
        prev[t.order] = t.id

    # sequential composites need a default path; parallel composites have none
    for scope in scopes:
        kids = c.children(scope) if scope == c.identifier or scope in c.states else ()
        if not kids:
            continue
        defaults = c.default_transitions(scope)
        junction_defaults = [
            t for t in c.transitions.values()
            if t.source is None and t.target in c.junctions and c.junctions[t.target].parent == scope
        ]
        if c.decomposition(scope) == "sequential":
            if not defaults and not junction_defaults:
                say(f"missing default transition: {scope}")
        else:
            if defaults or junction_defaults:
                say(f"default transition inside parallel composite {scope}")

    # action / expression references
    declared_vars = {d.name for d in c.data}
    events = {e.name: e.kind for e in c.events}

    def check_actions(acts, where):
        for a in acts:
            if isinstance(a, Assign):
                for v in expr_vars(a.value) | {a.target}:
                    if v not in declared_vars:
                        say(f"undeclared variable {v!r} in {where}")
            elif isinstance(a, Send):
                if a.event not in events:
                    say(f"undeclared event {a.event!r} in {where}")
                elif events[a.event] != "local":
                    say(f"broadcast of non-local event {a.event!r} in {where}")

    for s in c.states.values():
        check_actions(s.entry, f"entry of {s.id}")
        check_actions(s.during, f"during of {s.id}")
        check_actions(s.exit, f"exit of {s.id}")
        for ev, acts in s.on_actions:
            if ev not in events:
                say(f"undeclared event {ev!r} in on-action of {s.id}")
            check_actions(acts, f"on {ev} of {s.id}")
    for t in c.transitions.values():
        if t.condition is not None:
            for v in sorted(expr_vars(t.condition)):
                if v not in declared_vars:
                    say(f"undeclared variable {v!r} in condition of {t.id}")
        check_actions(t.condition_action, f"condition action of {t.id}")
        check_actions(t.transition_action, f"transition action of {t.id}")

    return diags
