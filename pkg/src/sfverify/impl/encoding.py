"""The state-encoding scheme shared by the generator and the verifier.

A chart's execution state is flattened into DWork fields:

  * is_active_c1        -- chart activity flag (c1 names the chart root)
  * is_active_S         -- activity flag for each child S of a parallel
                           composite (children of sequential composites get
                           no flag; their parent's substate code covers them)
  * is_S (or is_c1)     -- active-substate code of each sequential composite
                           that owns children; 0 = none, children numbered
                           1..k in child order via named IN_ constants
  * was_S               -- last-active code for composites with history

Chart variables map to U (inputs) and B (outputs and locals); Y mirrors the
outputs and is written at the end of each step.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..chart.model import ChartDef
from .ir import FLOAT, INT, UINT8, FieldDecl, RecordDecl

ROOT_TAG = "c1"


@dataclass(frozen=True)
class Layout:
    """Where each piece of chart state lives in the records."""

    chart: str
    active_field: dict[str, str]    # state-id (or chart-id) -> DWork flag field
    code_field: dict[str, str]      # composite-id (or chart-id) -> DWork substate-code field
    history_field: dict[str, str]   # composite-id -> DWork was_ field
    state_const: dict[str, str]     # state-id -> constant name coding it in its parent
    const_values: dict[str, int]    # constant name -> value
    var_slot: dict[str, tuple[str, str]]  # chart variable -> (record, field)
    output_vars: tuple[str, ...]    # chart outputs in declaration order
    event_id: dict[str, int]        # event name -> 1-based id (0 = no event)
    dwork: RecordDecl
    blocks: RecordDecl
    inputs: RecordDecl
    outputs: RecordDecl

    def const_of(self, sid: str) -> str:
        return self.state_const[sid]


def _sort(chart_sort: str) -> str:
    return FLOAT if chart_sort == "float" else INT


def default_layout(c: ChartDef) -> Layout:
    active_field: dict[str, str] = {c.identifier: f"is_active_{ROOT_TAG}"}
    code_field: dict[str, str] = {}
    history_field: dict[str, str] = {}
    state_const: dict[str, str] = {}
    const_values: dict[str, int] = {}

    dwork_fields = [FieldDecl(f"is_active_{ROOT_TAG}", UINT8)]
    if c.root_child_order and c.root_decomposition == "sequential":
        code_field[c.identifier] = f"is_{ROOT_TAG}"
        dwork_fields.append(FieldDecl(f"is_{ROOT_TAG}", UINT8))

    for sid, s in c.states.items():
        parent_par = c.decomposition(s.parent) == "parallel"
        if parent_par:
            active_field[sid] = f"is_active_{sid}"
            dwork_fields.append(FieldDecl(f"is_active_{sid}", UINT8))
        if s.child_order and s.decomposition == "sequential":
            code_field[sid] = f"is_{sid}"
            dwork_fields.append(FieldDecl(f"is_{sid}", UINT8))
        if s.has_history:
            history_field[sid] = f"was_{sid}"
            dwork_fields.append(FieldDecl(f"was_{sid}", UINT8))

    # constants: children of sequential composites, 1..k in child order
    for scope in [c.identifier, *c.states]:
        if c.decomposition(scope) != "sequential":
            continue
        for i, kid in enumerate(c.children(scope), start=1):
            name = f"{c.identifier}_IN_{kid}"
            state_const[kid] = name
            const_values[name] = i

    var_slot: dict[str, tuple[str, str]] = {}
    u_fields, b_fields, y_fields = [], [], []
    for d in c.data:
        if d.kind == "input":
            var_slot[d.name] = ("U", d.name)
            u_fields.append(FieldDecl(d.name, _sort(d.sort)))
        else:
            var_slot[d.name] = ("B", d.name)
            b_fields.append(FieldDecl(d.name, _sort(d.sort)))
            if d.kind == "output":
                y_fields.append(FieldDecl(d.name, _sort(d.sort)))

    return Layout(
        chart=c.identifier,
        active_field=active_field,
        code_field=code_field,
        history_field=history_field,
        state_const=state_const,
        const_values=const_values,
        var_slot=var_slot,
        output_vars=tuple(d.name for d in c.data if d.kind == "output"),
        event_id={e.name: i for i, e in enumerate(c.events, start=1)},
        dwork=RecordDecl("DWork", tuple(dwork_fields)),
        blocks=RecordDecl("B", tuple(b_fields)),
        inputs=RecordDecl("U", tuple(u_fields)),
        outputs=RecordDecl("Y", tuple(y_fields)),
    )


def output_function_name(c: ChartDef) -> str:
    return f"{c.identifier}_output"
