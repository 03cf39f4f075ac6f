"""Dynamic chart state, step inputs/results, and the runtime invariants."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..chart.model import ChartDef


@dataclass
class ChartDynState:
    state_status: dict[str, bool]
    state_history: dict[str, str]
    vars: dict[str, float | int]

    def copy(self) -> "ChartDynState":
        return ChartDynState(dict(self.state_status), dict(self.state_history), dict(self.vars))


@dataclass(frozen=True)
class StepInput:
    active_events: tuple[str, ...] = ()
    inputs: dict[str, float | int] = field(default_factory=dict)


@dataclass(frozen=True)
class StepResult:
    state: ChartDynState
    outputs: dict[str, float | int]
    trace: tuple[tuple, ...]


def invariant_violations(c: ChartDef, s: ChartDynState) -> list[str]:
    """Runtime-state invariants; empty list when all hold."""
    out = []
    for sid, st in c.states.items():
        active_kids = [k for k in st.child_order if s.state_status.get(k)]
        if st.decomposition == "sequential":
            if s.state_status.get(sid) is not None and len(active_kids) > 1:
                out.append(f"sequential {sid} has {len(active_kids)} active children")
        else:
            statuses = {s.state_status.get(k, False) for k in st.child_order}
            if s.state_status.get(sid) and len(statuses) > 1:
                out.append(f"parallel {sid} children not in lockstep")
        for k in st.child_order:
            if s.state_status.get(k) and not s.state_status.get(sid):
                out.append(f"child {k} active under inactive {sid}")
    for k in c.root_child_order:
        if s.state_status.get(k) and not s.state_status.get(c.identifier):
            out.append(f"child {k} active under inactive chart")
    if c.root_decomposition == "sequential":
        active_top = [k for k in c.root_child_order if s.state_status.get(k)]
        if len(active_top) > 1:
            out.append("chart root has multiple active children")
    for sid, child in s.state_history.items():
        if sid not in c.states or not c.states[sid].has_history:
            out.append(f"history recorded for non-history state {sid}")
        elif child not in c.states[sid].child_order:
            out.append(f"history of {sid} names non-child {child}")
    return out
