"""Shared fixtures, plus the exhaustive small-domain agreement check used by
both the refinement tests and the acceptance gate."""

from __future__ import annotations

import itertools

import pytest

from sfverify.chart.model import ChartDef
from sfverify.chart.parser import parse_chart
from sfverify.corpus import EXAMPLE_CHARTS, load_chart_text
from sfverify.impl.interp import Machine
from sfverify.impl.ir import ImplProgram
from sfverify.retrieve import (
    RetrieveRelation,
    _invariant_control_configs,
    abstract,
    zero_program_state,
)
from sfverify.sim.interp import ChartInterp
from sfverify.sim.state import StepInput


def load(name: str) -> ChartDef:
    return parse_chart(load_chart_text(name))


@pytest.fixture(scope="session")
def charts() -> dict[str, ChartDef]:
    return {name: load(name) for name in EXAMPLE_CHARTS}


def input_event_ids(c: ChartDef) -> dict[str, int]:
    return {e.name: c.event_id(e.name) for e in c.events if e.kind == "input"}


def event_cases(c: ChartDef) -> list[tuple[str, ...]]:
    """A no-event step, each input event alone, and one two-event step."""
    evs = [e.name for e in c.events if e.kind == "input"]
    cases: list[tuple[str, ...]] = [()] + [(e,) for e in evs]
    if len(evs) >= 2:
        cases.append((evs[0], evs[1]))
    return cases


def input_grids(c: ChartDef, values):
    names = c.data_names("input")
    for vec in itertools.product(values, repeat=len(names)):
        yield {
            n: (float(v) if c.data_decl(n).sort == "float" else v)
            for n, v in zip(names, vec)
        }


def control_start_states(c: ChartDef, r: RetrieveRelation):
    """Every control configuration the invariant allows, as a (concrete
    program state, abstracted chart state) pair."""
    for control in _invariant_control_configs(r):
        base = zero_program_state(r)
        for fname, val in control.items():
            base.dwork[fname] = val
        yield control, base, abstract(r, base)


def agreement_discrepancies(
    c: ChartDef,
    p: ImplProgram,
    r: RetrieveRelation,
    values: tuple[int, ...],
    case_limit: int = 12_000,
) -> tuple[int, list[str]]:
    """Single-step the chart and the program side by side from every control
    configuration the invariant allows, crossed with a grid of input values
    and event combinations. Returns (cases run, disagreements found); a
    disagreement is a differing output or a differing abstracted successor.
    """
    interp = ChartInterp(c)
    event_ids = input_event_ids(c)
    bad: list[str] = []
    cases = 0
    for control, base, start in control_start_states(c, r):
        for inputs in input_grids(c, values):
            for events in event_cases(c):
                cases += 1
                if cases > case_limit:
                    bad.append(f"gave up after {case_limit} cases")
                    return cases, bad
                inp = StepInput(active_events=events, inputs=inputs)
                where = f"{control} inputs={inputs} events={list(events)}"
                m = Machine(p)
                m.state = base.copy()
                try:
                    y = m.step(inp, event_ids)
                except Exception as e:  # noqa: BLE001 - any blow-up is a finding
                    bad.append(f"{where}: program raised: {e}")
                    continue
                res = interp.step(start, inp)
                if y != res.outputs:
                    bad.append(f"{where}: outputs chart={res.outputs} program={y}")
                    continue
                after = abstract(r, m.state)
                if after != res.state:
                    bad.append(f"{where}: abstracted successor differs from chart state")
    return cases, bad


def program_pair_discrepancies(
    c: ChartDef,
    r: RetrieveRelation,
    p1: ImplProgram,
    p2: ImplProgram,
    values: tuple[int, ...],
) -> tuple[int, list[str]]:
    """Run two programs over the same record layout through the same case
    grid and report every state or output difference."""
    event_ids = input_event_ids(c)
    bad: list[str] = []
    cases = 0
    for control, base, _start in control_start_states(c, r):
        for inputs in input_grids(c, values):
            for events in event_cases(c):
                cases += 1
                inp = StepInput(active_events=events, inputs=inputs)
                m1, m2 = Machine(p1), Machine(p2)
                m1.state = base.copy()
                m2.state = base.copy()
                y1 = m1.step(inp, event_ids)
                y2 = m2.step(inp, event_ids)
                where = f"{control} inputs={inputs} events={list(events)}"
                if y1 != y2:
                    bad.append(f"{where}: outputs {y1} vs {y2}")
                elif m1.state != m2.state:
                    bad.append(f"{where}: final states differ")
    return cases, bad
