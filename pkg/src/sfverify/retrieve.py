"""Mapping between chart configurations and step-program state.

Every chart state gets a status formula over the program's DWork record:
an activity flag for children of parallel compositions, a substate-code
equation for children of sequential ones.  Every chart variable gets a
record field, and every history composite a was_ slot.  `synthesize`
discovers the mapping for a given program and reports, in one pass,
everything the program is missing.  `abstract` reads a program state back
into a chart configuration, refusing states that break the control
invariant.  `check_functional_total_surjective` certifies by enumeration
that the mapping is a total function from invariant program states onto
the chart's steady configurations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .chart.model import ChartDef
from .impl.encoding import Layout
from .impl.interp import ImplState
from .impl.ir import FLOAT, INT, UINT8, ImplProgram
from .sim.state import ChartDynState, invariant_violations

_INT_SORTS = (INT, UINT8)


class ConformanceError(Exception):
    """The program does not expose the state the chart needs."""

    def __init__(self, chart: str, failures: list[str]):
        self.chart = chart
        self.failures = tuple(failures)
        super().__init__(f"{chart}: " + "; ".join(failures))


class RetrieveError(Exception):
    """A program state falls outside the mapping's domain."""


@dataclass(frozen=True)
class ActiveFlag:
    """State is active iff the flag field is nonzero."""

    record: str
    field: str

    def holds(self, st: ImplState) -> bool:
        return st.record(self.record)[self.field] != 0

    def render(self) -> str:
        return f"{self.record}.{self.field} != 0"


@dataclass(frozen=True)
class SubstateCode:
    """State is active iff its parent's code field equals the constant."""

    record: str
    field: str
    constant: str
    value: int

    def holds(self, st: ImplState) -> bool:
        return st.record(self.record)[self.field] == self.value

    def render(self) -> str:
        return f"{self.record}.{self.field} == {self.constant}"


StatusFormula = ActiveFlag | SubstateCode


@dataclass(frozen=True)
class RetrieveRelation:
    """The synthesized mapping; layout carries the concrete slot choices."""

    chart: ChartDef
    layout: Layout

    @cached_property
    def status_formulas(self) -> dict[str, StatusFormula]:
        lay = self.layout
        out: dict[str, StatusFormula] = {
            self.chart.identifier: ActiveFlag("DWork", lay.active_field[self.chart.identifier])
        }
        for sid, s in self.chart.states.items():
            if sid in lay.active_field:
                out[sid] = ActiveFlag("DWork", lay.active_field[sid])
            else:
                const = lay.state_const[sid]
                out[sid] = SubstateCode(
                    "DWork", lay.code_field[s.parent], const, lay.const_values[const]
                )
        return out

    @cached_property
    def history_slots(self) -> dict[str, tuple[str, str]]:
        return {sid: ("DWork", f) for sid, f in self.layout.history_field.items()}

    @property
    def var_map(self) -> dict[str, tuple[str, str]]:
        return {f"v_{name}": slot for name, slot in self.layout.var_slot.items()}

    @cached_property
    def control_ranges(self) -> dict[tuple[str, str], tuple[int, int]]:
        c, lay = self.chart, self.layout
        out: dict[tuple[str, str], tuple[int, int]] = {}
        for f in lay.active_field.values():
            out[("DWork", f)] = (0, 1)
        for scope, f in lay.code_field.items():
            out[("DWork", f)] = (0, len(c.children(scope)))
        for scope, f in lay.history_field.items():
            out[("DWork", f)] = (0, len(c.children(scope)))
        return out

    def active_states(self, st: ImplState) -> dict[str, bool]:
        """Hierarchical status: a state counts only under an active parent."""
        c = self.chart
        fml = self.status_formulas
        out = {c.identifier: fml[c.identifier].holds(st)}
        pending = list(c.root_child_order)
        while pending:
            sid = pending.pop()
            out[sid] = out[c.states[sid].parent] and fml[sid].holds(st)
            pending.extend(c.states[sid].child_order)
        return out

    def invariant_failures(self, st: ImplState) -> list[str]:
        c, lay = self.chart, self.layout
        out = []
        for (rec, f), (lo, hi) in self.control_ranges.items():
            v = st.record(rec).get(f)
            if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
                out.append(f"{rec}.{f} = {v!r} outside {lo}..{hi}")
        if out:
            return out
        active = self.active_states(st)
        for scope, f in lay.code_field.items():
            coded = st.dwork[f] != 0
            if coded != active[scope]:
                state = "active" if active[scope] else "inactive"
                out.append(f"DWork.{f} = {st.dwork[f]} but {scope} is {state}")
        for sid in lay.active_field:
            if sid == c.identifier:
                continue
            parent = c.states[sid].parent
            if (st.dwork[lay.active_field[sid]] != 0) != active[parent]:
                state = "active" if active[parent] else "inactive"
                out.append(
                    f"DWork.{lay.active_field[sid]} = {st.dwork[lay.active_field[sid]]}"
                    f" but {parent} is {state}"
                )
        return out

    def invariant_text(self) -> list[str]:
        c, lay = self.chart, self.layout
        lines = [f"DWork.{f} in {lo}..{hi}" for (_, f), (lo, hi) in self.control_ranges.items()]
        for scope, f in lay.code_field.items():
            lines.append(f"DWork.{f} != 0 iff {self.status_formulas[scope].render()}")
        for sid in lay.active_field:
            if sid == c.identifier:
                continue
            parent = self.status_formulas[c.states[sid].parent]
            lines.append(f"DWork.{lay.active_field[sid]} != 0 iff {parent.render()}")
        return lines

    def as_dict(self) -> dict:
        c = self.chart
        history: dict[str, str | None] = {}
        for sid, s in c.states.items():
            if s.child_order and s.decomposition == "sequential":
                slot = self.history_slots.get(sid)
                history[sid] = f"{slot[0]}.{slot[1]}" if slot else None
        return {
            "chart": c.identifier,
            "status": {sid: f.render() for sid, f in self.status_formulas.items()},
            "history": history,
            "variables": {v: f"{rec}.{f}" for v, (rec, f) in self.var_map.items()},
            "constants": dict(self.layout.const_values),
            "invariant": self.invariant_text(),
        }


def _probe(template: Layout, p: ImplProgram, c: ChartDef) -> list[str]:
    """Everything the program is missing, phrased by what the slot is for."""
    missing = []

    def dwork_int(fname: str, role: str) -> None:
        try:
            sort = p.field_sort("DWork", fname)
        except KeyError:
            missing.append(f"DWork is missing '{fname}', {role}")
            return
        if sort not in _INT_SORTS:
            missing.append(f"DWork.{fname} must be an integer field, found {sort}")

    dwork_int(template.active_field[c.identifier], "the chart activity flag")
    for scope, f in template.code_field.items():
        dwork_int(f, f"the substate code for '{scope}'")
    for sid, f in template.active_field.items():
        if sid != c.identifier:
            dwork_int(f, f"the activity flag for parallel region '{sid}'")
    for scope, f in template.history_field.items():
        dwork_int(f, f"the history slot for '{scope}'")

    for name, (rec, f) in template.var_slot.items():
        d = c.data_decl(name)
        want = FLOAT if d.sort == "float" else None
        try:
            sort = p.field_sort(rec, f)
        except KeyError:
            missing.append(f"{rec} is missing '{f}' for {d.kind} variable '{name}'")
            continue
        if want == FLOAT and sort != FLOAT:
            missing.append(f"{rec}.{f} must be a float field, found {sort}")
        if want is None and sort == FLOAT:
            missing.append(f"{rec}.{f} must be an integer field, found float")
    for name in template.output_vars:
        if not any(f.name == name for f in p.outputs.fields):
            missing.append(f"Y is missing output '{name}'")

    for scope in [c.identifier, *c.states]:
        if c.decomposition(scope) != "sequential" or not c.children(scope):
            continue
        kids = c.children(scope)
        values = {}
        for kid in kids:
            cname = template.state_const[kid]
            if cname not in p.constants:
                missing.append(f"missing constant '{cname}' coding child '{kid}' of '{scope}'")
            else:
                values[kid] = p.constants[cname]
        if len(values) == len(kids) and sorted(values.values()) != list(range(1, len(kids) + 1)):
            missing.append(
                f"constants for children of '{scope}' must number them 1..{len(kids)},"
                f" got {sorted(values.values())}"
            )
    return missing


def synthesize(c: ChartDef, p: ImplProgram) -> RetrieveRelation:
    """Fit the mapping to the program, or report every slot it lacks."""
    from .impl.encoding import default_layout

    template = default_layout(c)
    failures = _probe(template, p, c)
    if failures:
        raise ConformanceError(c.identifier, failures)
    fitted = Layout(
        chart=template.chart,
        active_field=template.active_field,
        code_field=template.code_field,
        history_field=template.history_field,
        state_const=template.state_const,
        const_values={name: p.constants[name] for name in template.const_values},
        var_slot=template.var_slot,
        output_vars=template.output_vars,
        event_id=template.event_id,
        dwork=p.dwork,
        blocks=p.blocks,
        inputs=p.inputs,
        outputs=p.outputs,
    )
    return RetrieveRelation(c, fitted)


def abstract(r: RetrieveRelation, st: ImplState) -> ChartDynState:
    """Read a program state back as a chart configuration."""
    bad = r.invariant_failures(st)
    if bad:
        raise RetrieveError("; ".join(bad))
    c = r.chart
    status = r.active_states(st)
    history: dict[str, str] = {}
    for sid, (rec, f) in r.history_slots.items():
        w = st.record(rec)[f]
        if w != 0:
            for kid in c.children(sid):
                if r.layout.const_values[r.layout.state_const[kid]] == w:
                    history[sid] = kid
                    break
    values: dict[str, float | int] = {}
    for name, (rec, f) in r.layout.var_slot.items():
        v = st.record(rec)[f]
        values[name] = float(v) if c.data_decl(name).sort == "float" else int(v)
    return ChartDynState(status, history, values)


def zero_program_state(r: RetrieveRelation) -> ImplState:
    st = ImplState()
    lay = r.layout
    for rec_name, decl in (("DWork", lay.dwork), ("B", lay.blocks), ("U", lay.inputs), ("Y", lay.outputs)):
        d = st.record(rec_name)
        for f in decl.fields:
            d[f.name] = 0.0 if f.sort == FLOAT else 0
    return st


def concretize(r: RetrieveRelation, s: ChartDynState) -> ImplState:
    """Encode a chart configuration as a program state (abstract's inverse)."""
    c = r.chart
    bad = invariant_violations(c, s)
    if bad:
        raise RetrieveError("; ".join(bad))
    st = zero_program_state(r)
    st.dwork[r.layout.active_field[c.identifier]] = 1 if s.state_status.get(c.identifier) else 0
    for sid in c.states:
        if sid in r.layout.active_field:
            st.dwork[r.layout.active_field[sid]] = 1 if s.state_status.get(sid) else 0
    for scope, f in r.layout.code_field.items():
        active_kids = [k for k in c.children(scope) if s.state_status.get(k)]
        if active_kids:
            st.dwork[f] = r.layout.const_values[r.layout.state_const[active_kids[0]]]
    for sid, (rec, f) in r.history_slots.items():
        kid = s.state_history.get(sid)
        if kid is not None:
            st.record(rec)[f] = r.layout.const_values[r.layout.state_const[kid]]
    for name, (rec, f) in r.layout.var_slot.items():
        v = s.vars.get(name, 0)
        st.record(rec)[f] = float(v) if c.data_decl(name).sort == "float" else int(v)
    for name in r.layout.output_vars:
        v = s.vars.get(name, 0)
        st.outputs[name] = float(v) if c.data_decl(name).sort == "float" else int(v)
    return st


def _invariant_control_configs(r: RetrieveRelation) -> list[dict[str, int]]:
    """All DWork control assignments satisfying the invariant."""
    c, lay = r.chart, r.layout

    def expand(scope: str, active: bool, acc: dict[str, int]) -> list[dict[str, int]]:
        kids = c.children(scope)
        if scope in lay.code_field:
            if not active:
                acc = dict(acc, **{lay.code_field[scope]: 0})
                return _all_off(kids, acc)
            out = []
            for kid in kids:
                a2 = dict(acc)
                a2[lay.code_field[scope]] = lay.const_values[lay.state_const[kid]]
                for cfg in expand(kid, True, a2):
                    out.extend(_all_off([k for k in kids if k != kid], cfg))
            return out
        if kids and c.decomposition(scope) == "parallel":
            configs = [acc]
            for kid in kids:
                nxt = []
                for cfg in configs:
                    c2 = dict(cfg)
                    c2[lay.active_field[kid]] = 1 if active else 0
                    nxt.extend(expand(kid, active, c2))
                configs = nxt
            return configs
        return [acc]

    def _all_off(scopes: list[str] | tuple[str, ...], acc: dict[str, int]) -> list[dict[str, int]]:
        configs = [acc]
        for sid in scopes:
            nxt = []
            for cfg in configs:
                c2 = dict(cfg)
                if sid in lay.active_field:
                    c2[lay.active_field[sid]] = 0
                nxt.extend(expand(sid, False, c2))
            configs = nxt
        return configs

    root_flag = lay.active_field[c.identifier]
    configs = expand(c.identifier, False, {root_flag: 0}) + expand(c.identifier, True, {root_flag: 1})

    hist_fields = sorted(lay.history_field.items())
    for scope, f in hist_fields:
        options = range(len(c.children(scope)) + 1)
        configs = [dict(cfg, **{f: w}) for cfg in configs for w in options]
    return configs


def _steady_configs(r: RetrieveRelation) -> list[ChartDynState]:
    """Every well-formed chart configuration, statuses crossed with histories."""
    c = r.chart
    blank = {c.identifier: False, **{sid: False for sid in c.states}}

    def expand(scope: str, acc: dict[str, bool]) -> list[dict[str, bool]]:
        kids = c.children(scope)
        if not kids:
            return [acc]
        if c.decomposition(scope) == "sequential":
            out = []
            for kid in kids:
                out.extend(expand(kid, dict(acc, **{kid: True})))
            return out
        configs = [acc]
        for kid in kids:
            configs = [cfg for a in configs for cfg in expand(kid, dict(a, **{kid: True}))]
        return configs

    statuses = [dict(blank)] + expand(c.identifier, dict(blank, **{c.identifier: True}))

    hist_choices = [
        [(sid, kid) for kid in (None, *c.children(sid))] for sid in sorted(r.history_slots)
    ]
    zero = {d.name: (0.0 if d.sort == "float" else 0) for d in c.data}
    out = []
    for status in statuses:
        for combo in itertools.product(*hist_choices):
            history = {sid: kid for sid, kid in combo if kid is not None}
            out.append(ChartDynState(dict(status), history, dict(zero)))
    return out


DATA_SAMPLES = (-1, 0, 1)


@dataclass(frozen=True)
class RetrieveCheck:
    total: bool
    functional: bool
    surjective: bool
    control_states: int
    data_points: int
    abstract_states: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.total and self.functional and self.surjective

    @property
    def checks(self) -> int:
        return self.control_states * self.data_points

    def headline(self) -> str:
        return (
            f"{self.control_states} control states x {self.data_points} data points"
            f" = {self.checks} checks"
        )

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "total": self.total,
            "functional": self.functional,
            "surjective": self.surjective,
            "control_states": self.control_states,
            "data_points": self.data_points,
            "checks": self.checks,
            "abstract_states": self.abstract_states,
            "headline": self.headline(),
            "failures": list(self.failures),
        }


def check_functional_total_surjective(
    r: RetrieveRelation,
    c: ChartDef,
    p: ImplProgram,
    data_values: tuple[int, ...] = DATA_SAMPLES,
) -> RetrieveCheck:
    """Enumerate the mapping's domain and image and confirm it is a total
    function from invariant program states onto steady chart configurations."""
    failures: list[str] = []
    controls = _invariant_control_configs(r)
    # every combination of test values over the variable slots
    slots = list(r.layout.var_slot.items())
    vectors = []
    for combo in itertools.product(data_values, repeat=len(slots)):
        vec = {}
        for (name, (rec, f)), v in zip(slots, combo):
            vec[(rec, f)] = float(v) if c.data_decl(name).sort == "float" else int(v)
        vectors.append(vec)

    base = zero_program_state(r)
    total = functional = True
    for control in controls:
        for vec in vectors:
            st = base.copy()
            st.dwork.update(control)
            for (rec, f), v in vec.items():
                st.record(rec)[f] = v
            try:
                a1 = abstract(r, st)
                a2 = abstract(r, st.copy())
            except RetrieveError as e:
                total = False
                failures.append(f"not total: {control} -> {e}")
                continue
            if (a1.state_status, a1.state_history, a1.vars) != (
                a2.state_status,
                a2.state_history,
                a2.vars,
            ):
                functional = False
                failures.append(f"not functional at {control}")
            bad = invariant_violations(c, a1)
            if bad:
                total = False
                failures.append(f"image of {control} is ill-formed: {'; '.join(bad)}")

    steady = _steady_configs(r)
    surjective = True
    for s in steady:
        try:
            st = concretize(r, s)
            back = abstract(r, st)
        except RetrieveError as e:
            surjective = False
            failures.append(f"no preimage for {sorted(k for k, v in s.state_status.items() if v)}: {e}")
            continue
        if (back.state_status, back.state_history) != (s.state_status, s.state_history):
            surjective = False
            failures.append(
                f"preimage of {sorted(k for k, v in s.state_status.items() if v)} reads back differently"
            )

    return RetrieveCheck(
        total=total,
        functional=functional,
        surjective=surjective,
        control_states=len(controls),
        data_points=len(vectors),
        abstract_states=len(steady),
        failures=tuple(failures[:20]),
    )
