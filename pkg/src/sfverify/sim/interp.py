"""Operational interpreter for charts.

One step executes the chart once per active event (once with no event when
the step carries none). Within one execution, an active state first offers
its outer transitions by priority, then its inner transitions, then runs
during and on actions, then executes its active children in child order.
Completing a transition path exits the source, runs the accumulated
transition actions, and enters the target. A local event broadcast re-runs
the whole chart; if the broadcasting context is left inactive the rest of
that chart execution is abandoned (early return).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..chart.ast import Assign, Binary, FloatLit, IntLit, Send, Unary, Var
from ..chart.model import ChartDef, TransitionDef
from ..numerics import coerce, promote_pair, sat_add, sat_mul, sat_neg, sat_sub, truthy
from .state import ChartDynState, StepInput, StepResult, invariant_violations


class StepError(Exception):
    pass


class _EarlyReturn(Exception):
    pass


@dataclass(frozen=True)
class Completed:
    target: str
    actions: tuple


NOT_COMPLETED = None


def compile_expr(e, sorts: dict[str, str]):
    """Compile a chart expression to (closure over the vars dict, sort)."""
    match e:
        case IntLit(v):
            return (lambda _: v), "int"
        case FloatLit(v):
            return (lambda _: v), "float"
        case Var(name):
            return (lambda vs, n=name: vs[n]), sorts[name]
        case Unary("-", operand):
            f, srt = compile_expr(operand, sorts)
            if srt == "int":
                return (lambda vs: sat_neg(f(vs))), "int"
            return (lambda vs: -f(vs)), "float"
        case Binary(op, left, right):
            lf, ls = compile_expr(left, sorts)
            rf, rs = compile_expr(right, sorts)
            if op in ("+", "-", "*"):
                if ls == "int" and rs == "int":
                    sop = {"+": sat_add, "-": sat_sub, "*": sat_mul}[op]
                    return (lambda vs: sop(lf(vs), rf(vs))), "int"
                pyop = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b}[op]
                return (lambda vs: pyop(float(lf(vs)), float(rf(vs)))), "float"
            if op == "and":
                return (lambda vs: 1 if (truthy(lf(vs)) and truthy(rf(vs))) else 0), "int"
            if op == "or":
                return (lambda vs: 1 if (truthy(lf(vs)) or truthy(rf(vs))) else 0), "int"
            cmp = {
                "<": lambda a, b: 1 if a < b else 0,
                "<=": lambda a, b: 1 if a <= b else 0,
                ">": lambda a, b: 1 if a > b else 0,
                ">=": lambda a, b: 1 if a >= b else 0,
                "==": lambda a, b: 1 if a == b else 0,
                "!=": lambda a, b: 1 if a != b else 0,
            }[op]
            if ls == rs:
                return (lambda vs: cmp(lf(vs), rf(vs))), "int"
            return (lambda vs: cmp(*promote_pair(lf(vs), rf(vs)))), "int"
    raise TypeError(f"cannot compile {e!r}")


class ChartInterp:
    def __init__(self, chart: ChartDef, broadcast_depth_limit: int = 64, debug_invariants: bool = False):
        self.chart = chart
        self.limit = broadcast_depth_limit
        self.debug = debug_invariants
        self._depth = 0
        c = chart
        self._sorts = {d.name: d.sort for d in c.data}
        self._inputs = [d.name for d in c.data if d.kind == "input"]
        self._outputs = [d.name for d in c.data if d.kind == "output"]
        self._input_events = [e.name for e in c.events if e.kind == "input"]
        # compiled guards and actions
        self._guards = {}
        for t in c.transitions.values():
            if t.condition is not None:
                self._guards[t.id] = compile_expr(t.condition, self._sorts)[0]
        self._acts = {}

        def comp_actions(key, acts):
            compiled = []
            for a in acts:
                if isinstance(a, Assign):
                    f, _ = compile_expr(a.value, self._sorts)
                    compiled.append(("assign", a.target, self._sorts[a.target], f))
                else:
                    compiled.append(("send", a.event))
            self._acts[key] = compiled

        for t in c.transitions.values():
            comp_actions(("ca", t.id), t.condition_action)
            comp_actions(("ta", t.id), t.transition_action)
        for s in c.states.values():
            comp_actions(("entry", s.id), s.entry)
            comp_actions(("during", s.id), s.during)
            comp_actions(("exit", s.id), s.exit)
            for i, (_, acts) in enumerate(s.on_actions):
                comp_actions(("on", s.id, i), acts)
        # per-state outer/inner transition lists
        self._outer: dict[str, list[TransitionDef]] = {}
        self._inner: dict[str, list[TransitionDef]] = {}
        for sid in c.states:
            outer, inner = [], []
            for t in c.outgoing(sid):
                if t.target in c.states or t.target in c.junctions:
                    tp = c.parent_of(t.target)
                    if tp == sid:
                        inner.append(t)
                    else:
                        outer.append(t)
            self._outer[sid] = outer
            self._inner[sid] = inner
        self._defaults = {scope: c.default_transitions(scope) for scope in [c.identifier, *c.states]}

    # -- public API -------------------------------------------------------

    def init_state(self) -> ChartDynState:
        c = self.chart
        status = {c.identifier: False}
        for sid in c.states:
            status[sid] = False
        zero = {d.name: (0.0 if d.sort == "float" else 0) for d in c.data}
        return ChartDynState(status, {}, zero)

    def step(self, s: ChartDynState, inp: StepInput) -> StepResult:
        st = s.copy()
        for name, val in inp.inputs.items():
            if name not in self._sorts or self.chart.data_decl(name).kind != "input":
                raise StepError(f"not an input variable: {name}")
            st.vars[name] = coerce(val, self._sorts[name])
        events = []
        for ev in inp.active_events:
            if ev not in self._input_events:
                raise StepError(f"not a declared input event: {ev}")
        for ev in self._input_events:
            if ev in inp.active_events:
                events.append(ev)
        trace: list[tuple] = []
        self._depth = 0
        for ev in events or [None]:
            try:
                self._execute_chart(st, ev, trace)
            except _EarlyReturn:
                pass
        if self.debug:
            bad = invariant_violations(self.chart, st)
            if bad:
                raise StepError("invariant violated: " + "; ".join(bad))
        outputs = {name: st.vars[name] for name in self._outputs}
        return StepResult(state=st, outputs=outputs, trace=tuple(trace))

    def run_trace(self, steps: list[StepInput]) -> list[StepResult]:
        s = self.init_state()
        results = []
        for i, inp in enumerate(steps):
            try:
                r = self.step(s, inp)
            except StepError as e:
                raise StepError(f"step {i + 1}: {e}") from e
            results.append(r)
            s = r.state
        return results

    # -- execution --------------------------------------------------------

    def _execute_chart(self, st, ev, trace):
        cid = self.chart.identifier
        if not st.state_status[cid]:
            st.state_status[cid] = True
            trace.append(("enter", cid))
            self._enter_children(cid, st, ev, trace)
        else:
            self._exec_children(cid, st, ev, trace)

    def _enter_children(self, scope, st, ev, trace):
        c = self.chart
        kids = c.children(scope)
        if not kids:
            return
        if c.decomposition(scope) == "parallel":
            for k in kids:
                self._enter_state(k, st, ev, trace)
            return
        recorded = st.state_history.get(scope)
        if scope in c.states and c.states[scope].has_history and recorded in kids:
            self._enter_state(recorded, st, ev, trace)
            return
        outcome = self._search(self._defaults[scope], st, ev, trace, set(), context=scope)
        if outcome is NOT_COMPLETED:
            raise StepError(f"default path incomplete in scope {scope}")
        self._run_actions_seq(outcome.actions, scope, st, ev, trace)
        self._enter_state(outcome.target, st, ev, trace)

    def _enter_state(self, sid, st, ev, trace):
        c = self.chart
        st.state_status[sid] = True
        trace.append(("enter", sid))
        parent = c.parent_of(sid)
        if parent in c.states and c.states[parent].has_history:
            st.state_history[parent] = sid
        self._run_actions(("entry", sid), sid, st, ev, trace)
        self._enter_children(sid, st, ev, trace)
        if self.debug:
            bad = invariant_violations(c, st)
            if bad:
                raise StepError("invariant violated after entry: " + "; ".join(bad))

    def _exit_state(self, sid, st, ev, trace):
        c = self.chart
        kids = c.children(sid)
        if c.decomposition(sid) == "parallel":
            for k in reversed(kids):
                if st.state_status[k]:
                    self._exit_state(k, st, ev, trace)
        else:
            for k in kids:
                if st.state_status[k]:
                    self._exit_state(k, st, ev, trace)
                    break
        self._run_actions(("exit", sid), sid, st, ev, trace)
        st.state_status[sid] = False
        trace.append(("exit", sid))

    def _exec_children(self, scope, st, ev, trace):
        c = self.chart
        for k in c.children(scope):
            if st.state_status[k]:
                self._exec_state(k, st, ev, trace)
                if c.decomposition(scope) == "sequential":
                    break

    def _exec_state(self, sid, st, ev, trace):
        outcome = self._search(self._outer[sid], st, ev, trace, set(), context=sid)
        if outcome is not NOT_COMPLETED:
            scope = self.chart.parent_of(sid)
            self._exit_state(sid, st, ev, trace)
            self._run_actions_seq(outcome.actions, scope, st, ev, trace)
            self._enter_state(outcome.target, st, ev, trace)
            return
        outcome = self._search(self._inner[sid], st, ev, trace, set(), context=sid)
        if outcome is not NOT_COMPLETED:
            kids = self.chart.children(sid)
            for k in kids:
                if st.state_status[k]:
                    self._exit_state(k, st, ev, trace)
                    break
            self._run_actions_seq(outcome.actions, sid, st, ev, trace)
            self._enter_state(outcome.target, st, ev, trace)
            return
        self._run_actions(("during", sid), sid, st, ev, trace)
        sdef = self.chart.states[sid]
        for i, (on_ev, _) in enumerate(sdef.on_actions):
            if on_ev == ev:
                self._run_actions(("on", sid, i), sid, st, ev, trace)
        self._exec_children(sid, st, ev, trace)

    def _search(self, transitions, st, ev, trace, visited, context):
        """Depth-first path search; condition actions run en route."""
        for t in transitions:
            if t.trigger is not None and t.trigger != ev:
                continue
            if t.id in self._guards and not truthy(self._guards[t.id](st.vars)):
                continue
            self._run_actions(("ca", t.id), context, st, ev, trace)
            if t.target in self.chart.states:
                return Completed(t.target, (("ta", t.id),))
            j = t.target
            if j in visited:
                raise StepError(f"junction cycle at {j}")
            visited.add(j)
            sub = self._search(self.chart.outgoing(j), st, ev, trace, visited, context)
            if sub is not NOT_COMPLETED:
                return Completed(sub.target, (("ta", t.id),) + sub.actions)
        return NOT_COMPLETED

    # -- actions ----------------------------------------------------------

    def _run_actions_seq(self, keys, context, st, ev, trace):
        for key in keys:
            self._run_actions(key, context, st, ev, trace)

    def _run_actions(self, key, context, st, ev, trace):
        for item in self._acts[key]:
            if item[0] == "assign":
                _, target, sort, f = item
                st.vars[target] = coerce(f(st.vars), sort)
                trace.append(("action", context, target))
            else:
                evname = item[1]
                self._broadcast(evname, st, trace)
                if not st.state_status[context]:
                    trace.append(("early-return", context))
                    raise _EarlyReturn()

    def _broadcast(self, evname, st, trace):
        trace.append(("broadcast-begin", evname))
        self._depth += 1
        if self._depth > self.limit:
            raise StepError(f"broadcast divergence: depth limit {self.limit} exceeded at {evname}")
        try:
            try:
                self._execute_chart(st, evname, trace)
            except _EarlyReturn:
                pass
        finally:
            self._depth -= 1
            trace.append(("broadcast-end", evname))


# module-level helpers matching the operation names

def init_state(c: ChartDef) -> ChartDynState:
    return ChartInterp(c).init_state()


def step(c: ChartDef, s: ChartDynState, inp: StepInput, broadcast_depth_limit: int = 64) -> StepResult:
    return ChartInterp(c, broadcast_depth_limit).step(s, inp)


def run_trace(c: ChartDef, steps: list[StepInput], broadcast_depth_limit: int = 64) -> list[StepResult]:
    return ChartInterp(c, broadcast_depth_limit).run_trace(steps)
