"""Reference evaluator for impl programs and derived statement trees.

Walks the statement tree directly. Slow but obviously faithful; the
register-VM kernel is checked against this.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..chart.ast import Binary, Const, Field, FloatLit, IntLit, StructIdent, StructLookup, Unary, Var
from ..numerics import coerce, promote_pair, sat_add, sat_mul, sat_neg, sat_sub, truthy
from ..sim.state import StepInput
from .ir import FLOAT, ImplProgram, RecordDecl, SAssign, SCall, SIf


class ImplExecError(Exception):
    pass


@dataclass
class ImplState:
    dwork: dict[str, float | int] = field(default_factory=dict)
    blocks: dict[str, float | int] = field(default_factory=dict)
    inputs: dict[str, float | int] = field(default_factory=dict)
    outputs: dict[str, float | int] = field(default_factory=dict)

    def record(self, rec: str) -> dict:
        return {"DWork": self.dwork, "B": self.blocks, "U": self.inputs, "Y": self.outputs}[rec]

    def copy(self) -> "ImplState":
        return ImplState(dict(self.dwork), dict(self.blocks), dict(self.inputs), dict(self.outputs))


def zero_state(records: dict[str, RecordDecl]) -> ImplState:
    st = ImplState()
    for rec_name, rec in records.items():
        d = st.record(rec_name)
        for f in rec.fields:
            d[f.name] = 0.0 if f.sort == FLOAT else 0
    return st


def eval_expr(e, st: ImplState, constants: dict[str, int], env: dict[str, int]):
    match e:
        case IntLit(v):
            return v
        case FloatLit(v):
            return v
        case Field(rec, fname):
            try:
                return st.record(rec)[fname]
            except KeyError:
                raise ImplExecError(f"read of undeclared field {rec}.{fname}") from None
        case Const(cname):
            try:
                return constants[cname]
            except KeyError:
                raise ImplExecError(f"undefined constant {cname}") from None
        case Var(name):
            try:
                return env[name]
            except KeyError:
                raise ImplExecError(f"unbound variable {name}") from None
        case StructIdent(ident):
            return ident
        case StructLookup(ident, attr):
            if attr == "identifier":
                return ident
            raise ImplExecError(f"unknown structure attribute {attr!r}")
        case Unary("-", operand):
            v = eval_expr(operand, st, constants, env)
            return sat_neg(v) if isinstance(v, int) else -v
        case Binary(op, left, right):
            if op == "and":
                return 1 if truthy(eval_expr(left, st, constants, env)) and truthy(eval_expr(right, st, constants, env)) else 0
            if op == "or":
                return 1 if truthy(eval_expr(left, st, constants, env)) or truthy(eval_expr(right, st, constants, env)) else 0
            a = eval_expr(left, st, constants, env)
            b = eval_expr(right, st, constants, env)
            if op in ("+", "-", "*"):
                if isinstance(a, int) and isinstance(b, int):
                    return {"+": sat_add, "-": sat_sub, "*": sat_mul}[op](a, b)
                return {"+": lambda x, y: x + y, "-": lambda x, y: x - y, "*": lambda x, y: x * y}[op](float(a), float(b))
            a, b = promote_pair(a, b)
            r = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "==": a == b, "!=": a != b}[op]
            return 1 if r else 0
    raise ImplExecError(f"cannot evaluate {e!r}")


class Machine:
    """Executes an ImplProgram: initialize once, then output per event."""

    def __init__(self, program: ImplProgram, call_depth_limit: int = 256):
        self.p = program
        self.limit = call_depth_limit
        self.records = {
            "DWork": program.dwork,
            "B": program.blocks,
            "U": program.inputs,
            "Y": program.outputs,
        }
        self.state = zero_state(self.records)

    def _exec(self, body: tuple, env: dict[str, int], depth: int) -> None:
        if depth > self.limit:
            raise ImplExecError(f"call depth limit {self.limit} exceeded")
        st = self.state
        consts = self.p.constants
        for stmt in body:
            if isinstance(stmt, SAssign):
                rec, fname = stmt.lhs.record, stmt.lhs.name
                sort = self.records[rec].sort_of(fname)
                val = eval_expr(stmt.rhs, st, consts, env)
                if sort == FLOAT:
                    st.record(rec)[fname] = float(val)
                else:
                    st.record(rec)[fname] = coerce(val, "int")
            elif isinstance(stmt, SIf):
                for g, arm in stmt.arms:
                    if g is None or truthy(eval_expr(g, st, consts, env)):
                        self._exec(arm, env, depth)
                        break
            elif isinstance(stmt, SCall):
                fn = self.p.functions.get(stmt.func)
                if fn is None:
                    raise ImplExecError(f"call to undefined function {stmt.func!r}")
                args = [eval_expr(a, st, consts, env) for a in stmt.args]
                self._exec(fn.body, dict(zip(fn.params, args)), depth + 1)
            else:
                raise ImplExecError(f"not a statement: {stmt!r}")

    def initialize(self) -> None:
        fn = self.p.functions[self.p.init_name]
        self._exec(fn.body, {}, 0)

    def output(self, tid: int | None) -> None:
        fn = self.p.functions[self.p.output_name]
        if fn.params:
            self._exec(fn.body, {fn.params[0]: 0 if tid is None else tid}, 0)
        else:
            if tid:
                raise ImplExecError("step function takes no event id but an event is active")
            self._exec(fn.body, {}, 0)

    def step(self, inp: StepInput, event_ids: dict[str, int]) -> dict[str, float | int]:
        for name, val in inp.inputs.items():
            if not self.p.inputs.has(name):
                raise ImplExecError(f"not an input field: {name}")
            sort = self.p.inputs.sort_of(name)
            self.state.inputs[name] = float(val) if sort == FLOAT else coerce(val, "int")
        ids = []
        for ev in inp.active_events:
            if ev not in event_ids:
                raise ImplExecError(f"unknown event {ev!r}")
            ids.append(event_ids[ev])
        ids.sort()
        for tid in ids or [None]:
            self.output(tid)
        return dict(self.state.outputs)


def run_impl(
    p: ImplProgram,
    steps: list[StepInput],
    event_ids: dict[str, int] | None = None,
) -> list[tuple[ImplState, dict[str, float | int]]]:
    m = Machine(p)
    m.initialize()
    out = []
    for i, inp in enumerate(steps):
        try:
            y = m.step(inp, event_ids or {})
        except ImplExecError as e:
            raise ImplExecError(f"step {i + 1}: {e}") from e
        out.append((m.state.copy(), y))
    return out
