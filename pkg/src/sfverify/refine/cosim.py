"""Random co-simulation of a chart against an implementation program.

Each trace is generated from its own seed, derived from the run seed and
the trace index alone, so results do not depend on scheduling. The chart
interpreter and the program run in lockstep; after every step the program
state is read back through the retrieve relation and compared with the
chart configuration, and the output records are compared directly.

A failing trace is shrunk before it is reported: truncated to the prefix
ending at the diverging step, then whole steps are deleted and each input
value is walked toward zero, as long as some divergence persists.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ..chart.model import ChartDef
from ..impl.interp import ImplExecError, Machine
from ..impl.ir import ImplProgram
from ..retrieve import RetrieveError, RetrieveRelation, abstract
from ..sim.interp import ChartInterp
from ..sim.state import ChartDynState, StepInput

_MIX = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class CosimConfig:
    traces: int = 100
    max_steps: int = 20
    seed: int = 0
    domain: tuple[int, int] = (-10, 10)
    workers: int = 1


@dataclass(frozen=True)
class TraceMismatch:
    trace_index: int
    step: int
    kind: str  # 'outputs' | 'state' | 'invariant' | 'impl-error'
    detail: str
    steps: tuple[StepInput, ...]
    original_length: int
    shrink_trials: int

    def as_dict(self) -> dict:
        return {
            "trace": self.trace_index,
            "step": self.step,
            "kind": self.kind,
            "detail": self.detail,
            "reproducer": [
                {"events": list(s.active_events), "inputs": {k: s.inputs[k] for k in sorted(s.inputs)}}
                for s in self.steps
            ],
            "original_length": self.original_length,
            "shrink_trials": self.shrink_trials,
        }


@dataclass(frozen=True)
class CosimReport:
    traces: int
    steps_run: int
    seed: int
    mismatch: TraceMismatch | None

    @property
    def ok(self) -> bool:
        return self.mismatch is None

    def headline(self) -> str:
        if self.ok:
            return f"co-simulated {self.traces} traces ({self.steps_run} steps): agree"
        m = self.mismatch
        return f"trace {m.trace_index} diverges at step {m.step} ({m.kind}): {m.detail}"

    def as_dict(self) -> dict:
        return {
            "traces": self.traces,
            "steps_run": self.steps_run,
            "seed": self.seed,
            "agree": self.ok,
            "mismatch": None if self.ok else self.mismatch.as_dict(),
        }


def trace_seed(seed: int, index: int) -> int:
    return (seed * _MIX + index) & _MASK


def _draw(rng: random.Random, lo: int, hi: int, sort: str):
    if rng.random() < 0.5:
        v = rng.randint(lo, hi)
    else:
        v = min(hi, max(lo, rng.choice((0, 1, -1, lo, hi, lo + 1, hi - 1))))
    if sort == "float":
        f = float(v)
        if rng.random() < 0.25:
            f += rng.choice((-0.5, 0.5))
        return min(float(hi), max(float(lo), f))
    return v


def draw_step(c: ChartDef, rng: random.Random, cfg: CosimConfig) -> StepInput:
    """One random step input: mostly one event (when the chart has any),
    sometimes none or two, and a value for every data input."""
    lo, hi = cfg.domain
    events = [e.name for e in c.events if e.kind == "input"]
    active: tuple[str, ...] = ()
    if events:
        r = rng.random()
        if r < 0.2:
            active = ()
        elif r < 0.9 or len(events) == 1:
            active = (rng.choice(events),)
        else:
            active = tuple(rng.sample(events, 2))
    inputs = {n: _draw(rng, lo, hi, c.data_decl(n).sort) for n in c.data_names("input")}
    return StepInput(active_events=active, inputs=inputs)


def make_trace(c: ChartDef, cfg: CosimConfig, index: int) -> list[StepInput]:
    rng = random.Random(trace_seed(cfg.seed, index))
    return [draw_step(c, rng, cfg) for _ in range(rng.randint(1, cfg.max_steps))]


def trace_length(c: ChartDef, cfg: CosimConfig, index: int) -> int:
    """Length of trace `index` without materialising it (same draws)."""
    return random.Random(trace_seed(cfg.seed, index)).randint(1, cfg.max_steps)


def _fmt(d: dict) -> str:
    return "{" + ", ".join(f"{k}: {d[k]}" for k in sorted(d)) + "}"


def _state_diff(chart_side: ChartDynState, impl_side: ChartDynState) -> str:
    parts = []
    for sid in chart_side.state_status:
        a, b = chart_side.state_status[sid], impl_side.state_status.get(sid)
        if a != b:
            parts.append(f"{sid}: chart {'active' if a else 'inactive'}, program {'active' if b else 'inactive'}")
    hist = set(chart_side.state_history) | set(impl_side.state_history)
    for sid in sorted(hist):
        a, b = chart_side.state_history.get(sid), impl_side.state_history.get(sid)
        if a != b:
            parts.append(f"history of {sid}: chart {a}, program {b}")
    for name in sorted(chart_side.vars):
        a, b = chart_side.vars[name], impl_side.vars.get(name)
        if a != b:
            parts.append(f"{name}: chart {a}, program {b}")
    return "; ".join(parts) or "states differ"


class _Lockstep:
    """Runs traces for one (chart, program, relation) triple."""

    def __init__(self, c: ChartDef, p: ImplProgram, r: RetrieveRelation, machine_factory=Machine):
        self.c = c
        self.p = p
        self.r = r
        self.factory = machine_factory
        self.interp = ChartInterp(c)
        self.event_ids = {e.name: c.event_id(e.name) for e in c.events if e.kind == "input"}

    def first_divergence(self, steps: list[StepInput]) -> tuple[int, str, str] | None:
        """(step number, kind, detail) of the first disagreement, else None."""
        m = self.factory(self.p)
        m.initialize()
        st = self.interp.init_state()
        for i, inp in enumerate(steps, start=1):
            res = self.interp.step(st, inp)
            st = res.state
            try:
                y = m.step(inp, self.event_ids)
            except ImplExecError as e:
                return i, "impl-error", str(e)
            if y != res.outputs:
                return i, "outputs", f"chart {_fmt(res.outputs)}, program {_fmt(y)}"
            try:
                back = abstract(self.r, m.state)
            except RetrieveError as e:
                return i, "invariant", str(e)
            if back != st:
                return i, "state", _state_diff(st, back)
        return None

    def shrink(self, steps: list[StepInput], first: tuple[int, str, str]) -> tuple[list[StepInput], tuple[int, str, str], int]:
        """Shorter/smaller reproducer: truncate to the failing prefix, delete
        whole steps, and walk each input value toward zero, as long as the
        run still diverges somewhere."""
        trials = 0
        cur = steps[: first[0]]
        got = self.first_divergence(cur)
        trials += 1
        if got is None:  # defensive: keep the original if truncation "fixed" it
            return steps, first, trials
        first = got
        cur = cur[: first[0]]
        changed = True
        while changed and trials < 400:
            changed = False
            # drop filler steps first: the divergence may land anywhere in
            # the shortened run, so re-truncate to wherever it shows up
            i = 0
            while i < len(cur) and trials < 400:
                trial = cur[:i] + cur[i + 1 :]
                got = self.first_divergence(trial)
                trials += 1
                if got is None:
                    i += 1
                    continue
                first = got
                cur = trial[: got[0]]
                changed = True
            i = 0
            while i < len(cur):
                inp = cur[i]
                for name in sorted(inp.inputs):
                    v = inp.inputs[name]
                    while v != 0 and trials < 400:
                        cand = type(v)(0) if abs(v) <= 1 else type(v)(v / 2)
                        trial = list(cur)
                        trial[i] = StepInput(inp.active_events, {**inp.inputs, name: cand})
                        got = self.first_divergence(trial)
                        trials += 1
                        if got is None:
                            break
                        # changing step i affects nothing before step i, so the
                        # divergence only ever moves to i+1 or later
                        first = got
                        cur = trial[: got[0]]
                        inp = cur[i]
                        v = cand
                        changed = True
                i += 1
        return cur, first, trials


def _scan(c: ChartDef, p: ImplProgram, r: RetrieveRelation, cfg: CosimConfig,
          indices: range, machine_factory=Machine) -> tuple[int, tuple[int, str, str]] | None:
    """First failing trace index in `indices`, with its divergence."""
    runner = _Lockstep(c, p, r, machine_factory)
    for idx in indices:
        got = runner.first_divergence(make_trace(c, cfg, idx))
        if got is not None:
            return idx, got
    return None


def cosimulate(c: ChartDef, p: ImplProgram, r: RetrieveRelation,
               cfg: CosimConfig = CosimConfig(), machine_factory=Machine) -> CosimReport:
    """Compare chart and program on cfg.traces random traces.

    The report is identical for any worker count: trace inputs depend only
    on (seed, index), the reported failure is the lowest failing index, and
    the step count is reconstructed from trace lengths rather than from
    whatever partial work other workers happened to do.
    """
    hit: tuple[int, tuple[int, str, str]] | None = None
    if cfg.workers <= 1 or cfg.traces < 4:
        hit = _scan(c, p, r, cfg, range(cfg.traces), machine_factory)
    else:
        n = min(cfg.workers, cfg.traces)
        with ProcessPoolExecutor(max_workers=n) as pool:
            futs = [
                pool.submit(_scan, c, p, r, cfg, range(w, cfg.traces, n), machine_factory)
                for w in range(n)
            ]
            results = [f.result() for f in futs]
        hits = [h for h in results if h is not None]
        if hits:
            hit = min(hits, key=lambda h: h[0])

    if hit is None:
        total = sum(trace_length(c, cfg, i) for i in range(cfg.traces))
        return CosimReport(cfg.traces, total, cfg.seed, None)

    idx, first = hit
    steps_run = sum(trace_length(c, cfg, i) for i in range(idx)) + first[0]
    runner = _Lockstep(c, p, r, machine_factory)
    full = make_trace(c, cfg, idx)
    shrunk, first, trials = runner.shrink(full, first)
    mism = TraceMismatch(
        trace_index=idx,
        step=first[0],
        kind=first[1],
        detail=first[2],
        steps=tuple(shrunk),
        original_length=len(full),
        shrink_trials=trials,
    )
    return CosimReport(cfg.traces, steps_run, cfg.seed, mism)
