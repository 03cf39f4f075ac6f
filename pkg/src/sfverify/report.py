"""Deterministic result rendering shared by the command-line tools.

JSON output is canonical -- sorted keys, fixed separators, trailing newline
-- so a given run configuration produces byte-identical documents no matter
the machine or the worker count.  Text output carries the same content for
human reading.  Every JSON document shares the envelope
{"schema": "sfverify/1", "command": ..., "config": ...}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .refine.cosim import CosimConfig
from .refine.pipeline import Verdict
from .retrieve import RetrieveCheck, RetrieveRelation
from .sim.state import StepInput, StepResult

SCHEMA = "sfverify/1"


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's observable result.

    Worker count is deliberately not part of this: it only spreads
    co-simulation over processes and must never change a report.
    """

    command: str
    paths: tuple[str, ...] = ()
    seed: int = 0  # 64-bit
    trace_count: int = 100
    trace_len_max: int = 20
    data_domain: tuple[int, int] = (-10, 10)
    broadcast_depth_limit: int = 64
    match_mode: str = "normalized"  # normalized | exact
    report_format: str = "text"  # text | json

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "paths": list(self.paths),
            "seed": self.seed,
            "trace_count": self.trace_count,
            "trace_len_max": self.trace_len_max,
            "data_domain": list(self.data_domain),
            "broadcast_depth_limit": self.broadcast_depth_limit,
            "match_mode": self.match_mode,
            "report_format": self.report_format,
        }

    def cosim(self, workers: int = 1) -> CosimConfig:
        return CosimConfig(
            traces=self.trace_count,
            max_steps=self.trace_len_max,
            seed=self.seed,
            domain=self.data_domain,
            workers=workers,
        )


def to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def json_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def document(cfg: RunConfig, body: dict) -> dict:
    doc = {"schema": SCHEMA, "command": cfg.command, "config": cfg.as_dict()}
    doc.update(body)
    return doc


# -- simulate ---------------------------------------------------------------


def step_record(index: int, inp: StepInput, res: StepResult) -> dict:
    """One simulation step as a JSON-lines record."""
    return {
        "step": index,
        "events": list(inp.active_events),
        "inputs": dict(inp.inputs),
        "outputs": dict(res.outputs),
        "active": sorted(k for k, v in res.state.state_status.items() if v),
        "history": dict(res.state.state_history),
        "vars": dict(res.state.vars),
        "trace": [list(t) for t in res.trace],
    }


# -- retrieve ---------------------------------------------------------------


def retrieve_text(r: RetrieveRelation, check: RetrieveCheck | None = None) -> str:
    d = r.as_dict()
    lines = [f"retrieve relation for chart {d['chart']}:"]
    lines.append("  status formulas:")
    for sid, formula in d["status"].items():
        lines.append(f"    {sid} active  <->  {formula}")
    if any(v for v in d["history"].values()):
        lines.append("  history slots:")
        for sid, slot in d["history"].items():
            if slot:
                lines.append(f"    last child of {sid} recorded in {slot}")
    elif d["history"]:
        lines.append("  history slots: none recorded")
    lines.append("  variables:")
    for v, slot in d["variables"].items():
        lines.append(f"    {v}  ->  {slot}")
    lines.append("  invariant:")
    for t in d["invariant"]:
        lines.append(f"    {t}")
    if check is not None:
        flags = ", ".join(
            name
            for name, on in (
                ("total", check.total),
                ("functional", check.functional),
                ("surjective", check.surjective),
            )
            if on
        )
        lines.append(f"  checked: {check.headline()}; {flags or 'none hold'};"
                     f" {len(check.failures)} counterexamples")
        for f in check.failures:
            lines.append(f"    counterexample: {f}")
    return "\n".join(lines) + "\n"


def retrieve_document(cfg: RunConfig, r: RetrieveRelation, check: RetrieveCheck | None) -> dict:
    body = {"relation": r.as_dict()}
    if check is not None:
        body["check"] = check.as_dict()
    return document(cfg, body)


# -- verify -----------------------------------------------------------------

_MODE_NOTE = {
    "normalized": (
        "matching is modulo normalization: constants resolved, refuted arms"
        " pruned, mutually exclusive arms may be reordered, step calls inlined"
    ),
    "exact": "matching is literal: no normalization applied",
}


def _phase_log_lines(entries) -> list[str]:
    out = []
    for phase, note, before, after in entries:
        tail = ""
        if after:
            tail = f"  [{before} -> {after}]" if before else f"  [{after}]"
        out.append(f"    {phase:24s} {note}{tail}")
    return out


def verdict_text(v: Verdict) -> str:
    lines = [f"verdict: {v.outcome}"]
    if v.nonconformance is not None:
        phase, msg = v.nonconformance
        lines.append(f"  nonconformant during {phase}:")
        for part in msg.split("; "):
            lines.append(f"    {part}")
        return "\n".join(lines) + "\n"
    lines.append(f"  mode: {v.mode} ({_MODE_NOTE.get(v.mode,v.mode)})")
    if v.matched_functions:
        lines.append("  matched functions:")
        for name, digest in v.matched_functions.items():
            lines.append(f"    {name}  [{digest}]")
    if v.first_divergence is not None:
        d = v.first_divergence
        lines.append("  first divergence:")
        lines.append(f"    at      {' / '.join(d.path)}")
        lines.append(f"    program {d.impl}")
        lines.append(f"    derived {d.derived}")
    if v.normalizations:
        lines.append("  normalization steps taken by the matcher:")
        for n in v.normalizations:
            lines.append(f"    {n}")
    if v.assumptions:
        lines.append("  assumptions (carried by co-simulation, not proven):")
        for a in v.assumptions:
            lines.append(f"    {a}")
    if v.cosim is not None:
        lines.append(f"  co-simulation: {v.cosim.headline()}")
        m = v.cosim.mismatch
        if m is not None:
            lines.append(f"    shrunk from {m.original_length} steps"
                         f" in {m.shrink_trials} trials; reproducer:")
            for i, s in enumerate(m.steps, start=1):
                ev = ",".join(s.active_events) or "-"
                vals = ", ".join(f"{k}={s.inputs[k]}" for k in sorted(s.inputs))
                lines.append(f"    step {i}: events {ev}; {vals}")
    if v.phase_log:
        lines.append("  derivation log:")
        lines.extend(_phase_log_lines(v.phase_log))
    return "\n".join(lines) + "\n"


def verify_document(cfg: RunConfig, v: Verdict) -> dict:
    return document(cfg, {"verdict": v.as_dict()})
