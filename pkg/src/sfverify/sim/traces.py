"""Plain-text step traces.

One line per step. Each line is a space-separated list of bindings:

    events=tick,tock u=5.0 delta=3

`events=` names the active input events for that step (comma separated, no
spaces); every other binding assigns an input variable. A bare `events=`
or an absent events binding means no events. Blank lines and `#` comments
are ignored.
"""

from __future__ import annotations

from ..diagnostics import SourceError
from .state import StepInput


def parse_trace(text: str) -> list[StepInput]:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        events: tuple[str, ...] = ()
        inputs = {}
        for part in line.split():
            if "=" not in part:
                raise SourceError.at(f"expected name=value, got {part!r}", lineno, raw.index(part) + 1)
            name, _, val = part.partition("=")
            if name == "events":
                events = tuple(e for e in val.split(",") if e)
                continue
            try:
                inputs[name] = int(val)
            except ValueError:
                try:
                    inputs[name] = float(val)
                except ValueError:
                    raise SourceError.at(f"bad numeric value {val!r} for {name}", lineno, raw.index(part) + 1) from None
        steps.append(StepInput(active_events=events, inputs=inputs))
    return steps


def format_trace(steps: list[StepInput]) -> str:
    lines = []
    for s in steps:
        parts = []
        if s.active_events:
            parts.append("events=" + ",".join(s.active_events))
        for name, val in s.inputs.items():
            parts.append(f"{name}={val!r}" if isinstance(val, float) else f"{name}={val}")
        lines.append(" ".join(parts) if parts else "events=")
    return "\n".join(lines) + "\n"
