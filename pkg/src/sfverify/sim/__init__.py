from .interp import ChartInterp, StepError, init_state, run_trace, step
from .state import ChartDynState, StepInput, StepResult, invariant_violations
from .traces import format_trace, parse_trace

__all__ = [
    "ChartDynState",
    "ChartInterp",
    "StepError",
    "StepInput",
    "StepResult",
    "format_trace",
    "init_state",
    "invariant_violations",
    "parse_trace",
    "run_trace",
    "step",
]
