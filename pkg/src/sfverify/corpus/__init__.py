"""Bundled example charts and implementation sources."""

from importlib import resources

EXAMPLE_CHARTS = ("absolute_value", "counters", "gearbox", "heater", "alarm")

# Candidate C sources: one conforming hand-written variant and two that use
# constructs outside the accepted pattern (for exercising the reader's
# diagnostics).
C_SAMPLES = ("absolute_value_ref", "nonconforming_loop", "nonconforming_pointer")


def load_text(filename: str) -> str:
    return resources.files(__package__).joinpath(filename).read_text(encoding="utf-8")


def load_chart_text(name: str) -> str:
    if name not in EXAMPLE_CHARTS:
        raise KeyError(f"no bundled chart named {name!r} (have: {', '.join(EXAMPLE_CHARTS)})")
    return load_text(name + ".sfc")


def load_c_sample(name: str) -> str:
    if name not in C_SAMPLES:
        raise KeyError(f"no bundled C sample named {name!r} (have: {', '.join(C_SAMPLES)})")
    return load_text(name + ".c")
