"""Benchmark: tree-walking evaluator vs the two step-kernel backends.

Runs the same seeded traces through impl.interp.Machine, the pure-Python
register VM, and (when built) the compiled one, then repeats the full
co-simulation loop with each runner. Usage:

    python3 benchmarks/bench_kernel.py [chart ...]
"""

from __future__ import annotations

import sys
import time
from contextlib import contextmanager

from sfverify import kernel
from sfverify.chart.parser import parse_chart
from sfverify.corpus import EXAMPLE_CHARTS, load_chart_text
from sfverify.impl.codegen import generate_reference
from sfverify.impl.interp import Machine
from sfverify.kernel import KernelMachine, _kernel_py
from sfverify.refine.cosim import CosimConfig, cosimulate, make_trace
from sfverify.retrieve import synthesize

TRACES = 200
MAX_STEPS = 100


@contextmanager
def forced_backend(mod):
    prev = kernel._backend
    kernel._backend = mod
    try:
        yield
    finally:
        kernel._backend = prev


def bench_steps(factory, p, traces, ids) -> tuple[int, float]:
    t0 = time.perf_counter()
    n = 0
    for tr in traces:
        m = factory(p)
        m.initialize()
        for inp in tr:
            m.step(inp, ids)
            n += 1
    return n, time.perf_counter() - t0


def main() -> None:
    names = sys.argv[1:] or list(EXAMPLE_CHARTS)
    compiled = kernel.backend_name() == "compiled"
    if not compiled:
        print("note: compiled backend not built; showing pure VM only\n")

    rows = []
    for name in names:
        chart = parse_chart(load_chart_text(name))
        p = generate_reference(chart)
        r = synthesize(chart, p)
        ids = {e.name: chart.event_id(e.name) for e in chart.events if e.kind == "input"}
        cfg = CosimConfig(traces=TRACES, max_steps=MAX_STEPS)
        traces = [make_trace(chart, cfg, i) for i in range(TRACES)]

        n, t_tree = bench_steps(Machine, p, traces, ids)
        with forced_backend(_kernel_py):
            _, t_pure = bench_steps(KernelMachine, p, traces, ids)
        t_comp = None
        if compiled:
            _, t_comp = bench_steps(KernelMachine, p, traces, ids)

        t0 = time.perf_counter()
        rep = cosimulate(chart, p, r, cfg, machine_factory=kernel.machine_for)
        t_cosim = time.perf_counter() - t0
        assert rep.ok, f"{name}: reference must co-simulate clean"
        rows.append((name, n, t_tree, t_pure, t_comp, t_cosim))

    print(f"{'chart':<16} {'steps':>7} {'tree':>10} {'pure VM':>10} {'compiled':>10} {'cosim':>9}")
    for name, n, t_tree, t_pure, t_comp, t_cosim in rows:
        def rate(t):
            return f"{n / t / 1000:7.0f}k/s" if t else f"{'—':>9}"

        print(f"{name:<16} {n:>7} {rate(t_tree)} {rate(t_pure)} {rate(t_comp)} {t_cosim:>8.2f}s")
    if compiled:
        tot_tree = sum(r[2] for r in rows)
        tot_comp = sum(r[4] for r in rows)
        print(f"\ncompiled kernel speedup over tree walker: {tot_tree / tot_comp:.1f}x")


if __name__ == "__main__":
    main()
