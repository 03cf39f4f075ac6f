"""Step kernel: a register VM over lowered impl programs.

The backend is chosen once, at import: the compiled extension when it is
built and importable, otherwise the pure-Python VM. Setting SFVERIFY_PURE=1
forces the pure backend. Both interpret the same lowered code and are held
to the tree-walking evaluator by the parity tests.
"""

from __future__ import annotations

import os
from array import array

from ..impl.interp import ImplExecError, ImplState, Machine
from ..impl.ir import ImplProgram
from ..numerics import coerce
from ..sim.state import StepInput
from .lower import CompiledCode, LoweringError, VMError, lower

if os.environ.get("SFVERIFY_PURE") == "1":
    from . import _kernel_py as _backend

    _BACKEND = "pure"
else:
    try:
        from . import _kernel_c as _backend  # type: ignore[attr-defined]

        _BACKEND = "compiled"
    except ImportError:
        from . import _kernel_py as _backend

        _BACKEND = "pure"


def backend_name() -> str:
    return _BACKEND


# Lowered code is cached per program object; the strong reference keeps the
# id from being reused while the entry lives.
_CODE_CACHE: dict[int, tuple[ImplProgram, CompiledCode]] = {}


def code_for(p: ImplProgram) -> CompiledCode:
    hit = _CODE_CACHE.get(id(p))
    if hit is not None and hit[0] is p:
        return hit[1]
    cc = lower(p)
    if len(_CODE_CACHE) >= 64:
        _CODE_CACHE.clear()
    _CODE_CACHE[id(p)] = (p, cc)
    return cc


class KernelMachine:
    """Drop-in for impl.interp.Machine, executing lowered code."""

    def __init__(self, program: ImplProgram, call_depth_limit: int = 256):
        self.p = program
        self.cc = code_for(program)
        self.limit = call_depth_limit
        cc = self.cc
        self.isl = array("q", bytes(8 * max(len(cc.int_slots), 1)))
        self.fsl = array("d", bytes(8 * max(len(cc.float_slots), 1)))
        self._in_slot: dict[str, tuple[str, int]] = {}
        for name in (f.name for f in program.inputs.fields):
            key = ("U", name)
            if key in cc.fslot_of:
                self._in_slot[name] = ("f", cc.fslot_of[key])
            else:
                self._in_slot[name] = ("i", cc.islot_of[key])
        self._y_slots = []
        for f in program.outputs.fields:
            key = ("Y", f.name)
            if key in cc.fslot_of:
                self._y_slots.append((f.name, "f", cc.fslot_of[key]))
            else:
                self._y_slots.append((f.name, "i", cc.islot_of[key]))
        self._out_fidx = cc.fn_index[program.output_name]
        self._out_params = cc.functions[self._out_fidx][2]

    @property
    def state(self) -> ImplState:
        st = ImplState()
        for i, (rec, name) in enumerate(self.cc.int_slots):
            if rec != "(param)":
                st.record(rec)[name] = self.isl[i]
        for i, (rec, name) in enumerate(self.cc.float_slots):
            st.record(rec)[name] = self.fsl[i]
        return st

    def _run(self, fidx: int) -> None:
        cc = self.cc
        try:
            _backend.run(
                cc.code, cc.fpool, cc.functions, fidx,
                self.isl, self.fsl, cc.n_iregs, cc.n_fregs, self.limit,
            )
        except VMError as e:
            raise ImplExecError(str(e)) from None

    def initialize(self) -> None:
        self._run(self.cc.fn_index[self.p.init_name])

    def output(self, tid: int | None) -> None:
        if self._out_params:
            self.isl[self._out_params[0]] = 0 if tid is None else tid
        elif tid:
            raise ImplExecError("step function takes no event id but an event is active")
        self._run(self._out_fidx)

    def step(self, inp: StepInput, event_ids: dict[str, int]) -> dict[str, float | int]:
        for name, val in inp.inputs.items():
            slot = self._in_slot.get(name)
            if slot is None:
                raise ImplExecError(f"not an input field: {name}")
            kind, idx = slot
            if kind == "f":
                self.fsl[idx] = float(val)
            else:
                self.isl[idx] = coerce(val, "int")
        ids = []
        for ev in inp.active_events:
            if ev not in event_ids:
                raise ImplExecError(f"unknown event {ev!r}")
            ids.append(event_ids[ev])
        ids.sort()
        for tid in ids or [None]:
            self.output(tid)
        return {
            name: (self.fsl[idx] if kind == "f" else self.isl[idx])
            for name, kind, idx in self._y_slots
        }


def machine_for(p: ImplProgram):
    """Best available runner: lowered code when the program fits the
    instruction set, else the tree-walking evaluator."""
    try:
        return KernelMachine(p)
    except LoweringError:
        return Machine(p)


__all__ = [
    "CompiledCode",
    "KernelMachine",
    "LoweringError",
    "VMError",
    "backend_name",
    "code_for",
    "lower",
    "machine_for",
]
