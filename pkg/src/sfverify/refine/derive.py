"""Derivation of the normal-form step program a chart refines to.

`derive_step` re-expresses the chart's execution over the program state
named by a retrieve relation: one initialize body and one output body in
which every conditional is an explicit binary alternative, parallel
regions run in declaration order, and local-event broadcasts are inlined
copies of the step itself.  The result deliberately over-spells its
control structure; `simplify` is what brings it to the shape generated
code actually has.

Every stage appends to ``phase_log``: emission records what was encoded
(empty before-digest, since there is no earlier tree), and each later
rewrite records the whole-tree digests it moved between.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..chart.model import ChartDef
from ..impl.encoding import Layout, output_function_name
from ..impl.ir import FunctionDef, ImplProgram
from ..impl.stepbuilder import DERIVED, StepBuilder
from ..retrieve import RetrieveRelation
from . import rules

PhaseEntry = tuple[str, str, str, str]  # (phase, transformation, before, after)


@dataclass(frozen=True)
class DerivedProgram:
    chart: ChartDef
    layout: Layout
    init: tuple
    step_body: tuple
    params: tuple[str, ...]
    phase_log: tuple[PhaseEntry, ...]

    @property
    def constants(self) -> dict[str, int]:
        return self.layout.const_values

    @property
    def output_name(self) -> str:
        return output_function_name(self.chart)

    def to_program(self) -> ImplProgram:
        """Package as an executable program (the derived tree has no calls
        left in it, so it runs on the plain evaluator as-is)."""
        out_name = self.output_name
        return ImplProgram(
            name=self.chart.identifier,
            dwork=self.layout.dwork,
            blocks=self.layout.blocks,
            inputs=self.layout.inputs,
            outputs=self.layout.outputs,
            constants=dict(self.layout.const_values),
            functions={
                "initialize": FunctionDef("initialize", (), self.init),
                out_name: FunctionDef(out_name, self.params, self.step_body),
            },
            output_name=out_name,
        )

    def with_body(self, body: tuple, entry: PhaseEntry) -> "DerivedProgram":
        return replace(self, step_body=body, phase_log=self.phase_log + (entry,))


def derive_step(c: ChartDef, r: RetrieveRelation) -> DerivedProgram:
    builder = StepBuilder(c, r.layout, DERIVED)
    init, body, params = builder.build()
    emitted = rules.digest(body)
    log = tuple((phase, what, "", emitted) for phase, what in builder.notes)
    return DerivedProgram(
        chart=c,
        layout=r.layout,
        init=init,
        step_body=body,
        params=params,
        phase_log=log,
    )
