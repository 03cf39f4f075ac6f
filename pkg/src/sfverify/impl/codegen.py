"""Reference code generator: chart -> step program in the standard pattern."""

from __future__ import annotations

from ..chart.model import ChartDef
from .encoding import Layout, default_layout, output_function_name
from .ir import FunctionDef, ImplProgram
from .stepbuilder import GENERATED, StepBuilder, UnsupportedFeature

__all__ = ["generate_reference", "UnsupportedFeature"]


def generate_reference(c: ChartDef, layout: Layout | None = None) -> ImplProgram:
    """Emit the program the code generator would produce for this chart.

    Raises UnsupportedFeature for charts outside the generated-code pattern
    (incomplete default paths, backtracking junctions, sends from non-final
    parallel regions, and the like).
    """
    if layout is None:
        layout = default_layout(c)
    builder = StepBuilder(c, layout, GENERATED)
    init_body, output_body, params = builder.build()
    out_name = output_function_name(c)
    functions = {
        "initialize": FunctionDef("initialize", (), init_body),
        out_name: FunctionDef(out_name, params, output_body),
    }
    return ImplProgram(
        name=c.identifier,
        dwork=layout.dwork,
        blocks=layout.blocks,
        inputs=layout.inputs,
        outputs=layout.outputs,
        constants=dict(layout.const_values),
        functions=functions,
        init_name="initialize",
        output_name=out_name,
    )
