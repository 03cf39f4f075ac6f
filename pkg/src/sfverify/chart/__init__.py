from .model import ChartDef, DataDecl, EventDecl, JunctionDef, StateDef, TransitionDef
from .parser import parse_chart, try_parse_chart
from .printer import print_chart, print_expr
from .validate import validate_chart

__all__ = [
    "ChartDef", "DataDecl", "EventDecl", "JunctionDef", "StateDef", "TransitionDef",
    "parse_chart", "try_parse_chart", "print_chart", "print_expr", "validate_chart",
]
