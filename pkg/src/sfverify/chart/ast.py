"""Expression and action AST shared by the chart language and the impl IR.

Chart-side expressions use Var; impl-side expressions use Field/Const and may
keep Var only for function parameters (tid). StructLookup/StructIdent appear
only in raw derived trees and are folded away by simplification.

All nodes are frozen; sequences are tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

COMPARE_OPS = ("<", "<=", ">", ">=", "==", "!=")
ARITH_OPS = ("+", "-", "*")


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class FloatLit:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Field:
    record: str  # DWork | B | U | Y
    name: str


@dataclass(frozen=True)
class Const:
    name: str  # resolved through a program's constant table


@dataclass(frozen=True)
class StructIdent:
    """Identifier of a chart-structure element, as a symbolic value."""

    ident: str


@dataclass(frozen=True)
class StructLookup:
    """Symbolic chart-structure lookup, e.g. the identifier field of a state."""

    ident: str
    attr: str


@dataclass(frozen=True)
class Unary:
    op: str  # '-'
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # one of ARITH_OPS or COMPARE_OPS
    left: "Expr"
    right: "Expr"


Expr = Union[IntLit, FloatLit, Var, Field, Const, StructIdent, StructLookup, Unary, Binary]


@dataclass(frozen=True)
class Assign:
    target: str
    value: Expr


@dataclass(frozen=True)
class Send:
    event: str


Action = Union[Assign, Send]


def complement(e: Expr) -> Expr:
    """Syntactic complement of a boolean-valued guard expression."""
    if isinstance(e, Binary) and e.op in COMPARE_OPS:
        flipped = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}
        return Binary(flipped[e.op], e.left, e.right)
    # C-style truthiness: the complement of a numeric guard is == 0
    return Binary("==", e, IntLit(0))


def expr_vars(e: Expr) -> set[str]:
    match e:
        case Var(name):
            return {name}
        case Unary(_, operand):
            return expr_vars(operand)
        case Binary(_, left, right):
            return expr_vars(left) | expr_vars(right)
        case _:
            return set()


def expr_fields(e: Expr) -> set[tuple[str, str]]:
    match e:
        case Field(record, name):
            return {(record, name)}
        case Unary(_, operand):
            return expr_fields(operand)
        case Binary(_, left, right):
            return expr_fields(left) | expr_fields(right)
        case _:
            return set()
