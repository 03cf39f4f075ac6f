"""Imperative IR for step programs.

Mirrors the architecture of generated chart code: four records (DWork for
execution state, B for block locals, U inputs, Y outputs), named integer
constants for substate codes, and functions whose bodies are assignment /
if-chain / call trees. Expressions reuse the chart AST node types; record
accesses are Field nodes and named constants are Const nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..chart.ast import Expr

UINT8 = "uint8"
INT = "int"
FLOAT = "float"


@dataclass(frozen=True)
class FieldDecl:
    name: str
    sort: str  # uint8 | int | float


@dataclass(frozen=True)
class RecordDecl:
    name: str
    fields: tuple[FieldDecl, ...]

    def sort_of(self, fname: str) -> str:
        for f in self.fields:
            if f.name == fname:
                return f.sort
        raise KeyError(f"{self.name}.{fname}")

    def has(self, fname: str) -> bool:
        return any(f.name == fname for f in self.fields)


@dataclass(frozen=True)
class SAssign:
    lhs: Expr  # Field node
    rhs: Expr


@dataclass(frozen=True)
class SIf:
    # arms of (guard, body); a None guard is a final else and may only
    # appear last. body is a tuple of statements.
    arms: tuple[tuple[Expr | None, tuple], ...]


@dataclass(frozen=True)
class SCall:
    func: str
    args: tuple[Expr, ...] = ()


Stmt = SAssign | SIf | SCall


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple[str, ...]
    body: tuple[Stmt, ...]


@dataclass(frozen=True)
class ImplProgram:
    name: str
    dwork: RecordDecl
    blocks: RecordDecl
    inputs: RecordDecl
    outputs: RecordDecl
    constants: dict[str, int]
    functions: dict[str, FunctionDef]
    init_name: str = "initialize"
    output_name: str = ""

    def record(self, rec: str) -> RecordDecl:
        return {"DWork": self.dwork, "B": self.blocks, "U": self.inputs, "Y": self.outputs}[rec]

    def field_sort(self, rec: str, fname: str) -> str:
        return self.record(rec).sort_of(fname)


RECORD_NAMES = ("DWork", "B", "U", "Y")


def walk_stmts(body: tuple):
    """Yield every statement in a body, depth first."""
    for st in body:
        yield st
        if isinstance(st, SIf):
            for _, arm_body in st.arms:
                yield from walk_stmts(arm_body)


def check_program(p: ImplProgram) -> list[str]:
    """Structural sanity: field references resolve, calls resolve, else last."""
    from ..chart.ast import Binary, Const, Field, Unary

    problems: list[str] = []

    def check_expr(e) -> None:
        match e:
            case Field(rec, fname):
                if rec not in RECORD_NAMES:
                    problems.append(f"unknown record {rec!r}")
                elif not p.record(rec).has(fname):
                    problems.append(f"undeclared field {rec}.{fname}")
            case Const(cname):
                if cname not in p.constants:
                    problems.append(f"undeclared constant {cname!r}")
            case Binary(_, l, r):
                check_expr(l)
                check_expr(r)
            case Unary(_, o):
                check_expr(o)
            case _:
                pass

    for fn in p.functions.values():
        for st in walk_stmts(fn.body):
            if isinstance(st, SAssign):
                check_expr(st.lhs)
                check_expr(st.rhs)
                if not isinstance(st.lhs, Field):
                    problems.append(f"assignment target is not a record field in {fn.name}")
            elif isinstance(st, SIf):
                for i, (g, _) in enumerate(st.arms):
                    if g is None and i != len(st.arms) - 1:
                        problems.append(f"else arm not last in {fn.name}")
                    elif g is not None:
                        check_expr(g)
            elif isinstance(st, SCall):
                if st.func not in p.functions:
                    problems.append(f"call to undefined function {st.func!r} in {fn.name}")
                for a in st.args:
                    check_expr(a)
    for entry in (p.init_name, p.output_name):
        if entry and entry not in p.functions:
            problems.append(f"missing entry point {entry!r}")
    return problems
