"""Lowering of impl programs to flat register code.

Both step kernels (the pure-Python VM and the compiled one) interpret the
same encoding: one int64 array holding 4 words per instruction — opcode,
then three operands — plus a float pool for float literals. Record fields
live in two slot arrays (int64 / float64) in declaration order; function
parameters get dedicated int slots that calls save and restore, so the
self-call a local event broadcast compiles to is safe.

Expression sorts are static (field declarations fix them), so the lowering
picks int or float opcodes at compile time; the arithmetic model is the
shared one from `numerics` — saturating int64, IEEE float64, C-style
truthiness and truncation.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from ..chart.ast import Binary, Const, Field, FloatLit, IntLit, Unary, Var
from ..impl.ir import FLOAT, ImplProgram, RECORD_NAMES, SAssign, SCall, SIf


class LoweringError(Exception):
    pass


class VMError(Exception):
    """Raised by a step kernel for runtime faults (call depth, bad code)."""


# opcode, a, b, c
OPS = {
    "RET": 0,
    "LDI": 1,  # ireg[a] = b (immediate)
    "LDF": 2,  # freg[a] = fpool[b]
    "LDS": 3,  # ireg[a] = islot[b]
    "STS": 4,  # islot[a] = ireg[b]
    "LDSF": 5,  # freg[a] = fslot[b]
    "STSF": 6,  # fslot[a] = freg[b]
    "MOVI": 7,  # ireg[a] = ireg[b]
    "ADD": 8,  # ireg[a] = sat(ireg[b] + ireg[c])
    "SUB": 9,
    "MUL": 10,
    "NEG": 11,  # ireg[a] = sat(-ireg[b])
    "FADD": 12,  # freg[a] = freg[b] + freg[c]
    "FSUB": 13,
    "FMUL": 14,
    "FNEG": 15,
    "I2F": 16,  # freg[a] = float(ireg[b])
    "TRUNC": 17,  # ireg[a] = trunc-toward-zero(freg[b]), saturated, NaN -> 0
    "CLT": 18,  # ireg[a] = ireg[b] < ireg[c]
    "CLE": 19,
    "CGT": 20,
    "CGE": 21,
    "CEQ": 22,
    "CNE": 23,
    "FCLT": 24,  # ireg[a] = freg[b] < freg[c]
    "FCLE": 25,
    "FCGT": 26,
    "FCGE": 27,
    "FCEQ": 28,
    "FCNE": 29,
    "BOOL": 30,  # ireg[a] = ireg[b] != 0
    "FBOOL": 31,  # ireg[a] = freg[b] != 0.0
    "ANDB": 32,  # ireg[a] = ireg[b] & ireg[c]   (operands already 0/1)
    "ORB": 33,
    "JZ": 34,  # if ireg[a] == 0: pc = b
    "JMP": 35,  # pc = a
    "CALL": 36,  # call functions[a], args in ireg[b : b + c]
}

_ICMP = {"<": "CLT", "<=": "CLE", ">": "CGT", ">=": "CGE", "==": "CEQ", "!=": "CNE"}
_FCMP = {"<": "FCLT", "<=": "FCLE", ">": "FCGT", ">=": "FCGE", "==": "FCEQ", "!=": "FCNE"}
_IARITH = {"+": "ADD", "-": "SUB", "*": "MUL"}
_FARITH = {"+": "FADD", "-": "FSUB", "*": "FMUL"}


@dataclass(frozen=True)
class CompiledCode:
    program_name: str
    code: array  # array('q'), 4 words per instruction
    fpool: array  # array('d')
    int_slots: tuple[tuple[str, str], ...]  # slot index -> (record, field)
    float_slots: tuple[tuple[str, str], ...]
    islot_of: dict[tuple[str, str], int]
    fslot_of: dict[tuple[str, str], int]
    functions: tuple[tuple[str, int, tuple[int, ...]], ...]  # (name, entry pc, param slots)
    fn_index: dict[str, int]
    n_iregs: int
    n_fregs: int

    @property
    def n_instr(self) -> int:
        return len(self.code) // 4


class _FnCompiler:
    def __init__(self, lowerer: "_Lowerer", params: dict[str, int]):
        self.lo = lowerer
        self.params = params  # param name -> int slot
        self.itop = 0
        self.ftop = 0

    def ireg(self) -> int:
        r = self.itop
        self.itop += 1
        self.lo.n_iregs = max(self.lo.n_iregs, self.itop)
        return r

    def freg(self) -> int:
        r = self.ftop
        self.ftop += 1
        self.lo.n_fregs = max(self.lo.n_fregs, self.ftop)
        return r

    def expr(self, e) -> tuple[str, int]:
        """Compile e; returns ('int'|'float', register index)."""
        lo = self.lo
        match e:
            case IntLit(v):
                r = self.ireg()
                lo.emit("LDI", r, v)
                return "int", r
            case FloatLit(v):
                fr = self.freg()
                lo.emit("LDF", fr, lo.fconst(v))
                return "float", fr
            case Const(name):
                try:
                    v = lo.p.constants[name]
                except KeyError:
                    raise LoweringError(f"undefined constant {name}") from None
                r = self.ireg()
                lo.emit("LDI", r, v)
                return "int", r
            case Var(name):
                if name not in self.params:
                    raise LoweringError(f"unbound variable {name}")
                r = self.ireg()
                lo.emit("LDS", r, self.params[name])
                return "int", r
            case Field(rec, fname):
                key = (rec, fname)
                if key in lo.fslot_of:
                    fr = self.freg()
                    lo.emit("LDSF", fr, lo.fslot_of[key])
                    return "float", fr
                if key in lo.islot_of:
                    r = self.ireg()
                    lo.emit("LDS", r, lo.islot_of[key])
                    return "int", r
                raise LoweringError(f"undeclared field {rec}.{fname}")
            case Unary("-", operand):
                kind, r = self.expr(operand)
                lo.emit("NEG" if kind == "int" else "FNEG", r, r)
                return kind, r
            case Binary(op, left, right) if op in ("and", "or"):
                ra = self.as_bool(left)
                rb = self.as_bool(right)
                lo.emit("ANDB" if op == "and" else "ORB", ra, ra, rb)
                return "int", ra
            case Binary(op, left, right) if op in _IARITH:
                ka, ra = self.expr(left)
                kb, rb = self.expr(right)
                if ka == "int" and kb == "int":
                    lo.emit(_IARITH[op], ra, ra, rb)
                    return "int", ra
                fa = self.to_float(ka, ra)
                fb = self.to_float(kb, rb)
                lo.emit(_FARITH[op], fa, fa, fb)
                return "float", fa
            case Binary(op, left, right) if op in _ICMP:
                ka, ra = self.expr(left)
                kb, rb = self.expr(right)
                out = self.ireg()
                if ka == "int" and kb == "int":
                    lo.emit(_ICMP[op], out, ra, rb)
                else:
                    fa = self.to_float(ka, ra)
                    fb = self.to_float(kb, rb)
                    lo.emit(_FCMP[op], out, fa, fb)
                return "int", out
        raise LoweringError(f"cannot lower expression {e!r}")

    def to_float(self, kind: str, r: int) -> int:
        if kind == "float":
            return r
        fr = self.freg()
        self.lo.emit("I2F", fr, r)
        return fr

    def as_bool(self, e) -> int:
        kind, r = self.expr(e)
        if kind == "float":
            out = self.ireg()
            self.lo.emit("FBOOL", out, r)
            return out
        self.lo.emit("BOOL", r, r)
        return r

    def stmts(self, body: tuple) -> None:
        for st in body:
            itop, ftop = self.itop, self.ftop
            self.stmt(st)
            self.itop, self.ftop = itop, ftop  # registers never live across statements

    def stmt(self, st) -> None:
        lo = self.lo
        if isinstance(st, SAssign):
            rec, fname = st.lhs.record, st.lhs.name
            key = (rec, fname)
            kind, r = self.expr(st.rhs)
            if key in lo.fslot_of:
                lo.emit("STSF", lo.fslot_of[key], self.to_float(kind, r))
            elif key in lo.islot_of:
                if kind == "float":
                    out = self.ireg()
                    lo.emit("TRUNC", out, r)
                    r = out
                lo.emit("STS", lo.islot_of[key], r)
            else:
                raise LoweringError(f"assignment to undeclared field {rec}.{fname}")
        elif isinstance(st, SCall):
            if st.func not in lo.fn_order:
                raise LoweringError(f"call to undefined function {st.func!r}")
            if len(st.args) != len(lo.p.functions[st.func].params):
                raise LoweringError(
                    f"call to {st.func} passes {len(st.args)} arguments for "
                    f"{len(lo.p.functions[st.func].params)} parameters"
                )
            n = len(st.args)
            base = self.itop
            for _ in range(n):
                self.ireg()  # reserve a contiguous block for the arguments
            for i, a in enumerate(st.args):
                kind, r = self.expr(a)
                if kind != "int":
                    raise LoweringError(f"non-integer argument in call to {st.func}")
                lo.emit("MOVI", base + i, r)
            lo.emit("CALL", lo.fn_order.index(st.func), base, n)
        elif isinstance(st, SIf):
            end_jumps = []
            for gi, (guard, arm) in enumerate(st.arms):
                if guard is None:
                    self.stmts(arm)
                    break
                r = self.as_bool(guard)
                jz_at = lo.emit("JZ", r, 0)
                self.stmts(arm)
                if gi != len(st.arms) - 1:
                    end_jumps.append(lo.emit("JMP", 0))
                lo.patch(jz_at, 1, lo.here())
            for at in end_jumps:
                lo.patch(at, 0, lo.here())
        else:
            raise LoweringError(f"not a statement: {st!r}")


class _Lowerer:
    def __init__(self, p: ImplProgram):
        self.p = p
        self.words: list[int] = []
        self.fpool: list[float] = []
        self.islot_of: dict[tuple[str, str], int] = {}
        self.fslot_of: dict[tuple[str, str], int] = {}
        self.int_slots: list[tuple[str, str]] = []
        self.float_slots: list[tuple[str, str]] = []
        self.n_iregs = 0
        self.n_fregs = 0
        self.fn_order = list(p.functions)

    def emit(self, op: str, a: int = 0, b: int = 0, c: int = 0) -> int:
        at = len(self.words) // 4
        self.words.extend((OPS[op], a, b, c))
        return at

    def patch(self, at: int, operand: int, value: int) -> None:
        self.words[at * 4 + 1 + operand] = value

    def here(self) -> int:
        return len(self.words) // 4

    def fconst(self, v: float) -> int:
        self.fpool.append(v)
        return len(self.fpool) - 1

    def run(self) -> CompiledCode:
        p = self.p
        for rec_name in RECORD_NAMES:
            rec = p.record(rec_name)
            for f in rec.fields:
                key = (rec_name, f.name)
                if f.sort == FLOAT:
                    self.fslot_of[key] = len(self.float_slots)
                    self.float_slots.append(key)
                else:
                    self.islot_of[key] = len(self.int_slots)
                    self.int_slots.append(key)

        param_slots: dict[str, tuple[int, ...]] = {}
        for fname in self.fn_order:
            fn = p.functions[fname]
            slots = []
            for pname in fn.params:
                slots.append(len(self.int_slots))
                self.int_slots.append(("(param)", f"{fname}:{pname}"))
            param_slots[fname] = tuple(slots)

        entries: dict[str, int] = {}
        for fname in self.fn_order:
            fn = p.functions[fname]
            entries[fname] = self.here()
            fc = _FnCompiler(self, dict(zip(fn.params, param_slots[fname])))
            fc.stmts(fn.body)
            self.emit("RET")

        functions = tuple(
            (fname, entries[fname], param_slots[fname]) for fname in self.fn_order
        )
        return CompiledCode(
            program_name=p.name,
            code=array("q", self.words),
            fpool=array("d", self.fpool),
            int_slots=tuple(self.int_slots),
            float_slots=tuple(self.float_slots),
            islot_of=dict(self.islot_of),
            fslot_of=dict(self.fslot_of),
            functions=functions,
            fn_index={fname: i for i, fname in enumerate(self.fn_order)},
            n_iregs=max(self.n_iregs, 1),
            n_fregs=max(self.n_fregs, 1),
        )


def lower(p: ImplProgram) -> CompiledCode:
    return _Lowerer(p).run()
