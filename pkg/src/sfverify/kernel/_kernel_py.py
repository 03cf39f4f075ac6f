"""Pure-Python interpreter for lowered step code (fallback backend).

Mirrors the compiled backend instruction for instruction; the parity tests
hold both to the tree-walking evaluator.
"""

from __future__ import annotations

from ..numerics import INT64_MAX, INT64_MIN
from .lower import OPS, VMError

_RET = OPS["RET"]
_LDI = OPS["LDI"]
_LDF = OPS["LDF"]
_LDS = OPS["LDS"]
_STS = OPS["STS"]
_LDSF = OPS["LDSF"]
_STSF = OPS["STSF"]
_MOVI = OPS["MOVI"]
_ADD = OPS["ADD"]
_SUB = OPS["SUB"]
_MUL = OPS["MUL"]
_NEG = OPS["NEG"]
_FADD = OPS["FADD"]
_FSUB = OPS["FSUB"]
_FMUL = OPS["FMUL"]
_FNEG = OPS["FNEG"]
_I2F = OPS["I2F"]
_TRUNC = OPS["TRUNC"]
_CLT = OPS["CLT"]
_CLE = OPS["CLE"]
_CGT = OPS["CGT"]
_CGE = OPS["CGE"]
_CEQ = OPS["CEQ"]
_CNE = OPS["CNE"]
_FCLT = OPS["FCLT"]
_FCLE = OPS["FCLE"]
_FCGT = OPS["FCGT"]
_FCGE = OPS["FCGE"]
_FCEQ = OPS["FCEQ"]
_FCNE = OPS["FCNE"]
_BOOL = OPS["BOOL"]
_FBOOL = OPS["FBOOL"]
_ANDB = OPS["ANDB"]
_ORB = OPS["ORB"]
_JZ = OPS["JZ"]
_JMP = OPS["JMP"]
_CALL = OPS["CALL"]


def run(code, fpool, functions, fidx, isl, fsl, n_iregs, n_fregs, depth_limit=256):
    """Execute functions[fidx]; the slot arrays are mutated in place."""
    ir = [0] * n_iregs
    fr = [0.0] * n_fregs
    pc = functions[fidx][1]
    stack: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []
    while True:
        base = pc * 4
        op = code[base]
        a = code[base + 1]
        b = code[base + 2]
        c = code[base + 3]
        pc += 1
        if op == _LDS:
            ir[a] = isl[b]
        elif op == _STS:
            isl[a] = ir[b]
        elif op == _LDI:
            ir[a] = b
        elif op == _JZ:
            if ir[a] == 0:
                pc = b
        elif op == _JMP:
            pc = a
        elif op == _CEQ:
            ir[a] = 1 if ir[b] == ir[c] else 0
        elif op == _CNE:
            ir[a] = 1 if ir[b] != ir[c] else 0
        elif op == _CLT:
            ir[a] = 1 if ir[b] < ir[c] else 0
        elif op == _CLE:
            ir[a] = 1 if ir[b] <= ir[c] else 0
        elif op == _CGT:
            ir[a] = 1 if ir[b] > ir[c] else 0
        elif op == _CGE:
            ir[a] = 1 if ir[b] >= ir[c] else 0
        elif op == _ADD:
            v = ir[b] + ir[c]
            ir[a] = INT64_MAX if v > INT64_MAX else INT64_MIN if v < INT64_MIN else v
        elif op == _SUB:
            v = ir[b] - ir[c]
            ir[a] = INT64_MAX if v > INT64_MAX else INT64_MIN if v < INT64_MIN else v
        elif op == _MUL:
            v = ir[b] * ir[c]
            ir[a] = INT64_MAX if v > INT64_MAX else INT64_MIN if v < INT64_MIN else v
        elif op == _NEG:
            v = -ir[b]
            ir[a] = INT64_MAX if v > INT64_MAX else v
        elif op == _LDSF:
            fr[a] = fsl[b]
        elif op == _STSF:
            fsl[a] = fr[b]
        elif op == _LDF:
            fr[a] = fpool[b]
        elif op == _FADD:
            fr[a] = fr[b] + fr[c]
        elif op == _FSUB:
            fr[a] = fr[b] - fr[c]
        elif op == _FMUL:
            fr[a] = fr[b] * fr[c]
        elif op == _FNEG:
            fr[a] = -fr[b]
        elif op == _I2F:
            fr[a] = float(ir[b])
        elif op == _TRUNC:
            v = fr[b]
            if v != v:
                ir[a] = 0
            elif v >= INT64_MAX:
                ir[a] = INT64_MAX
            elif v <= INT64_MIN:
                ir[a] = INT64_MIN
            else:
                ir[a] = int(v)
        elif op == _FCEQ:
            ir[a] = 1 if fr[b] == fr[c] else 0
        elif op == _FCNE:
            ir[a] = 1 if fr[b] != fr[c] else 0
        elif op == _FCLT:
            ir[a] = 1 if fr[b] < fr[c] else 0
        elif op == _FCLE:
            ir[a] = 1 if fr[b] <= fr[c] else 0
        elif op == _FCGT:
            ir[a] = 1 if fr[b] > fr[c] else 0
        elif op == _FCGE:
            ir[a] = 1 if fr[b] >= fr[c] else 0
        elif op == _BOOL:
            ir[a] = 1 if ir[b] != 0 else 0
        elif op == _FBOOL:
            ir[a] = 1 if fr[b] != 0.0 else 0
        elif op == _MOVI:
            ir[a] = ir[b]
        elif op == _ANDB:
            ir[a] = ir[b] & ir[c]
        elif op == _ORB:
            ir[a] = ir[b] | ir[c]
        elif op == _CALL:
            if len(stack) >= depth_limit:
                raise VMError(f"call depth limit {depth_limit} exceeded")
            pslots = functions[a][2]
            saved = tuple(isl[s] for s in pslots)
            for i in range(c):
                isl[pslots[i]] = ir[b + i]
            stack.append((pc, pslots, saved))
            pc = functions[a][1]
        elif op == _RET:
            if not stack:
                return
            pc, pslots, saved = stack.pop()
            for s, v in zip(pslots, saved):
                isl[s] = v
        else:
            raise VMError(f"bad opcode {op}")
