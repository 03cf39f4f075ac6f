# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled interpreter for lowered step code.

Instruction-for-instruction twin of _kernel_py; see lower.py for the
encoding and the opcode table. Saturating int64 arithmetic is done with
the compiler overflow builtins.
"""

from libc.stdint cimport int64_t

from .lower import VMError

cdef extern from *:
    """
    #include <stdint.h>
    static inline int64_t sf_sat_add(int64_t a, int64_t b) {
        int64_t r;
        if (__builtin_add_overflow(a, b, &r)) return b > 0 ? INT64_MAX : INT64_MIN;
        return r;
    }
    static inline int64_t sf_sat_sub(int64_t a, int64_t b) {
        int64_t r;
        if (__builtin_sub_overflow(a, b, &r)) return b < 0 ? INT64_MAX : INT64_MIN;
        return r;
    }
    static inline int64_t sf_sat_mul(int64_t a, int64_t b) {
        int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) return ((a > 0) == (b > 0)) ? INT64_MAX : INT64_MIN;
        return r;
    }
    """
    int64_t sf_sat_add(int64_t a, int64_t b)
    int64_t sf_sat_sub(int64_t a, int64_t b)
    int64_t sf_sat_mul(int64_t a, int64_t b)
    int64_t INT64_MAX
    int64_t INT64_MIN

cdef enum:
    MAX_REGS = 256
    MAX_DEPTH = 1024
    MAX_PARAMS = 4

# opcode values mirror lower.OPS; the parity test asserts the mapping
cdef enum:
    OP_RET = 0
    OP_LDI = 1
    OP_LDF = 2
    OP_LDS = 3
    OP_STS = 4
    OP_LDSF = 5
    OP_STSF = 6
    OP_MOVI = 7
    OP_ADD = 8
    OP_SUB = 9
    OP_MUL = 10
    OP_NEG = 11
    OP_FADD = 12
    OP_FSUB = 13
    OP_FMUL = 14
    OP_FNEG = 15
    OP_I2F = 16
    OP_TRUNC = 17
    OP_CLT = 18
    OP_CLE = 19
    OP_CGT = 20
    OP_CGE = 21
    OP_CEQ = 22
    OP_CNE = 23
    OP_FCLT = 24
    OP_FCLE = 25
    OP_FCGT = 26
    OP_FCGE = 27
    OP_FCEQ = 28
    OP_FCNE = 29
    OP_BOOL = 30
    OP_FBOOL = 31
    OP_ANDB = 32
    OP_ORB = 33
    OP_JZ = 34
    OP_JMP = 35
    OP_CALL = 36

OPCODES = {
    "RET": OP_RET, "LDI": OP_LDI, "LDF": OP_LDF, "LDS": OP_LDS, "STS": OP_STS,
    "LDSF": OP_LDSF, "STSF": OP_STSF, "MOVI": OP_MOVI, "ADD": OP_ADD,
    "SUB": OP_SUB, "MUL": OP_MUL, "NEG": OP_NEG, "FADD": OP_FADD,
    "FSUB": OP_FSUB, "FMUL": OP_FMUL, "FNEG": OP_FNEG, "I2F": OP_I2F,
    "TRUNC": OP_TRUNC, "CLT": OP_CLT, "CLE": OP_CLE, "CGT": OP_CGT,
    "CGE": OP_CGE, "CEQ": OP_CEQ, "CNE": OP_CNE, "FCLT": OP_FCLT,
    "FCLE": OP_FCLE, "FCGT": OP_FCGT, "FCGE": OP_FCGE, "FCEQ": OP_FCEQ,
    "FCNE": OP_FCNE, "BOOL": OP_BOOL, "FBOOL": OP_FBOOL, "ANDB": OP_ANDB,
    "ORB": OP_ORB, "JZ": OP_JZ, "JMP": OP_JMP, "CALL": OP_CALL,
}


def run(code, fpool, functions, int fidx, isl, fsl, int n_iregs, int n_fregs,
        int depth_limit=256):
    """Execute functions[fidx]; the slot arrays are mutated in place."""
    cdef const int64_t[::1] cv = code
    cdef const double[::1] fp = fpool
    cdef int64_t[::1] sl = isl
    cdef double[::1] sf = fsl

    if n_iregs > MAX_REGS or n_fregs > MAX_REGS:
        raise VMError("register demand exceeds the compiled kernel's capacity")
    if depth_limit >= MAX_DEPTH:
        depth_limit = MAX_DEPTH - 1

    cdef int64_t ir[MAX_REGS]
    cdef double fr[MAX_REGS]
    cdef int64_t ret_pc[MAX_DEPTH]
    cdef int64_t saved_vals[MAX_DEPTH][MAX_PARAMS]
    cdef int64_t saved_slots[MAX_DEPTH][MAX_PARAMS]
    cdef int saved_n[MAX_DEPTH]

    cdef Py_ssize_t pc = <Py_ssize_t> functions[fidx][1]
    cdef int depth = 0
    cdef Py_ssize_t base
    cdef int64_t op, a, b, c, v
    cdef double dv
    cdef int i, np
    cdef object fn, pslots

    while True:
        base = pc * 4
        op = cv[base]
        a = cv[base + 1]
        b = cv[base + 2]
        c = cv[base + 3]
        pc += 1
        if op == OP_LDS:
            ir[a] = sl[b]
        elif op == OP_STS:
            sl[a] = ir[b]
        elif op == OP_LDI:
            ir[a] = b
        elif op == OP_JZ:
            if ir[a] == 0:
                pc = <Py_ssize_t> b
        elif op == OP_JMP:
            pc = <Py_ssize_t> a
        elif op == OP_CEQ:
            ir[a] = 1 if ir[b] == ir[c] else 0
        elif op == OP_CNE:
            ir[a] = 1 if ir[b] != ir[c] else 0
        elif op == OP_CLT:
            ir[a] = 1 if ir[b] < ir[c] else 0
        elif op == OP_CLE:
            ir[a] = 1 if ir[b] <= ir[c] else 0
        elif op == OP_CGT:
            ir[a] = 1 if ir[b] > ir[c] else 0
        elif op == OP_CGE:
            ir[a] = 1 if ir[b] >= ir[c] else 0
        elif op == OP_ADD:
            ir[a] = sf_sat_add(ir[b], ir[c])
        elif op == OP_SUB:
            ir[a] = sf_sat_sub(ir[b], ir[c])
        elif op == OP_MUL:
            ir[a] = sf_sat_mul(ir[b], ir[c])
        elif op == OP_NEG:
            v = ir[b]
            ir[a] = INT64_MAX if v == INT64_MIN else -v
        elif op == OP_LDSF:
            fr[a] = sf[b]
        elif op == OP_STSF:
            sf[a] = fr[b]
        elif op == OP_LDF:
            fr[a] = fp[b]
        elif op == OP_FADD:
            fr[a] = fr[b] + fr[c]
        elif op == OP_FSUB:
            fr[a] = fr[b] - fr[c]
        elif op == OP_FMUL:
            fr[a] = fr[b] * fr[c]
        elif op == OP_FNEG:
            fr[a] = -fr[b]
        elif op == OP_I2F:
            fr[a] = <double> ir[b]
        elif op == OP_TRUNC:
            dv = fr[b]
            if dv != dv:
                ir[a] = 0
            elif dv >= <double> INT64_MAX:
                ir[a] = INT64_MAX
            elif dv <= <double> INT64_MIN:
                ir[a] = INT64_MIN
            else:
                ir[a] = <int64_t> dv
        elif op == OP_FCEQ:
            ir[a] = 1 if fr[b] == fr[c] else 0
        elif op == OP_FCNE:
            ir[a] = 1 if fr[b] != fr[c] else 0
        elif op == OP_FCLT:
            ir[a] = 1 if fr[b] < fr[c] else 0
        elif op == OP_FCLE:
            ir[a] = 1 if fr[b] <= fr[c] else 0
        elif op == OP_FCGT:
            ir[a] = 1 if fr[b] > fr[c] else 0
        elif op == OP_FCGE:
            ir[a] = 1 if fr[b] >= fr[c] else 0
        elif op == OP_BOOL:
            ir[a] = 1 if ir[b] != 0 else 0
        elif op == OP_FBOOL:
            ir[a] = 1 if fr[b] != 0.0 else 0
        elif op == OP_MOVI:
            ir[a] = ir[b]
        elif op == OP_ANDB:
            ir[a] = ir[b] & ir[c]
        elif op == OP_ORB:
            ir[a] = ir[b] | ir[c]
        elif op == OP_CALL:
            if depth >= depth_limit:
                raise VMError(f"call depth limit {depth_limit} exceeded")
            fn = functions[a]
            pslots = fn[2]
            np = <int> len(pslots)
            if np > MAX_PARAMS:
                raise VMError("too many parameters for the compiled kernel")
            if np != c:
                raise VMError("call arity disagrees with lowered code")
            for i in range(np):
                v = <int64_t> pslots[i]
                saved_slots[depth][i] = v
                saved_vals[depth][i] = sl[v]
                sl[v] = ir[b + i]
            saved_n[depth] = np
            ret_pc[depth] = <int64_t> pc
            depth += 1
            pc = <Py_ssize_t> fn[1]
        elif op == OP_RET:
            if depth == 0:
                return
            depth -= 1
            pc = <Py_ssize_t> ret_pc[depth]
            for i in range(saved_n[depth]):
                sl[saved_slots[depth][i]] = saved_vals[depth][i]
        else:
            raise VMError(f"bad opcode {op}")
