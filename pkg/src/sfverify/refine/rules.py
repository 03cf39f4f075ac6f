"""Semantics-preserving rewrites on step-program statement trees.

These are the moves the simplifier and the structural matcher share:

  * fold      -- constant folding: structure-identity tests, comparisons of
                 literals, and unwrapping of C-boolean shells like (a<b)!=0
  * prune     -- drop conditional arms refuted by forward dataflow facts and
                 splice arms that provably fire
  * split     -- turn a != test on a substate-code field into == arms over
                 the other values the field can hold (descending)
  * regroup   -- flatten a trailing else-arm that holds a single nested
                 conditional back into its parent's arm chain
  * peephole  -- remove stores that are dead because of a later store
  * specialize -- inline a call to the step function at a literal event id,
                 pruning under the caller's facts as the copy unfolds

Splitting relies on the control invariant (the field stays within its coded
range), so it applies only to fields the caller names.  Everything else is
unconditionally sound.
"""

from __future__ import annotations

import hashlib

from ..chart.ast import (
    COMPARE_OPS,
    Binary,
    Const,
    Field,
    FloatLit,
    IntLit,
    StructIdent,
    StructLookup,
    Unary,
    Var,
    complement,
)
from ..impl.ir import SAssign, SCall, SIf
from ..impl.printer import print_impl_expr, print_stmts
from ..impl.stepbuilder import collapse_dead_stores
from ..numerics import sat_add, sat_mul, sat_neg, sat_sub, truthy
from .facts import Facts, merge


class ExpansionLimit(Exception):
    """Inlining a step-function call did not bottom out."""


def digest(body: tuple) -> str:
    text = "\n".join(print_stmts(body, ""))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def render(e) -> str:
    return print_impl_expr(e)


# ---------------------------------------------------------------- fold

_ARITH_EVAL = {"+": sat_add, "-": sat_sub, "*": sat_mul}
_CMP_EVAL = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def _is_zero(e) -> bool:
    return isinstance(e, IntLit) and e.value == 0


def fold_expr(e):
    match e:
        case StructLookup(ident, "identifier"):
            return StructIdent(ident)
        case Unary(op, x):
            x2 = fold_expr(x)
            if op == "-" and isinstance(x2, IntLit):
                return IntLit(sat_neg(x2.value))
            if op == "-" and isinstance(x2, FloatLit):
                return FloatLit(-x2.value)
            return Unary(op, x2) if x2 is not x else e
        case Binary(op, a, b):
            a2, b2 = fold_expr(a), fold_expr(b)
            if op in ("==", "!=") and isinstance(a2, StructIdent) and isinstance(b2, StructIdent):
                same = a2.ident == b2.ident
                return IntLit(1 if same == (op == "==") else 0)
            if isinstance(a2, IntLit) and isinstance(b2, IntLit):
                if op in _ARITH_EVAL:
                    return IntLit(_ARITH_EVAL[op](a2.value, b2.value))
                if op in _CMP_EVAL:
                    return IntLit(1 if _CMP_EVAL[op](a2.value, b2.value) else 0)
                if op == "and":
                    return IntLit(1 if truthy(a2.value) and truthy(b2.value) else 0)
                if op == "or":
                    return IntLit(1 if truthy(a2.value) or truthy(b2.value) else 0)
            # (a < b) != 0  is just  a < b;  (a < b) == 0  is its complement
            if _is_zero(b2) and isinstance(a2, Binary) and a2.op in COMPARE_OPS:
                if op == "!=":
                    return a2
                if op == "==":
                    return complement(a2)
            if a2 is not a or b2 is not b:
                return Binary(op, a2, b2)
            return e
        case _:
            return e


def fold(body: tuple) -> tuple:
    out = []
    for st in body:
        match st:
            case SAssign(lhs, rhs):
                out.append(SAssign(lhs, fold_expr(rhs)))
            case SCall(func, args):
                out.append(SCall(func, tuple(fold_expr(a) for a in args)))
            case SIf(arms):
                out.append(
                    SIf(
                        tuple(
                            (None if g is None else fold_expr(g), fold(b)) for g, b in arms
                        )
                    )
                )
            case _:
                out.append(st)
    return tuple(out)


# ---------------------------------------------------------------- prune


def prune(body: tuple, facts: Facts, on_call=None) -> tuple[tuple, Facts]:
    """Walk forward, dropping refuted arms and splicing proven ones.

    Consumes `facts` and returns the facts holding after the body; callers
    must continue with the returned object.  `on_call`, when given, maps a
    call statement and the facts at that point to inlined statements and
    the facts after them (used to unfold step-function calls in place).
    """
    out: list = []
    for st in body:
        match st:
            case SAssign():
                facts.assign(st.lhs, st.rhs)
                out.append(st)
            case SCall() if on_call is not None:
                stmts, facts = on_call(st, facts)
                out.extend(stmts)
            case SCall():
                facts.havoc_call()
                out.append(st)
            case SIf(arms):
                kept: list[tuple] = []  # (guard, pruned body, exit facts)
                exhaustive = False
                for g, b in arms:
                    t = True if g is None else facts.truth(g)
                    if t is False:
                        continue
                    arm_facts = facts.copy()
                    if g is not None:
                        arm_facts.assume(g)
                    b2, arm_exit = prune(b, arm_facts, on_call)
                    kept.append((g, b2, arm_exit))
                    if t is True:
                        exhaustive = True
                        break
                    facts.assume_false(g)
                if not kept:
                    continue
                if exhaustive and len(kept) == 1:
                    out.extend(kept[0][1])
                    facts = kept[0][2]
                    continue
                exits = [arm_exit for _, _, arm_exit in kept]
                if not exhaustive:
                    exits.append(facts)
                facts = merge(exits)
                out.append(SIf(tuple((g, b) for g, b, _ in kept)))
    return tuple(out), facts


# ---------------------------------------------------------------- split


def const_val(e, consts: dict[str, int]) -> int | None:
    match e:
        case IntLit(v):
            return v
        case Const(name):
            return consts.get(name)
    return None


def split(body: tuple, split_values: dict[tuple[str, str], tuple[int, ...]], consts: dict[str, int]) -> tuple:
    """Rewrite  f != c  arms on coded fields as == arms over the other
    values, highest first.  Sound only while f stays inside its range,
    which is what the control invariant guarantees for the named fields."""
    out = []
    for st in body:
        if not isinstance(st, SIf):
            out.append(st)
            continue
        arms: list = []
        for g, b in st.arms:
            b2 = split(b, split_values, consts)
            match g:
                case Binary("!=", Field(rec, fname) as lhs, rhs) if (rec, fname) in split_values and const_val(rhs, consts) is not None:
                    c = const_val(rhs, consts)
                    for v in sorted((v for v in split_values[(rec, fname)] if v != c), reverse=True):
                        arms.append((Binary("==", lhs, IntLit(v)), b2))
                case _:
                    arms.append((g, b2))
        out.append(SIf(tuple(arms)))
    return tuple(out)


# ---------------------------------------------------------------- regroup


def regroup(body: tuple) -> tuple:
    """Splice a trailing else-arm holding a single conditional into its
    parent chain.  The trailing guard is implied at that position (it is
    the complement of the arm before it), so the rewrite is exact."""
    out = []
    for st in body:
        if not isinstance(st, SIf):
            out.append(st)
            continue
        arms = [(g, regroup(b)) for g, b in st.arms]
        while len(arms) >= 2:
            g_last, b_last = arms[-1]
            g_prev = arms[-2][0]
            if (
                g_last is not None
                and g_prev is not None
                and len(b_last) == 1
                and isinstance(b_last[0], SIf)
                and render(g_last) == render(complement(g_prev))
            ):
                arms = arms[:-1] + list(b_last[0].arms)
            else:
                break
        out.append(SIf(tuple(arms)))
    return tuple(out)


# ---------------------------------------------------------------- peephole


def peephole(body: tuple) -> tuple:
    return collapse_dead_stores(body)


def strip_empty(body: tuple) -> tuple:
    """Drop trailing arms with empty bodies, and conditionals left with no
    arms at all.  Guards are side-effect-free, so nothing observable goes."""
    out = []
    for st in body:
        if isinstance(st, SIf):
            arms = [(g, strip_empty(b)) for g, b in st.arms]
            while arms and not arms[-1][1]:
                arms.pop()
            if arms:
                out.append(SIf(tuple(arms)))
        else:
            out.append(st)
    return tuple(out)


def normalize(body: tuple, facts: Facts) -> tuple[tuple, Facts]:
    """The matcher's per-node cleanup: fold, prune under the walk facts,
    collapse dead stores, and trim empty arms."""
    body = fold(body)
    body, facts = prune(body, facts)
    body = peephole(body)
    body = strip_empty(body)
    return body, facts


def resolve_consts(e, consts: dict[str, int]):
    """Replace named constants by their values, for value-level comparison."""
    match e:
        case Const(name) if name in consts:
            return IntLit(consts[name])
        case Unary(op, x):
            return Unary(op, resolve_consts(x, consts))
        case Binary(op, a, b):
            return Binary(op, resolve_consts(a, consts), resolve_consts(b, consts))
        case _:
            return e


# ---------------------------------------------------------------- specialize


def _subst_expr(e, sub: dict):
    match e:
        case Var(name) if name in sub:
            return sub[name]
        case Unary(op, x):
            return Unary(op, _subst_expr(x, sub))
        case Binary(op, a, b):
            return Binary(op, _subst_expr(a, sub), _subst_expr(b, sub))
        case _:
            return e


def _subst(body: tuple, sub: dict) -> tuple:
    out = []
    for st in body:
        match st:
            case SAssign(lhs, rhs):
                out.append(SAssign(lhs, _subst_expr(rhs, sub)))
            case SCall(func, args):
                out.append(SCall(func, tuple(_subst_expr(a, sub) for a in args)))
            case SIf(arms):
                out.append(
                    SIf(
                        tuple(
                            (None if g is None else _subst_expr(g, sub), _subst(b, sub))
                            for g, b in arms
                        )
                    )
                )
            case _:
                out.append(st)
    return tuple(out)


def specialize(p, fname: str, args: tuple, facts: Facts, depth: int = 0, limit: int = 64) -> tuple[tuple, Facts]:
    """Inline a call to `fname` at the given argument expressions, folding
    and pruning the copy under the caller's facts.  Nested calls unfold
    recursively up to `limit`."""
    if depth > limit:
        raise ExpansionLimit(f"call inlining exceeded depth {limit}")
    fn = p.functions[fname]
    sub = dict(zip(fn.params, args, strict=True))
    body = fold(_subst(fn.body, sub))

    def on_call(call: SCall, fs: Facts):
        return specialize(p, call.func, call.args, fs, depth + 1, limit)

    body, facts = prune(body, facts, on_call)
    return peephole(body), facts
