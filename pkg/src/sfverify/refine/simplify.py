"""Simplification of a derived step program toward generated-code shape.

Constant structure tests and C-boolean shells fold away first; then
splitting, regrouping, and invariant-based pruning run to a fixpoint; a
last dead-store pass drops the writes the pruning made redundant.  Arms
whose bodies end up empty are kept: the derived program stays exhaustive
over its dispatch values, and deciding which of those arms a candidate
may omit is the matcher's job, not ours.
"""

from __future__ import annotations

from ..retrieve import RetrieveRelation
from . import rules
from .derive import DerivedProgram
from .facts import Facts

_MAX_ROUNDS = 32


def _split_values(r: RetrieveRelation) -> dict[tuple[str, str], tuple[int, ...]]:
    coded = set(r.layout.code_field.values()) | set(r.layout.history_field.values())
    out = {}
    for (rec, f), (lo, hi) in r.control_ranges.items():
        if f in coded:
            out[(rec, f)] = tuple(range(lo, hi + 1))
    return out


def simplify(d: DerivedProgram, r: RetrieveRelation) -> DerivedProgram:
    consts = dict(r.layout.const_values)
    ranges = dict(r.control_ranges)
    split_values = _split_values(r)

    def fresh() -> Facts:
        return Facts(constants=consts, ranges=ranges)

    def apply(current: DerivedProgram, name: str, body: tuple) -> DerivedProgram:
        if body == current.step_body:
            return current
        before = rules.digest(current.step_body)
        return current.with_body(body, ("simplification", name, before, rules.digest(body)))

    d = apply(d, "fold", rules.fold(d.step_body))
    for _ in range(_MAX_ROUNDS):
        start = d.step_body
        d = apply(d, "split", rules.split(d.step_body, split_values, consts))
        d = apply(d, "regroup", rules.regroup(d.step_body))
        pruned, _ = rules.prune(d.step_body, fresh())
        d = apply(d, "prune", pruned)
        if d.step_body == start:
            break
    else:
        raise RuntimeError("simplification did not reach a fixpoint")
    d = apply(d, "peephole", rules.peephole(d.step_body))
    return d
