"""Structural matching of a candidate program against the derived one.

The matcher walks both statement trees together.  At every sequence it
first normalizes both sides the same way (fold, prune under the facts
collected on the walk so far, dead-store removal, trailing-empty-arm
trimming), then aligns statement by statement:

  * assignments and calls must agree once named constants are resolved to
    their values through each side's table;
  * conditionals align arm by arm; arms may sit in a different order when
    their guards are equality tests on one field with distinct values;
  * a candidate's bare else may stand for several derived arms.  That
    absorption is exact when every absorbed body matches the else body
    and the guards cover every value the walk facts allow; when the one
    non-matching arm tests a status field against 0 (the not-entered
    encoding, whose reachability the per-field ranges cannot settle),
    the match records the control-invariant assumption it is leaning on
    instead of failing -- co-simulation is the evidence for those;
  * a call to the step function on the candidate side is inlined at its
    literal event id and the walk continues through the copy.

Exact mode skips every one of those moves; only literal equality passes.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..chart.ast import Binary, Field
from ..impl.ir import FunctionDef, ImplProgram, SAssign, SCall, SIf
from ..impl.printer import print_impl_expr, print_stmts
from ..retrieve import RetrieveRelation
from . import rules
from .derive import DerivedProgram, PhaseEntry
from .facts import Facts

_SNIPPET = 240


@dataclass(frozen=True)
class Divergence:
    path: tuple[str, ...]
    impl: str
    derived: str

    def as_dict(self) -> dict:
        return {"path": list(self.path), "impl": self.impl, "derived": self.derived}


@dataclass(frozen=True)
class MatchResult:
    outcome: str  # PASS | FAIL
    mode: str
    matched_functions: dict[str, str]  # function name -> body digest
    first_divergence: Divergence | None
    assumptions: tuple[str, ...]
    normalizations: tuple[str, ...]
    phase_log: tuple[PhaseEntry, ...]

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "mode": self.mode,
            "matched_functions": dict(self.matched_functions),
            "first_divergence": self.first_divergence.as_dict() if self.first_divergence else None,
            "assumptions": list(self.assumptions),
            "normalizations": list(self.normalizations),
            "phase_log": [list(e) for e in self.phase_log],
        }


def _snippet(stmts) -> str:
    if not stmts:
        return "(end of sequence)"
    text = "\n".join(print_stmts(stmts[:1], ""))
    return text if len(text) <= _SNIPPET else text[: _SNIPPET - 3] + "..."


def _guard_text(g) -> str:
    return "else" if g is None else print_impl_expr(g)


class _Mismatch(Exception):
    def __init__(self, div: Divergence):
        self.div = div


class _Matcher:
    def __init__(self, d: DerivedProgram, p: ImplProgram, mode: str, depth: int):
        self.d = d
        self.p = p
        self.mode = mode
        self.depth = depth
        self.normalized = mode == "normalized"
        self.assumptions: list[str] = []
        self.normalizations: list[str] = []
        # the relation fitted the derived constants from the program's, so
        # the program table is a superset and resolves both sides' names
        self.consts = dict(p.constants)
        self.ranges = dict(RetrieveRelation(d.chart, d.layout).control_ranges)

    def fresh_facts(self) -> Facts:
        return Facts(constants=self.consts, ranges=self.ranges)

    # -- logging with rollback, so trial matches leave no trace ----------

    def _mark(self) -> tuple[int, int]:
        return (len(self.assumptions), len(self.normalizations))

    def _rollback(self, mark: tuple[int, int]) -> None:
        del self.assumptions[mark[0] :]
        del self.normalizations[mark[1] :]

    # -- expression equality ---------------------------------------------

    def _same_expr(self, a, b) -> bool:
        if a is None or b is None:
            return a is None and b is None
        if not self.normalized:
            return print_impl_expr(a) == print_impl_expr(b)
        ra = print_impl_expr(rules.resolve_consts(a, self.consts))
        rb = print_impl_expr(rules.resolve_consts(b, self.consts))
        return ra == rb

    def _eq_on(self, g):
        """(field, value) when g is an equality test against a constant."""
        match g:
            case Binary("==", Field() as f, rhs):
                v = rules.const_val(rhs, self.consts)
                if v is not None:
                    return ((f.record, f.name), v)
        return None

    # -- sequences ---------------------------------------------------------

    def seq(self, impl: tuple, der: tuple, facts: Facts, path: tuple[str, ...]) -> None:
        if self.normalized:
            impl, _ = rules.normalize(impl, facts.copy())
            der, _ = rules.normalize(der, facts.copy())
        impl = list(impl)
        der = list(der)
        pos = 0
        while impl or der:
            pos += 1
            here = path + (f"statement {pos}",)
            if impl and der:
                a, b = impl[0], der[0]
                if isinstance(a, SCall) and not isinstance(b, SCall) and self.normalized:
                    expansion, _ = rules.specialize(
                        self.p, a.func, a.args, facts.copy(), limit=self.depth
                    )
                    self.normalizations.append(
                        f"inlined {a.func}({', '.join(print_impl_expr(x) for x in a.args)})"
                        f" as {len(expansion)} statements"
                    )
                    # what the copy assigns can refute guards after the call
                    # site, so both tails get renormalized from here
                    rest, _ = rules.normalize(tuple(expansion) + tuple(impl[1:]), facts.copy())
                    impl = list(rest)
                    der_rest, _ = rules.normalize(tuple(der), facts.copy())
                    der = list(der_rest)
                    continue
                if isinstance(a, SAssign) and isinstance(b, SAssign):
                    if a.lhs != b.lhs or not self._same_expr(a.rhs, b.rhs):
                        raise _Mismatch(Divergence(here, _snippet([a]), _snippet([b])))
                    facts.assign(a.lhs, a.rhs)
                    impl.pop(0)
                    der.pop(0)
                    continue
                if isinstance(a, SCall) and isinstance(b, SCall):
                    if a.func != b.func or len(a.args) != len(b.args) or not all(
                        self._same_expr(x, y) for x, y in zip(a.args, b.args)
                    ):
                        raise _Mismatch(Divergence(here, _snippet([a]), _snippet([b])))
                    facts.havoc_call()
                    impl.pop(0)
                    der.pop(0)
                    continue
                if isinstance(a, SIf) and isinstance(b, SIf):
                    self.match_if(a, b, facts, here)
                    _, facts = rules.prune((b,), facts)
                    impl.pop(0)
                    der.pop(0)
                    continue
                raise _Mismatch(Divergence(here, _snippet([a]), _snippet([b])))
            raise _Mismatch(
                Divergence(here, _snippet(tuple(impl)), _snippet(tuple(der)))
            )

    # -- conditionals ------------------------------------------------------

    def match_if(self, a: SIf, b: SIf, facts: Facts, path: tuple[str, ...]) -> None:
        der = list(b.arms)
        consumed = [False] * len(der)
        scan = facts.copy()  # accumulates the negations of consumed guards

        def arm_path(k: int, g) -> tuple[str, ...]:
            return path + (f"arm {k + 1} ({_guard_text(g)})",)

        for i, (gi, bi) in enumerate(a.arms):
            if gi is None:
                self.absorb(bi, der, consumed, facts, scan, path, i)
                break
            hit = None
            for k, (gd, bd) in enumerate(der):
                if consumed[k]:
                    continue
                if self._same_expr(gi, gd):
                    hit = k
                    break
            if hit is None:
                raise _Mismatch(
                    Divergence(
                        arm_path(i, gi),
                        f"guard {_guard_text(gi)}",
                        "no arm with this guard",
                    )
                )
            jumped = [k for k in range(hit) if not consumed[k]]
            if jumped:
                if not self.normalized:
                    raise _Mismatch(
                        Divergence(
                            arm_path(i, gi),
                            f"guard {_guard_text(gi)}",
                            f"expected {_guard_text(der[jumped[0]][0])}",
                        )
                    )
                for k in jumped:
                    if not self._exclusive(der[hit][0], der[k][0]):
                        raise _Mismatch(
                            Divergence(
                                arm_path(i, gi),
                                f"guard {_guard_text(gi)} out of order",
                                f"not exclusive with {_guard_text(der[k][0])}",
                            )
                        )
                self.normalizations.append(
                    f"arm order differs: {_guard_text(gi)} matched out of order"
                )
            gd, bd = der[hit]
            consumed[hit] = True
            arm_facts = facts.copy()
            if gd is not None:
                arm_facts.assume(gd)
                scan.assume_false(gd)
            self.seq(bi, bd, arm_facts, arm_path(i, gi))
        else:
            self.leftovers(der, consumed, scan, path)

    def _exclusive(self, g1, g2) -> bool:
        e1, e2 = self._eq_on(g1), self._eq_on(g2)
        return e1 is not None and e2 is not None and e1[0] == e2[0] and e1[1] != e2[1]

    def absorb(
        self,
        else_body: tuple,
        der: list,
        consumed: list[bool],
        facts: Facts,
        scan: Facts,
        path: tuple[str, ...],
        arm_index: int,
    ) -> None:
        """A candidate bare else against the remaining derived arms."""
        remaining = [(k, g, b) for k, (g, b) in enumerate(der) if not consumed[k]]
        here = path + (f"arm {arm_index + 1} (else)",)
        if self.normalized and len(remaining) > 1:
            self.normalizations.append(
                f"bare else at {'/'.join(path)} stands for {len(remaining)} derived arms"
            )
        if not self.normalized:
            if len(remaining) == 1 and remaining[0][1] is None:
                self.seq(else_body, remaining[0][2], facts.copy(), here)
                consumed[remaining[0][0]] = True
                return
            raise _Mismatch(
                Divergence(
                    here,
                    "else",
                    f"expected {_guard_text(remaining[0][1]) if remaining else 'no further arm'}",
                )
            )

        covered_values: list[int] = []
        covered_field = None
        fields_agree = True
        proven_true = False
        for k, g, b in remaining:
            truth = True if g is None else scan.truth(g)
            if truth is False:
                consumed[k] = True
                self.normalizations.append(
                    f"derived arm {_guard_text(g)} unreachable here; skipped"
                )
                continue
            arm_facts = scan.copy()
            if g is not None:
                arm_facts.assume(g)
            mark = self._mark()
            try:
                self.seq(else_body, b, arm_facts, here + (f"absorbed {_guard_text(g)}",))
            except _Mismatch:
                self._rollback(mark)
                # only the not-entered code (0) may be leaned on: whether a
                # status field can still be 0 here depends on the activity
                # coupling the per-field ranges cannot express.  A nonzero
                # code is a real control state, so a differing body there
                # stays a failure.
                eq = self._eq_on(g) if g is not None else None
                if eq is None or eq[0] not in self.ranges or eq[1] != 0:
                    raise
                self.assumptions.append(
                    f"else-branch at {'/'.join(path)} treats"
                    f" {_guard_text(g)} as unreachable (control invariant);"
                    f" bodies differ there"
                )
                consumed[k] = True
                if g is not None:
                    scan.assume_false(g)
                continue
            consumed[k] = True
            if truth is True:
                proven_true = True
                break  # nothing after a guard that always holds is reachable
            else:
                eq = self._eq_on(g)
                if eq is not None:
                    if covered_field is None:
                        covered_field = eq[0]
                    elif covered_field != eq[0]:
                        fields_agree = False
                    covered_values.append(eq[1])
                if g is not None:
                    scan.assume_false(g)

        if proven_true:
            return
        if not remaining:
            self.assumptions.append(
                f"else-branch at {'/'.join(path)} has no derived counterpart;"
                f" treated as unreachable (control invariant)"
            )
            return
        if covered_field is not None and fields_agree:
            possible = scan.possible_values(covered_field)
            if possible is not None and set(possible) <= set(covered_values):
                return
            gaps = sorted(set(possible or ()) - set(covered_values))
            if gaps:
                self.assumptions.append(
                    f"else-branch at {'/'.join(path)} also covers"
                    f" {covered_field[0]}.{covered_field[1]} in {gaps},"
                    f" which the control invariant rules out"
                )
                return
        self.assumptions.append(
            f"else-branch at {'/'.join(path)} assumed to cover exactly the"
            f" remaining derived arms"
        )

    def leftovers(self, der: list, consumed: list[bool], scan: Facts, path: tuple[str, ...]) -> None:
        for k, (g, b) in enumerate(der):
            if consumed[k]:
                continue
            if not b:
                self.normalizations.append(
                    f"empty derived arm {_guard_text(g)} has no counterpart"
                )
                continue
            if g is not None and scan.truth(g) is False:
                self.normalizations.append(
                    f"derived arm {_guard_text(g)} unreachable here; skipped"
                )
                continue
            raise _Mismatch(
                Divergence(
                    path + (f"arm {k + 1} ({_guard_text(g)})",),
                    "no arm with this guard",
                    _snippet(b),
                )
            )

    # -- entry -------------------------------------------------------------

    def run(self) -> MatchResult:
        matched: dict[str, str] = {}
        failure: Divergence | None = None
        targets = [
            (self.p.init_name, FunctionDef(self.p.init_name, (), self.d.init)),
            (self.d.output_name, FunctionDef(self.d.output_name, self.d.params, self.d.step_body)),
        ]
        for fname, want in targets:
            fn = self.p.functions.get(fname)
            if fn is None:
                failure = Divergence((fname,), "function not present", "required by the derivation")
                break
            if tuple(fn.params) != tuple(want.params):
                failure = Divergence(
                    (fname,),
                    f"params {tuple(fn.params)}",
                    f"expected {tuple(want.params)}",
                )
                break
            try:
                self.seq(fn.body, want.body, self.fresh_facts(), (fname,))
            except _Mismatch as miss:
                failure = miss.div
                break
            except rules.ExpansionLimit as e:
                failure = Divergence((fname,), str(e), "call inlining diverged")
                break
            matched[fname] = rules.digest(fn.body)

        log = self.d.phase_log + tuple(
            ("structuring", note, "", "") for note in self.normalizations
        )
        return MatchResult(
            outcome="PASS" if failure is None else "FAIL",
            mode=self.mode,
            matched_functions=matched,
            first_divergence=failure,
            assumptions=tuple(self.assumptions),
            normalizations=tuple(self.normalizations),
            phase_log=log,
        )


def structure_match(
    d: DerivedProgram, p: ImplProgram, mode: str = "normalized", depth: int = 64
) -> MatchResult:
    if mode not in ("normalized", "exact"):
        raise ValueError(f"unknown match mode {mode!r}")
    return _Matcher(d, p, mode, depth).run()
