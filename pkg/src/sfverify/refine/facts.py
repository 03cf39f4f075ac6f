"""Conjunctions of guard literals, used to refute or discharge branch guards.

A Facts value carries, for integer record fields, either a known value or a
set of excluded values plus an optional inclusive range; and, for other
comparison expressions, a truth assignment keyed by the printed expression.
Everything is conservative: `truth` answers True/False only when the
conjunction forces it, and None otherwise.
"""

from __future__ import annotations

from ..chart.ast import Binary, Const, Field, FloatLit, IntLit, Unary, complement, expr_fields
from ..impl.printer import print_impl_expr

_CMP = {"<", "<=", ">", ">=", "==", "!="}

Key = tuple[str, str]  # (record, field)


class Facts:
    def __init__(self, constants: dict[str, int], ranges: dict[Key, tuple[int, int]]):
        self.constants = constants
        self.ranges = ranges
        self.eq: dict[Key, int] = {}
        self.ne: dict[Key, set[int]] = {}
        self.atoms: dict[str, bool] = {}
        self._atom_fields: dict[str, frozenset[Key]] = {}

    def copy(self) -> "Facts":
        f = Facts(self.constants, self.ranges)
        f.eq = dict(self.eq)
        f.ne = {k: set(v) for k, v in self.ne.items()}
        f.atoms = dict(self.atoms)
        f._atom_fields = dict(self._atom_fields)
        return f

    # -- constant folding --------------------------------------------------

    def const_val(self, e):
        match e:
            case IntLit(v):
                return v
            case FloatLit(v):
                return v
            case Const(name):
                return self.constants.get(name)
            case Unary("-", operand):
                v = self.const_val(operand)
                return None if v is None else -v
            case _:
                return None

    # -- updates -------------------------------------------------------------

    def _kill_mentions(self, key: Key) -> None:
        dead = [a for a, fields in self._atom_fields.items() if key in fields]
        for a in dead:
            del self.atoms[a]
            del self._atom_fields[a]

    def assign(self, lhs: Field, rhs) -> None:
        key = (lhs.record, lhs.name)
        self.eq.pop(key, None)
        self.ne.pop(key, None)
        self._kill_mentions(key)
        v = self.const_val(rhs)
        if isinstance(v, int) and not isinstance(v, bool):
            self.eq[key] = v

    def havoc(self, key: Key) -> None:
        self.eq.pop(key, None)
        self.ne.pop(key, None)
        self._kill_mentions(key)

    def havoc_call(self) -> None:
        """A call may write any DWork/B/Y field; only inputs survive."""
        for key in [k for k in self.eq] + [k for k in self.ne]:
            if key[0] != "U":
                self.havoc(key)
        dead = [a for a, fields in self._atom_fields.items() if any(k[0] != "U" for k in fields)]
        for a in dead:
            del self.atoms[a]
            del self._atom_fields[a]

    def assume(self, g) -> None:
        match g:
            case Binary("and", l, r):
                self.assume(l)
                self.assume(r)
            case Binary(("==" | "!=") as op, Field(rec, name), rhs) if isinstance(
                v := self.const_val(rhs), int
            ) and not isinstance(v, bool):
                key = (rec, name)
                if op == "==":
                    self.eq[key] = v
                    self.ne.pop(key, None)
                elif self.eq.get(key) != v:
                    self.ne.setdefault(key, set()).add(v)
            case Binary(("==" | "!=") as op, Binary(iop, _, _) as inner, rhs) if (
                iop in _CMP and self.const_val(rhs) == 0
            ):
                # C-boolean idiom: (cmp) != 0 asserts cmp, (cmp) == 0 denies it
                self._assume_atom(inner, op == "!=")
            case Binary(op, _, _) if op in _CMP:
                self._assume_atom(g, True)
            case _:
                pass  # unknown shape: no information

    def assume_false(self, g) -> None:
        self.assume(complement(g))

    def _assume_atom(self, cmp_expr, value: bool) -> None:
        fields = frozenset(expr_fields(cmp_expr))
        for e, v in ((cmp_expr, value), (complement(cmp_expr), not value)):
            key = print_impl_expr(e)
            self.atoms[key] = v
            self._atom_fields[key] = fields

    # -- queries -----------------------------------------------------------

    def _field_truth(self, key: Key, c: int, want_eq: bool):
        if key in self.eq:
            hit = self.eq[key] == c
            return hit if want_eq else not hit
        rng = self.ranges.get(key)
        if rng is not None and not (rng[0] <= c <= rng[1]):
            return not want_eq
        excluded = self.ne.get(key, set())
        if c in excluded:
            return not want_eq
        if rng is not None:
            remaining = [v for v in range(rng[0], rng[1] + 1) if v not in excluded]
            if remaining == [c]:
                return want_eq
        return None

    def truth(self, g):
        """Three-valued truth of a guard under these facts."""
        match g:
            case IntLit(v):
                return v != 0
            case Binary("and", l, r):
                a, b = self.truth(l), self.truth(r)
                if a is False or b is False:
                    return False
                return True if (a is True and b is True) else None
            case Binary("or", l, r):
                a, b = self.truth(l), self.truth(r)
                if a is True or b is True:
                    return True
                return False if (a is False and b is False) else None
            case Binary(op, lhs, rhs) if op in _CMP:
                lv, rv = self.const_val(lhs), self.const_val(rhs)
                if lv is not None and rv is not None:
                    return {
                        "<": lv < rv, "<=": lv <= rv, ">": lv > rv,
                        ">=": lv >= rv, "==": lv == rv, "!=": lv != rv,
                    }[op]
                if (
                    op in ("==", "!=")
                    and isinstance(lhs, Field)
                    and isinstance(rv, int)
                    and not isinstance(rv, bool)
                ):
                    t = self._field_truth((lhs.record, lhs.name), rv, op == "==")
                    if t is not None:
                        return t
                if op in ("==", "!=") and rv == 0 and isinstance(lhs, Binary) and lhs.op in _CMP:
                    inner = self.truth(lhs)
                    if inner is not None:
                        return inner if op == "!=" else not inner
                return self.atoms.get(print_impl_expr(g))
            case _:
                return None

    def possible_values(self, key: Key) -> list[int] | None:
        """All values the field may hold, when its domain is finite."""
        if key in self.eq:
            return [self.eq[key]]
        rng = self.ranges.get(key)
        if rng is None:
            return None
        excluded = self.ne.get(key, set())
        return [v for v in range(rng[0], rng[1] + 1) if v not in excluded]


def merge(branches: list["Facts"]) -> "Facts":
    """Facts valid after any one of several alternative paths."""
    assert branches
    out = branches[0].copy()
    for other in branches[1:]:
        out.eq = {k: v for k, v in out.eq.items() if other.eq.get(k) == v}
        out.ne = {
            k: common
            for k in list(out.ne)
            if (common := out.ne[k] & other.ne.get(k, set()))
        }
        out.atoms = {k: v for k, v in out.atoms.items() if other.atoms.get(k) == v}
        out._atom_fields = {k: out._atom_fields[k] for k in out.atoms}
    return out
