"""One emission scheme, two surface styles.

The reference code generator and the symbolic step derivation must agree on
the *shape* of the step program or structural matching is hopeless, so both
are driven by this module. A Style picks the surface differences:

  * GENERATED mirrors production code: flat else-if chains, a bare final
    else wherever that is exact, local events dispatched through a call to
    the step function, and stores that are dead within a straight-line block
    dropped.
  * DERIVED mirrors a semantics-first derivation: every conditional carries
    an explicit complement arm (nested binary chains instead of else-if),
    chart conditions appear in the (cond) != 0 form the simulator evaluates,
    local-event sends are inlined as a specialized copy of the whole step,
    and the tree is wrapped in a symbolic chart-identity test. No cleanup is
    performed; the simplification passes own that.

A bare final else over a multi-valued substate code is only exact while the
code cannot be observed outside its invariant range. A local-event broadcast
can observe exactly that (the code field is 0 mid-transition), so charts with
local events get explicit equality arms and no catch-all.

Broadcast inlining specializes while it builds: the event id is a literal, so
trigger tests fold, and branch facts prune arms as they are generated. The
pruning is what makes the expansion terminate on self-referential charts;
expanding first and pruning afterwards would not.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..chart.ast import (
    Assign,
    Binary,
    COMPARE_OPS,
    Const,
    Expr,
    Field,
    FloatLit,
    IntLit,
    Send,
    StructIdent,
    StructLookup,
    Unary,
    Var,
    complement,
    expr_fields,
)
from ..chart.model import ChartDef, TransitionDef
from ..refine.facts import Facts, merge
from .encoding import Layout, output_function_name
from .ir import FLOAT, SAssign, SCall, SIf, Stmt


class UnsupportedFeature(Exception):
    """The chart uses a construct with no place in the generated-code pattern."""

    def __init__(self, message: str, site: str = ""):
        self.site = site
        super().__init__(f"{message} (at {site})" if site else message)


@dataclass(frozen=True)
class Style:
    wrap_conditions: bool       # chart conditions rendered as (cond) != 0
    explicit_complements: bool  # nested binary conditionals, no bare else
    inline_broadcasts: bool     # expand sends in place of a self-call
    collapse_stores: bool       # drop stores overwritten before any read
    struct_wrapper: bool        # wrap the step in a chart-identity test
    depth_limit: int = 64


GENERATED = Style(
    wrap_conditions=False,
    explicit_complements=False,
    inline_broadcasts=False,
    collapse_stores=True,
    struct_wrapper=False,
)

DERIVED = Style(
    wrap_conditions=True,
    explicit_complements=True,
    inline_broadcasts=True,
    collapse_stores=False,
    struct_wrapper=True,
)


@dataclass
class _Ctx:
    """Threaded emission state: known facts, the event selector, and whether
    we are specializing (pruning refuted arms as we build)."""

    facts: Facts
    tid: Expr
    specialize: bool = False
    depth: int = 0

    def branch(self, facts: Facts) -> "_Ctx":
        return replace(self, facts=facts)


# arms handed around internally: (guard or None for "all remaining cases", thunk)
_Arm = tuple[Expr | None, object]


class StepBuilder:
    def __init__(self, chart: ChartDef, layout: Layout, style: Style):
        self.c = chart
        self.L = layout
        self.style = style
        self.has_locals = any(e.kind == "local" for e in chart.events)
        self.has_events = bool(chart.events)
        self.notes: list[tuple[str, str]] = []
        self._noted_scopes: set[str] = set()
        ranges: dict[tuple[str, str], tuple[int, int]] = {}
        for scope, fname in layout.code_field.items():
            ranges[("DWork", fname)] = (0, len(chart.children(scope)))
        for scope, fname in layout.history_field.items():
            ranges[("DWork", fname)] = (0, len(chart.children(scope)))
        for fname in layout.active_field.values():
            ranges[("DWork", fname)] = (0, 1)
        self.ranges = ranges

    # ---------------------------------------------------------------- build

    def build(self) -> tuple[tuple[Stmt, ...], tuple[Stmt, ...], tuple[str, ...]]:
        """Returns (init_body, output_body, output_params)."""
        self._note(
            "data-refinement",
            f"chart variables and state statuses rewritten over record fields "
            f"({len(self.L.var_slot)} variables, {len(self.L.dwork.fields)} state fields)",
        )
        init = self._init_body()
        ctx = _Ctx(facts=self._fresh_facts(), tid=Var("tid"))
        body = self._step_core(ctx)
        self._note("normalisation", "step collapsed to initialize-then-output normal form")
        if self.style.struct_wrapper:
            probe = Binary(
                "==",
                StructLookup(self.c.identifier, "identifier"),
                StructIdent(self.c.identifier),
            )
            body = (SIf(((probe, body), (complement(probe), ()))),)
        if self.style.collapse_stores:
            init = collapse_dead_stores(init)
            body = collapse_dead_stores(body)
        params = ("tid",) if self.has_events else ()
        return init, body, params

    def _fresh_facts(self) -> Facts:
        return Facts(self.L.const_values, self.ranges)

    def _init_body(self) -> tuple[Stmt, ...]:
        out = []
        for rec in (self.L.dwork, self.L.blocks, self.L.inputs, self.L.outputs):
            for f in rec.fields:
                zero = FloatLit(0.0) if f.sort == FLOAT else IntLit(0)
                out.append(SAssign(Field(rec.name, f.name), zero))
        return tuple(out)

    def _step_core(self, ctx: _Ctx) -> tuple[Stmt, ...]:
        return self._output_dispatch(ctx) + self._y_copies(ctx)

    def _output_dispatch(self, ctx: _Ctx) -> tuple[Stmt, ...]:
        root = self.c.identifier
        flag = self._active(root)

        def activate(c: _Ctx) -> tuple[Stmt, ...]:
            st = SAssign(flag, IntLit(1))
            c.facts.assign(flag, IntLit(1))
            return (st,) + self._enter_children(root, c)

        return self._if(
            ctx,
            [
                (Binary("==", flag, IntLit(0)), activate),
                (None, lambda c: self._exec_children(root, c)),
            ],
        )

    def _y_copies(self, ctx: _Ctx) -> tuple[Stmt, ...]:
        out = []
        for name in self.L.output_vars:
            lhs = Field("Y", name)
            out.append(SAssign(lhs, Field("B", name)))
            ctx.facts.assign(lhs, Field("B", name))
        return tuple(out)

    # ------------------------------------------------------------- plumbing

    def _note(self, phase: str, what: str) -> None:
        self.notes.append((phase, what))

    def _active(self, sid: str) -> Field:
        return Field("DWork", self.L.active_field[sid])

    def _code(self, scope: str) -> Field:
        return Field("DWork", self.L.code_field[scope])

    def _hist(self, scope: str) -> Field:
        return Field("DWork", self.L.history_field[scope])

    def _in(self, sid: str) -> Const:
        return Const(self.L.state_const[sid])

    def _status_test(self, sid: str) -> Expr:
        """Guard that holds exactly while `sid` is active."""
        if sid in self.L.active_field:
            return Binary("!=", self._active(sid), IntLit(0))
        return Binary("==", self._code(self.c.parent_of(sid)), self._in(sid))

    def _rewrite(self, e: Expr) -> Expr:
        match e:
            case Var(name):
                return Field(*self.L.var_slot[name])
            case Unary(op, operand):
                return Unary(op, self._rewrite(operand))
            case Binary(op, left, right):
                return Binary(op, self._rewrite(left), self._rewrite(right))
            case _:
                return e

    def _guard(self, cond: Expr) -> Expr:
        g = self._rewrite(cond)
        if isinstance(g, Binary) and g.op in COMPARE_OPS:
            return Binary("!=", g, IntLit(0)) if self.style.wrap_conditions else g
        if isinstance(g, Binary) and g.op in ("and", "or"):
            return g
        # numeric truthiness is spelled out in both styles
        return Binary("!=", g, IntLit(0))

    # -------------------------------------------------------- if emission

    def _select_arms(self, ctx: _Ctx, arms: list[_Arm]) -> tuple[list[_Arm], bool]:
        """Drop refuted arms / stop at a settled one when specializing."""
        kept: list[_Arm] = []
        terminated = False
        for g, thunk in arms:
            t = True if g is None else (ctx.facts.truth(g) if ctx.specialize else None)
            if t is False:
                continue
            kept.append((g, thunk))
            if t is True:
                terminated = True
                break
        return kept, terminated

    def _if(self, ctx: _Ctx, arms: list[_Arm]) -> tuple[Stmt, ...]:
        """Emit a conditional from guarded thunks; a None guard (last only)
        covers all remaining cases. Facts are threaded per arm and merged."""
        kept, terminated = self._select_arms(ctx, arms)
        if not kept:
            return ()
        if len(kept) == 1 and terminated:
            g, thunk = kept[0]
            if g is not None:
                ctx.facts.assume(g)
            return thunk(ctx)
        pre = ctx.facts
        built: list[tuple[Expr | None, tuple[Stmt, ...]]] = []
        exits: list[Facts] = []
        for i, (g, thunk) in enumerate(kept):
            branch = pre.copy()
            for pg, _ in kept[:i]:
                if pg is not None:
                    branch.assume_false(pg)
            if g is not None:
                branch.assume(g)
            bctx = ctx.branch(branch)
            body = thunk(bctx)
            built.append((g, body))
            exits.append(bctx.facts)
        if not terminated:
            fall = pre.copy()
            for pg, _ in kept:
                if pg is not None:
                    fall.assume_false(pg)
            exits.append(fall)
        ctx.facts = merge(exits)
        return self._shape_if(built)

    def _shape_if(
        self, built: list[tuple[Expr | None, tuple[Stmt, ...]]]
    ) -> tuple[Stmt, ...]:
        if all(not body for _, body in built):
            return ()
        if not self.style.explicit_complements:
            while built and built[-1][0] is None and not built[-1][1]:
                built = built[:-1]
            if not built:
                return ()
            return (SIf(tuple(built)),)
        return (self._nest(built),)

    def _nest(self, built: list[tuple[Expr | None, tuple[Stmt, ...]]]) -> SIf:
        (g, body), rest = built[0], built[1:]
        if g is None:  # lone catch-all: caller guarantees arms are nonempty
            raise AssertionError("catch-all arm cannot lead a conditional")
        if not rest:
            return SIf(((g, body), (complement(g), ())))
        if len(rest) == 1 and rest[0][0] is None:
            return SIf(((g, body), (complement(g), rest[0][1])))
        return SIf(((g, body), (complement(g), (self._nest(rest),))))

    # --------------------------------------------------------------- entry

    def _enter_state(self, sid: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        parent = self.c.parent_of(sid)
        out: list[Stmt] = []
        if self.c.decomposition(parent) == "sequential":
            st = SAssign(self._code(parent), self._in(sid))
        else:
            st = SAssign(self._active(sid), IntLit(1))
        out.append(st)
        ctx.facts.assign(st.lhs, st.rhs)
        if parent != self.c.identifier and self.c.states[parent].has_history:
            rec = SAssign(self._hist(parent), self._in(sid))
            out.append(rec)
            ctx.facts.assign(rec.lhs, rec.rhs)
        out += self._assign_only(
            self.c.states[sid].entry, f"entry actions of state {sid!r}", ctx
        )
        return tuple(out) + self._enter_children(sid, ctx)

    def _enter_children(self, scope: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        kids = self.c.children(scope)
        if not kids:
            return ()
        if self.c.decomposition(scope) == "parallel":
            if scope != self.c.identifier and self.c.states[scope].has_history:
                raise UnsupportedFeature(
                    "history on a parallel decomposition has no state encoding",
                    f"state {scope!r}",
                )
            out: tuple[Stmt, ...] = ()
            for kid in kids:
                out += self._enter_state(kid, ctx)
            return out
        has_hist = scope != self.c.identifier and self.c.states[scope].has_history
        if not has_hist:
            return self._default_path(scope, ctx)
        return self._history_dispatch(scope, ctx)

    def _history_dispatch(self, scope: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        kids = self.c.children(scope)
        hist = self._hist(scope)
        arms: list[_Arm] = [
            (Binary("==", hist, self._in(kid)), self._thunk_enter(kid))
            for kid in reversed(kids)
        ]
        default_guard = Binary("==", hist, IntLit(0)) if self.has_locals else None
        arms.append((default_guard, lambda c: self._default_path(scope, c)))
        return self._dispatch_with_collapse(ctx, arms, trailing_merge=True)

    def _thunk_enter(self, sid: str):
        return lambda c: self._enter_state(sid, c)

    def _default_path(self, scope: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        ts = self.c.default_transitions(scope)
        if not ts:
            raise UnsupportedFeature(
                "no default transition for a sequential scope", f"scope {scope!r}"
            )
        return self._alternative_chain(
            ts,
            ctx,
            complete=lambda t, tas, c: self._complete_default(scope, t, tas, c),
            fail=None,
            what=f"default path of scope {scope!r}",
        )

    def _complete_default(self, scope, t, tas, ctx) -> tuple[Stmt, ...]:
        target = t.target
        if self.c.parent_of(target) != scope:
            raise UnsupportedFeature(
                "default path leaves its scope", f"transition {t.id!r}"
            )
        return self._emit_actions(
            tas, scope, ctx, tail=lambda c: self._enter_state(target, c)
        )

    # ---------------------------------------------------------------- exit

    def _exit_state(self, sid: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        out = self._exit_children(sid, ctx)
        out += self._assign_only(
            self.c.states[sid].exit, f"exit actions of state {sid!r}", ctx
        )
        parent = self.c.parent_of(sid)
        if self.c.decomposition(parent) == "sequential":
            st = SAssign(self._code(parent), IntLit(0))
        else:
            st = SAssign(self._active(sid), IntLit(0))
        ctx.facts.assign(st.lhs, st.rhs)
        return out + (st,)

    def _exit_children(self, scope: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        kids = self.c.children(scope)
        if not kids:
            return ()
        if self.c.decomposition(scope) == "parallel":
            out: tuple[Stmt, ...] = ()
            for kid in reversed(kids):
                out += self._exit_state(kid, ctx)
            return out
        code = self._code(scope)
        arms: list[_Arm] = [
            (Binary("==", code, self._in(kid)), self._thunk_exit(kid))
            for kid in reversed(kids)
        ]
        if not self.has_locals:
            arms[-1] = (None, arms[-1][1])
        return self._dispatch_with_collapse(ctx, arms, trailing_merge=False)

    def _thunk_exit(self, sid: str):
        return lambda c: self._exit_state(sid, c)

    def _dispatch_with_collapse(
        self, ctx: _Ctx, arms: list[_Arm], *, trailing_merge: bool
    ) -> tuple[Stmt, ...]:
        """Like _if, but merges arms whose bodies come out identical: all-equal
        dispatches collapse to straight-line code, and (for history) trailing
        arms equal to the final default arm are absorbed into it."""
        kept, terminated = self._select_arms(ctx, arms)
        if not kept:
            return ()
        if len(kept) == 1 and terminated:
            g, thunk = kept[0]
            if g is not None:
                ctx.facts.assume(g)
            return thunk(ctx)
        pre = ctx.facts
        built: list[tuple[Expr | None, tuple[Stmt, ...]]] = []
        exits: list[Facts] = []
        for i, (g, thunk) in enumerate(kept):
            branch = pre.copy()
            for pg, _ in kept[:i]:
                if pg is not None:
                    branch.assume_false(pg)
            if g is not None:
                branch.assume(g)
            bctx = ctx.branch(branch)
            built.append((g, thunk(bctx)))
            exits.append(bctx.facts)
        if not terminated:
            fall = pre.copy()
            for pg, _ in kept:
                if pg is not None:
                    fall.assume_false(pg)
            exits.append(fall)
        ctx.facts = merge(exits)
        if terminated and all(body == built[-1][1] for _, body in built):
            return built[-1][1]
        if trailing_merge and terminated:
            last = built[-1]
            while len(built) > 1 and built[-2][1] == last[1]:
                built = built[:-2] + [last]
        return self._shape_if(built)

    # ------------------------------------------------------------ execution

    def _exec_children(self, scope: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        kids = self.c.children(scope)
        if not kids:
            return ()
        if self.c.decomposition(scope) == "parallel":
            if scope not in self._noted_scopes:
                self._noted_scopes.add(scope)
                self._note(
                    "parallelism-elimination",
                    f"regions of {scope!r} sequentialized in declaration order",
                )
            out: tuple[Stmt, ...] = ()
            for kid in kids:
                out += self._if(
                    ctx,
                    [(Binary("!=", self._active(kid), IntLit(0)), self._thunk_exec(kid))],
                )
            return out
        code = self._code(scope)
        arms: list[_Arm] = [
            (Binary("==", code, self._in(kid)), self._thunk_exec(kid))
            for kid in reversed(kids)
        ]
        if not self.has_locals:
            arms[-1] = (None, arms[-1][1])
        return self._if(ctx, arms)

    def _thunk_exec(self, sid: str):
        return lambda c: self._exec_state(sid, c)

    def _exec_state(self, sid: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        outers: list[TransitionDef] = []
        inners: list[TransitionDef] = []
        my_parent = self.c.parent_of(sid)
        for t in self.c.outgoing(sid):
            hop = t.target
            hop_parent = self.c.parent_of(hop)
            if hop_parent == my_parent:
                outers.append(t)
            elif hop_parent == sid and hop in self.c.states:
                inners.append(t)
            else:
                raise UnsupportedFeature(
                    "transition target crosses scope levels", f"transition {t.id!r}"
                )
        ordered = outers + inners
        inner_ids = {t.id for t in inners}

        def complete(t: TransitionDef, tas, c: _Ctx) -> tuple[Stmt, ...]:
            if t.id in inner_ids:
                exit_part = self._exit_children(sid, c)
                context = sid
            else:
                if self.c.parent_of(t.target) != my_parent:
                    raise UnsupportedFeature(
                        "transition target crosses scope levels",
                        f"transition {t.id!r}",
                    )
                exit_part = self._exit_state(sid, c)
                context = my_parent
            enter = lambda c2: self._enter_state(t.target, c2)
            return exit_part + self._emit_actions(tas, context, c, tail=enter)

        return self._alternative_chain(
            ordered,
            ctx,
            complete=complete,
            fail=lambda c: self._state_body(sid, c),
            what=f"transitions of state {sid!r}",
        )

    def _state_body(self, sid: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        st = self.c.states[sid]
        ons = list(st.on_actions)
        return self._emit_actions(
            st.during, sid, ctx, tail=lambda c: self._on_blocks(sid, ons, c)
        )

    def _on_blocks(self, sid: str, ons: list, ctx: _Ctx) -> tuple[Stmt, ...]:
        if not ons:
            return self._exec_children(sid, ctx)
        (ev, acts), rest = ons[0], ons[1:]
        block = self._if(
            ctx,
            [
                (
                    Binary("==", ctx.tid, IntLit(self.L.event_id[ev])),
                    lambda c: self._emit_actions(acts, sid, c),
                )
            ],
        )
        if any(isinstance(a, Send) for a in acts):
            # the broadcast may have retired this state; everything after the
            # handler needs the status re-established
            return block + self._if(
                ctx,
                [(self._status_test(sid), lambda c: self._on_blocks(sid, rest, c))],
            )
        return block + self._on_blocks(sid, rest, ctx)

    # -------------------------------------------------- transition chains

    def _trans_guard(self, t: TransitionDef, ctx: _Ctx, *, junction: bool) -> Expr | None:
        if t.trigger is not None and t.condition is not None:
            raise UnsupportedFeature(
                "transition combines a trigger with a condition",
                f"transition {t.id!r}",
            )
        if t.trigger is not None:
            if junction or t.source is None:
                raise UnsupportedFeature(
                    "trigger is only supported on state-to-state segments",
                    f"transition {t.id!r}",
                )
            return Binary("==", ctx.tid, IntLit(self.L.event_id[t.trigger]))
        if t.condition is not None:
            return self._guard(t.condition)
        return None

    def _alternative_chain(self, ts, ctx, *, complete, fail, what) -> tuple[Stmt, ...]:
        """Priority-ordered alternatives; `fail` (or nothing) when none fires.
        A chain with no unconditional alternative and no fail behavior is a
        completeness hole only for default paths, which pass fail=None."""
        arms: list[_Arm] = []
        closed = False
        for t in ts:
            g = self._trans_guard(t, ctx, junction=t.source in self.c.junctions)
            thunk = self._fire_thunk(t, complete)
            arms.append((g, thunk))
            if g is None:
                closed = True
                break
        if not closed:
            if fail is None:
                raise UnsupportedFeature(
                    "path can fail at runtime; the last alternative must be "
                    "unconditional",
                    what,
                )
            arms.append((None, fail))
        return self._if(ctx, arms)

    def _fire_thunk(self, t: TransitionDef, complete):
        def run(c: _Ctx) -> tuple[Stmt, ...]:
            return self._fire(t, (), frozenset(), complete, c)

        return run

    def _fire(self, t, tas, visited, complete, ctx: _Ctx) -> tuple[Stmt, ...]:
        out = self._assign_only(
            t.condition_action, f"condition actions of transition {t.id!r}", ctx
        )
        tas = tas + tuple(t.transition_action)
        if t.target in self.c.junctions:
            j = t.target
            if j in visited:
                raise UnsupportedFeature("junction cycle", f"junction {j!r}")
            nxt = self.c.outgoing(j)
            if not nxt:
                raise UnsupportedFeature("junction has no outgoing path", f"junction {j!r}")
            arms: list[_Arm] = []
            closed = False
            for tj in nxt:
                g = self._trans_guard(tj, ctx, junction=True)
                thunk = (
                    lambda tj=tj: lambda c: self._fire(
                        tj, tas, visited | {j}, complete, c
                    )
                )()
                arms.append((g, thunk))
                if g is None:
                    closed = True
                    break
            if not closed:
                raise UnsupportedFeature(
                    "junction requires backtracking; the last alternative must "
                    "be unconditional",
                    f"junction {j!r}",
                )
            return out + self._if(ctx, arms)
        return out + complete(t, tas, ctx)

    # --------------------------------------------------------------- actions

    def _assign_only(self, actions, what: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        out = []
        for a in actions:
            if isinstance(a, Send):
                raise UnsupportedFeature(
                    "local-event send has no encoding here", what
                )
            st = SAssign(Field(*self.L.var_slot[a.target]), self._rewrite(a.value))
            ctx.facts.assign(st.lhs, st.rhs)
            out.append(st)
        return tuple(out)

    def _emit_actions(self, actions, context: str, ctx: _Ctx, tail=None) -> tuple[Stmt, ...]:
        """Emit an action list; `tail` continues after it. A send splits the
        emission: everything after it runs only if `context` is still active."""
        out: list[Stmt] = []
        for i, a in enumerate(actions):
            if isinstance(a, Assign):
                st = SAssign(Field(*self.L.var_slot[a.target]), self._rewrite(a.value))
                ctx.facts.assign(st.lhs, st.rhs)
                out.append(st)
                continue
            self._check_send_position(context, a.event)
            sent = self._emit_send(a.event, ctx)
            rest_actions = actions[i + 1 :]

            def rest(c: _Ctx, rest_actions=rest_actions, tail=tail):
                return self._emit_actions(rest_actions, context, c, tail)

            if rest_actions or tail is not None:
                guarded = self._if(ctx, [(self._status_test(context), rest)])
                return tuple(out) + sent + guarded
            return tuple(out) + sent
        return tuple(out) + (tail(ctx) if tail is not None else ())

    def _check_send_position(self, context: str, ev: str) -> None:
        if self.c.event_kind(ev) != "local":
            raise UnsupportedFeature(
                "only local events can be sent", f"event {ev!r}"
            )
        cur = context
        while cur != self.c.identifier:
            parent = self.c.parent_of(cur)
            if self.c.decomposition(parent) == "parallel" and self.c.children(parent)[-1] != cur:
                raise UnsupportedFeature(
                    "send from a region that is not last in its parallel "
                    "decomposition; the broadcast could outrun a sibling",
                    f"state {cur!r}",
                )
            cur = parent

    def _emit_send(self, ev: str, ctx: _Ctx) -> tuple[Stmt, ...]:
        ev_id = self.L.event_id[ev]
        if not self.style.inline_broadcasts:
            ctx.facts.havoc_call()
            return (SCall(output_function_name(self.c), (IntLit(ev_id),)),)
        depth = ctx.depth + 1
        if depth > self.style.depth_limit:
            raise UnsupportedFeature(
                f"broadcast expansion diverged (depth limit {self.style.depth_limit})",
                f"event {ev!r}",
            )
        sub = _Ctx(facts=ctx.facts, tid=IntLit(ev_id), specialize=True, depth=depth)
        stmts = self._step_core(sub)
        ctx.facts = sub.facts
        self._note(
            "parallelism-elimination",
            f"broadcast of {ev!r} inlined as a specialized step copy "
            f"({len(stmts)} statements, depth {depth})",
        )
        return stmts


# ------------------------------------------------------------------ cleanup


def _reads(e: Expr, key: tuple[str, str]) -> bool:
    return key in expr_fields(e)


def collapse_dead_stores(body: tuple[Stmt, ...]) -> tuple[Stmt, ...]:
    """Drop a store whose target is overwritten later in the same flat block
    with no read of it in between. Conditionals and calls end the scan: a
    store feeding a call (the broadcast case) is always preserved."""
    out: list[Stmt] = []
    for st in body:
        if isinstance(st, SIf):
            out.append(
                SIf(tuple((g, collapse_dead_stores(b)) for g, b in st.arms))
            )
        else:
            out.append(st)
    keep = [True] * len(out)
    for i, st in enumerate(out):
        if not isinstance(st, SAssign):
            continue
        key = (st.lhs.record, st.lhs.name)
        for later in out[i + 1 :]:
            if not isinstance(later, SAssign) or _reads(later.rhs, key):
                break
            if (later.lhs.record, later.lhs.name) == key:
                keep[i] = False
                break
    return tuple(st for st, k in zip(out, keep) if k)
