"""Static chart structure: states, transitions, junctions, events, data."""

from __future__ import annotations

from dataclasses import dataclass, field
from .ast import Action, Expr


@dataclass(frozen=True)
class EventDecl:
    name: str
    kind: str  # 'input' | 'local'


@dataclass(frozen=True)
class DataDecl:
    name: str
    kind: str  # 'input' | 'output' | 'local'
    sort: str  # 'int' | 'float'


@dataclass(frozen=True)
class StateDef:
    id: str
    parent: str  # state id or the chart identifier
    decomposition: str = "sequential"  # of this state's children
    child_order: tuple[str, ...] = ()
    entry: tuple[Action, ...] = ()
    during: tuple[Action, ...] = ()
    exit: tuple[Action, ...] = ()
    on_actions: tuple[tuple[str, tuple[Action, ...]], ...] = ()
    has_history: bool = False


@dataclass(frozen=True)
class TransitionDef:
    id: str
    source: str | None  # None = default transition
    target: str
    trigger: str | None = None
    condition: Expr | None = None
    condition_action: tuple[Action, ...] = ()
    transition_action: tuple[Action, ...] = ()
    order: int = 1


@dataclass(frozen=True)
class JunctionDef:
    id: str
    parent: str


@dataclass(frozen=True, eq=True)
class ChartDef:
    identifier: str
    states: dict[str, StateDef] = field(default_factory=dict)
    transitions: dict[str, TransitionDef] = field(default_factory=dict)
    junctions: dict[str, JunctionDef] = field(default_factory=dict)
    events: tuple[EventDecl, ...] = ()
    data: tuple[DataDecl, ...] = ()
    root_decomposition: str = "sequential"
    root_child_order: tuple[str, ...] = ()

    # -- structure helpers ----------------------------------------------

    def children(self, scope: str) -> tuple[str, ...]:
        if scope == self.identifier:
            return self.root_child_order
        return self.states[scope].child_order

    def decomposition(self, scope: str) -> str:
        if scope == self.identifier:
            return self.root_decomposition
        return self.states[scope].decomposition

    def parent_of(self, node: str) -> str:
        if node in self.states:
            return self.states[node].parent
        return self.junctions[node].parent

    def outgoing(self, source: str) -> list[TransitionDef]:
        """Transitions out of a state or junction, by priority."""
        out = [t for t in self.transitions.values() if t.source == source]
        out.sort(key=lambda t: t.order)
        return out

    def default_transitions(self, scope: str) -> list[TransitionDef]:
        """Default transitions whose target sits directly inside `scope`."""
        out = [
            t
            for t in self.transitions.values()
            if t.source is None and self.parent_of(t.target) == scope
        ]
        out.sort(key=lambda t: t.order)
        return out

    def event_id(self, name: str) -> int:
        for i, ev in enumerate(self.events, start=1):
            if ev.name == name:
                return i
        raise KeyError(name)

    def event_kind(self, name: str) -> str:
        for ev in self.events:
            if ev.name == name:
                return ev.kind
        raise KeyError(name)

    def data_decl(self, name: str) -> DataDecl:
        for d in self.data:
            if d.name == name:
                return d
        raise KeyError(name)

    def data_names(self, kind: str | None = None) -> list[str]:
        return [d.name for d in self.data if kind is None or d.kind == kind]

    def is_composite(self, sid: str) -> bool:
        return bool(self.children(sid))

    def ancestors(self, node: str) -> list[str]:
        """Chain of parents up to (and including) the chart identifier."""
        chain = []
        cur = node
        while cur != self.identifier:
            cur = self.parent_of(cur)
            chain.append(cur)
        return chain
