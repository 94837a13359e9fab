"""Abstract syntax of the Basic LOTOS subset with finite-sort value offers.

All nodes are frozen dataclasses.  Structural equality and hashing
deliberately ignore the source span (`loc`): the state-space explorer
uses behaviour trees as state identities, and two syntactically equal
continuations reached through different source positions must collapse
into one state.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .diagnostics import Span


def _loc_field():
    return field(default=None, compare=False, hash=False, repr=False)


# ---------------------------------------------------------------------------
# Value expressions inside offers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValueLit:
    """A concrete value of a declared finite sort."""

    value: str
    sort: str
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class VarRef:
    """A variable bound by an enclosing receive offer."""

    name: str
    loc: Span | None = _loc_field()


ValueExpr = ValueLit | VarRef


# ---------------------------------------------------------------------------
# Offers and actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Send:
    """``!e``: offer a concrete value (or a bound variable's value)."""

    expr: ValueExpr
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Receive:
    """``?x:S``: bind ``x`` to any value of sort ``S``."""

    var: str
    sort: str
    loc: Span | None = _loc_field()


Offer = Send | Receive


@dataclass(frozen=True)
class InternalAction:
    """The unobservable action ``i``."""

    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Comm:
    """A (possibly value-carrying) action at a gate; no offers means
    pure synchronization."""

    gate: str
    offers: tuple[Offer, ...] = ()
    loc: Span | None = _loc_field()


ActionExpr = InternalAction | Comm


# ---------------------------------------------------------------------------
# Behaviour expressions
# ---------------------------------------------------------------------------

class Behavior:
    """Common base for all behaviour nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Stop(Behavior):
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Exit(Behavior):
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Prefix(Behavior):
    action: ActionExpr
    rest: Behavior
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Choice(Behavior):
    left: Behavior
    right: Behavior
    loc: Span | None = _loc_field()


class ParKind(enum.Enum):
    """The three parallel forms: free interleaving ``|||``, synchronization
    on every gate ``||``, and an explicit gate set ``|[...]|``."""

    INTERLEAVE = "|||"
    FULL = "||"
    GATES = "|[]|"


@dataclass(frozen=True)
class Par(Behavior):
    left: Behavior
    kind: ParKind
    gates: frozenset[str]  # only meaningful for ParKind.GATES
    right: Behavior
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Hide(Behavior):
    gates: frozenset[str]
    body: Behavior
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Seq(Behavior):
    """Sequential composition ``left >> right``; enabled by successful
    termination of the left operand."""

    left: Behavior
    right: Behavior
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Disrupt(Behavior):
    """``left [> right``: right may take over any time before left
    terminates."""

    left: Behavior
    right: Behavior
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Inst(Behavior):
    """Process instantiation with actual gates."""

    process: str
    gates: tuple[str, ...] = ()
    loc: Span | None = _loc_field()


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SortDecl:
    name: str
    values: tuple[str, ...]
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class ProcessDef:
    name: str
    formal_gates: tuple[str, ...]
    functionality: str  # "noexit" | "exit"
    body: Behavior
    loc: Span | None = _loc_field()


@dataclass(frozen=True)
class Specification:
    name: str
    top_gates: tuple[str, ...]
    sorts: tuple[SortDecl, ...]
    processes: tuple[ProcessDef, ...]
    top_behavior: Behavior
    loc: Span | None = _loc_field()

    def process(self, name: str) -> ProcessDef | None:
        for p in self.processes:
            if p.name == name:
                return p
        return None

    def sort(self, name: str) -> SortDecl | None:
        for s in self.sorts:
            if s.name == name:
                return s
        return None

    def value_sorts(self) -> dict[str, str]:
        """Map each declared value to its sort.  Values are required to be
        globally unique across sorts (enforced by the validator); on a
        clash the first declaration wins here."""
        table: dict[str, str] = {}
        for s in self.sorts:
            for v in s.values:
                table.setdefault(v, s.name)
        return table


def children(b: Behavior) -> tuple[Behavior, ...]:
    """Direct behaviour children of a node, for generic tree walks."""
    if isinstance(b, Prefix):
        return (b.rest,)
    if isinstance(b, (Choice, Seq, Disrupt)):
        return (b.left, b.right)
    if isinstance(b, Par):
        return (b.left, b.right)
    if isinstance(b, Hide):
        return (b.body,)
    return ()
