"""Operational semantics: single steps and exhaustive state-space generation.

A state is a closed behaviour term.  Source locations never influence
state identity (the tree types exclude them from equality), and
``normalize`` additionally strips them so stored states are canonical.

Value offers are expanded when an action prefix fires: a receive "?x: S"
yields one step per value of S, with the chosen value substituted into the
continuation.  After that expansion every label is ground, so parallel
synchronisation is plain label equality.

Successful termination is a distinguished label (rendered "exit") that all
parallel operators synchronise on, that enable turns into an internal step
into its continuation, and that discharges a disrupting branch.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field, replace

from .syntax import ast

# ----------------------------------------------------------------------
# transition labels


@dataclass(frozen=True)
class Internal:
    """The unobservable action."""


@dataclass(frozen=True)
class Terminate:
    """Successful termination (the delta event)."""


@dataclass(frozen=True)
class Observable:
    gate: str
    values: tuple[str, ...] = ()


Action = Internal | Terminate | Observable


def render_action(a: Action) -> str:
    """Canonical label text: "i", "exit", or "gate !v1 !v2"."""
    if isinstance(a, Internal):
        return "i"
    if isinstance(a, Terminate):
        return "exit"
    return " ".join([a.gate] + [f"!{v}" for v in a.values])


# ----------------------------------------------------------------------
# errors


class UnguardedRecursionError(Exception):
    """A process can be unfolded forever without offering an action."""

    def __init__(self, process: str):
        super().__init__(
            f"process '{process}' recurses without an intervening action"
        )
        self.process = process


class BudgetExceededError(Exception):
    def __init__(self, kind: str, limit: int):
        super().__init__(f"state space exceeds the {kind} budget of {limit}")
        self.kind = kind
        self.limit = limit


# Unfoldings tolerated while searching for the next action.  Mutual
# recursion through n guard-free definitions needs n unfoldings, so this
# only trips on genuinely unguarded loops.
UNFOLD_LIMIT = 1000


# ----------------------------------------------------------------------
# substitution


def collect_gates(b: ast.Behavior) -> set[str]:
    """Every gate name occurring in the term, bound or free."""
    out: set[str] = set()
    stack = [b]
    while stack:
        node = stack.pop()
        if isinstance(node, ast.Prefix):
            if isinstance(node.action, ast.Comm):
                out.add(node.action.gate)
            stack.append(node.rest)
        elif isinstance(node, ast.Par):
            out |= node.gates
            stack.extend((node.left, node.right))
        elif isinstance(node, ast.Hide):
            out |= node.gates
            stack.append(node.body)
        elif isinstance(node, ast.Inst):
            out |= set(node.gates)
        elif isinstance(node, (ast.Choice, ast.Seq, ast.Disrupt)):
            stack.extend((node.left, node.right))
    return out


def substitute_gates(b: ast.Behavior, mapping: dict[str, str]) -> ast.Behavior:
    """Rename free gates.  Hide binds gates; bound occurrences are kept,
    and a bound gate that would capture a renamed one is freshened first."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return b

    if isinstance(b, (ast.Stop, ast.Exit)):
        return b
    if isinstance(b, ast.Prefix):
        action = b.action
        if isinstance(action, ast.Comm) and action.gate in mapping:
            action = replace(action, gate=mapping[action.gate])
        return replace(b, action=action, rest=substitute_gates(b.rest, mapping))
    if isinstance(b, (ast.Choice, ast.Seq, ast.Disrupt)):
        return replace(
            b,
            left=substitute_gates(b.left, mapping),
            right=substitute_gates(b.right, mapping),
        )
    if isinstance(b, ast.Par):
        return replace(
            b,
            left=substitute_gates(b.left, mapping),
            gates=frozenset(mapping.get(g, g) for g in b.gates),
            right=substitute_gates(b.right, mapping),
        )
    if isinstance(b, ast.Inst):
        return replace(b, gates=tuple(mapping.get(g, g) for g in b.gates))
    if isinstance(b, ast.Hide):
        inner = {k: v for k, v in mapping.items() if k not in b.gates}
        if not inner:
            return b
        captured = sorted(b.gates & set(inner.values()))
        body, bound = b.body, b.gates
        if captured:
            taken = collect_gates(b.body) | set(inner.values()) | bound
            freshened: dict[str, str] = {}
            for g in captured:
                n = 1
                while f"{g}#{n}" in taken:
                    n += 1
                freshened[g] = f"{g}#{n}"
                taken.add(f"{g}#{n}")
            body = substitute_gates(body, freshened)
            bound = frozenset(freshened.get(g, g) for g in bound)
        return ast.Hide(bound, substitute_gates(body, inner))
    raise TypeError(f"unknown behaviour node {b!r}")


def substitute_values(b: ast.Behavior, env: dict[str, ast.ValueLit]) -> ast.Behavior:
    """Replace free value variables by literals.  Receives bind variables,
    so a re-bound name stops substituting in the continuation."""
    if not env:
        return b
    if isinstance(b, (ast.Stop, ast.Exit, ast.Inst)):
        return b
    if isinstance(b, ast.Prefix):
        action = b.action
        rest_env = env
        if isinstance(action, ast.Comm):
            offers = []
            for o in action.offers:
                if isinstance(o, ast.Send):
                    e = o.expr
                    if isinstance(e, ast.VarRef) and e.name in env:
                        o = replace(o, expr=env[e.name])
                    offers.append(o)
                else:
                    if o.var in rest_env:
                        if rest_env is env:
                            rest_env = dict(env)
                        del rest_env[o.var]
                    offers.append(o)
            action = replace(action, offers=tuple(offers))
        return replace(b, action=action, rest=substitute_values(b.rest, rest_env))
    if isinstance(b, (ast.Choice, ast.Seq, ast.Disrupt)):
        return replace(
            b,
            left=substitute_values(b.left, env),
            right=substitute_values(b.right, env),
        )
    if isinstance(b, ast.Par):
        return replace(
            b,
            left=substitute_values(b.left, env),
            right=substitute_values(b.right, env),
        )
    if isinstance(b, ast.Hide):
        return replace(b, body=substitute_values(b.body, env))
    raise TypeError(f"unknown behaviour node {b!r}")


def normalize(b: ast.Behavior) -> ast.Behavior:
    """Strip source locations, giving a canonical representative.
    Idempotent, and never changes equality (locations are not compared)."""
    if b.loc is not None:
        b = replace(b, loc=None)
    if isinstance(b, ast.Prefix):
        action = b.action
        if action.loc is not None:
            action = replace(action, loc=None)
        if isinstance(action, ast.Comm):
            offers = tuple(_normalize_offer(o) for o in action.offers)
            if offers != action.offers:
                action = replace(action, offers=offers)
        return replace(b, action=action, rest=normalize(b.rest))
    if isinstance(b, (ast.Choice, ast.Seq, ast.Disrupt, ast.Par)):
        return replace(b, left=normalize(b.left), right=normalize(b.right))
    if isinstance(b, ast.Hide):
        return replace(b, body=normalize(b.body))
    return b


def _normalize_offer(o: ast.Offer) -> ast.Offer:
    if o.loc is not None:
        o = replace(o, loc=None)
    if isinstance(o, ast.Send) and o.expr.loc is not None:
        o = replace(o, expr=replace(o.expr, loc=None))
    return o


# ----------------------------------------------------------------------
# single steps


def unfold(inst: ast.Inst, spec: ast.Specification) -> ast.Behavior:
    """Replace an instantiation by the defining body, actual gates in
    place of formals."""
    target = spec.process(inst.process)
    if target is None:
        raise ValueError(f"process '{inst.process}' is not defined")
    if len(inst.gates) != len(target.formal_gates):
        raise ValueError(f"gate arity mismatch instantiating '{inst.process}'")
    return substitute_gates(target.body, dict(zip(target.formal_gates, inst.gates)))


def successors(b: ast.Behavior, spec: ast.Specification) -> list[tuple[Action, ast.Behavior]]:
    """All single steps from a closed behaviour, in a deterministic order."""
    # an unguarded loop may legitimately nest UNFOLD_LIMIT operator frames
    # before the fuel runs out; leave the interpreter room for that
    if sys.getrecursionlimit() < 12 * UNFOLD_LIMIT:
        sys.setrecursionlimit(12 * UNFOLD_LIMIT)
    return _succ(b, spec, UNFOLD_LIMIT)


def _succ(b: ast.Behavior, spec: ast.Specification, fuel: int) -> list[tuple[Action, ast.Behavior]]:
    while isinstance(b, ast.Inst):
        if fuel <= 0:
            raise UnguardedRecursionError(b.process)
        fuel -= 1
        b = unfold(b, spec)

    if isinstance(b, ast.Stop):
        return []
    if isinstance(b, ast.Exit):
        return [(Terminate(), ast.Stop())]

    if isinstance(b, ast.Prefix):
        return _prefix_steps(b, spec)

    if isinstance(b, ast.Choice):
        return _succ(b.left, spec, fuel) + _succ(b.right, spec, fuel)

    if isinstance(b, ast.Par):
        return _par_steps(b, spec, fuel)

    if isinstance(b, ast.Hide):
        out = []
        for a, nxt in _succ(b.body, spec, fuel):
            if isinstance(a, Observable) and a.gate in b.gates:
                a = Internal()
            out.append((a, ast.Hide(b.gates, nxt)))
        return out

    if isinstance(b, ast.Seq):
        out = []
        for a, nxt in _succ(b.left, spec, fuel):
            if isinstance(a, Terminate):
                out.append((Internal(), b.right))
            else:
                out.append((a, ast.Seq(nxt, b.right)))
        return out

    if isinstance(b, ast.Disrupt):
        out = []
        for a, nxt in _succ(b.left, spec, fuel):
            if isinstance(a, Terminate):
                out.append((a, nxt))
            else:
                out.append((a, ast.Disrupt(nxt, b.right)))
        out.extend(_succ(b.right, spec, fuel))
        return out

    raise TypeError(f"unknown behaviour node {b!r}")


def _prefix_steps(b: ast.Prefix, spec: ast.Specification) -> list[tuple[Action, ast.Behavior]]:
    action = b.action
    if isinstance(action, ast.InternalAction):
        return [(Internal(), b.rest)]

    receives = [o for o in action.offers if isinstance(o, ast.Receive)]
    if not receives:
        values = []
        for o in action.offers:
            assert isinstance(o, ast.Send)
            if not isinstance(o.expr, ast.ValueLit):
                raise ValueError(f"unbound variable '{o.expr.name}' at gate '{action.gate}'")
            values.append(o.expr.value)
        return [(Observable(action.gate, tuple(values)), b.rest)]

    domains = []
    for o in receives:
        sort = spec.sort(o.sort)
        if sort is None:
            raise ValueError(f"sort '{o.sort}' is not declared")
        domains.append(sort.values)

    out: list[tuple[Action, ast.Behavior]] = []
    for chosen in itertools.product(*domains):
        picked = iter(chosen)
        # offers bind left to right, so a send may mention a receive
        # variable introduced earlier in the same action
        env: dict[str, ast.ValueLit] = {}
        values = []
        for o in action.offers:
            if isinstance(o, ast.Receive):
                v = next(picked)
                env[o.var] = ast.ValueLit(v, o.sort)
                values.append(v)
            elif isinstance(o.expr, ast.ValueLit):
                values.append(o.expr.value)
            elif o.expr.name in env:
                values.append(env[o.expr.name].value)
            else:
                raise ValueError(f"unbound variable '{o.expr.name}' at gate '{action.gate}'")
        out.append((Observable(action.gate, tuple(values)), substitute_values(b.rest, env)))
    return out


def _par_steps(b: ast.Par, spec: ast.Specification, fuel: int) -> list[tuple[Action, ast.Behavior]]:
    if b.kind is ast.ParKind.INTERLEAVE:
        def syncs(a: Action) -> bool:
            return isinstance(a, Terminate)
    elif b.kind is ast.ParKind.FULL:
        def syncs(a: Action) -> bool:
            return not isinstance(a, Internal)
    else:
        def syncs(a: Action) -> bool:
            return isinstance(a, Terminate) or (
                isinstance(a, Observable) and a.gate in b.gates
            )

    left_steps = _succ(b.left, spec, fuel)
    right_steps = _succ(b.right, spec, fuel)

    out: list[tuple[Action, ast.Behavior]] = []
    for a, nxt in left_steps:
        if not syncs(a):
            out.append((a, replace(b, left=nxt)))
    for a, nxt in right_steps:
        if not syncs(a):
            out.append((a, replace(b, right=nxt)))
    for a, lnxt in left_steps:
        if not syncs(a):
            continue
        for c, rnxt in right_steps:
            if a == c:
                out.append((a, replace(b, left=lnxt, right=rnxt)))
    return out


def strip_hiding(spec: ast.Specification) -> ast.Specification:
    """Remove every hide operator so hidden gates show up observably;
    used to inspect or monitor interactions a composition encapsulates."""

    def strip(b: ast.Behavior) -> ast.Behavior:
        if isinstance(b, ast.Hide):
            return strip(b.body)
        if isinstance(b, ast.Prefix):
            return replace(b, rest=strip(b.rest))
        if isinstance(b, (ast.Choice, ast.Seq, ast.Disrupt, ast.Par)):
            return replace(b, left=strip(b.left), right=strip(b.right))
        return b

    return replace(
        spec,
        top_behavior=strip(spec.top_behavior),
        processes=tuple(replace(p, body=strip(p.body)) for p in spec.processes),
    )


# ----------------------------------------------------------------------
# state-space generation


@dataclass(frozen=True)
class ExplorationBudget:
    max_states: int = 100_000
    max_transitions: int = 500_000


@dataclass
class Lts:
    """Explicit transition system.  States are 0..num_states-1 in
    breadth-first discovery order, 0 initial; per state, transitions are
    ordered by label text then by printed target form, and the global list
    is grouped by source state.  forms maps states back to behaviour terms
    when the system was generated from one (None when read from a file)."""

    num_states: int
    transitions: list[tuple[int, str, int]]
    initial: int = 0
    forms: list[ast.Behavior] | None = None
    _outgoing: dict[int, list[tuple[str, int]]] | None = field(
        default=None, repr=False, compare=False
    )

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    def form_text(self, state: int) -> str | None:
        from .syntax.printer import pretty_behavior

        if self.forms is None:
            return None
        return pretty_behavior(self.forms[state])

    def outgoing(self, state: int) -> list[tuple[str, int]]:
        if self._outgoing is None:
            table: dict[int, list[tuple[str, int]]] = {s: [] for s in range(self.num_states)}
            for src, label, dst in self.transitions:
                table[src].append((label, dst))
            self._outgoing = table
        return self._outgoing[state]

    def labels(self) -> list[str]:
        return sorted({label for _, label, _ in self.transitions})


def generate_lts(
    spec: ast.Specification,
    budget: ExplorationBudget | None = None,
) -> Lts:
    """Breadth-first exploration of every reachable state.

    New states are numbered in discovery order; ties inside one source
    state follow the per-state transition order (label text, then printed
    target), which makes the numbering reproducible.
    """
    from .syntax.printer import pretty_behavior

    budget = budget or ExplorationBudget()
    initial = normalize(spec.top_behavior)
    ids: dict[ast.Behavior, int] = {initial: 0}
    forms: list[ast.Behavior] = [initial]
    transitions: list[tuple[int, str, int]] = []
    frontier = [initial]

    while frontier:
        next_frontier: list[ast.Behavior] = []
        for state in frontier:
            src = ids[state]
            steps: dict[tuple[str, ast.Behavior], str] = {}
            for action, target in successors(state, spec):
                tgt = normalize(target)
                steps.setdefault((render_action(action), tgt), pretty_behavior(tgt))
            ordered = sorted(steps.items(), key=lambda kv: (kv[0][0], kv[1]))
            for (label, tgt), _pretty in ordered:
                dst = ids.get(tgt)
                if dst is None:
                    dst = len(forms)
                    if dst >= budget.max_states:
                        raise BudgetExceededError("state", budget.max_states)
                    ids[tgt] = dst
                    forms.append(tgt)
                    next_frontier.append(tgt)
                if len(transitions) >= budget.max_transitions:
                    raise BudgetExceededError("transition", budget.max_transitions)
                transitions.append((src, label, dst))
        frontier = next_frontier

    return Lts(num_states=len(forms), transitions=transitions, forms=forms)
