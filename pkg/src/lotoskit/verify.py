"""Property checking over explicit transition systems.

Everything here works on the Lts produced by the semantics (or read back
from an .aut file): deadlock freedom, reachability of a labelled step,
safety monitors run as a synchronous product, strong bisimulation with a
distinguishing experiment as evidence, quotient minimisation, and the
Aldebaran .aut exchange format.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .semantics import Lts
from .syntax.diagnostics import Diagnostic, SYNTAX_ERROR, Span, error

# ----------------------------------------------------------------------
# label patterns

_WILDCARD = "*"


@dataclass(frozen=True)
class LabelPattern:
    """Matches transition labels.  The gate is a name, "i", "exit", or "*"
    (any observable gate); offers are literal values or "*" per position
    and the offer count must match exactly."""

    gate: str
    offers: tuple[str, ...] = ()

    def matches(self, label: str) -> bool:
        parts = label.split()
        gate, values = parts[0], [p[1:] for p in parts[1:]]
        if self.gate in ("i", "exit"):
            return gate == self.gate
        if gate in ("i", "exit"):
            return False
        if self.gate != _WILDCARD and self.gate != gate:
            return False
        if len(self.offers) != len(values):
            return False
        return all(o == _WILDCARD or o == v for o, v in zip(self.offers, values))

    def __str__(self) -> str:
        return " ".join([self.gate] + [f"!{o}" for o in self.offers])


_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*\Z")


def parse_label_pattern(text: str) -> LabelPattern:
    """Parse "gate !v !*" style pattern text; raises ValueError."""
    parts = text.split()
    if not parts:
        raise ValueError("empty label pattern")
    gate = parts[0]
    if gate != _WILDCARD and not _IDENT.match(gate):
        raise ValueError(f"bad gate pattern '{gate}'")
    offers = []
    for p in parts[1:]:
        if not p.startswith("!"):
            raise ValueError(f"offer pattern '{p}' must start with '!'")
        v = p[1:]
        if v != _WILDCARD and not _IDENT.match(v):
            raise ValueError(f"bad offer pattern '{p}'")
        offers.append(v)
    if gate in ("i", "exit") and offers:
        raise ValueError(f"'{gate}' takes no offers")
    return LabelPattern(gate, tuple(offers))


# ----------------------------------------------------------------------
# results


@dataclass
class VerifyResult:
    ok: bool
    detail: str
    trace: list[str] | None = None

    def __bool__(self) -> bool:
        return self.ok


# ----------------------------------------------------------------------
# traces

def _parents(lts: Lts) -> dict[int, tuple[int, str]]:
    """First-discovery edge per state; transition order is breadth-first,
    so following these back gives a shortest path from the initial state."""
    parents: dict[int, tuple[int, str]] = {}
    for src, label, dst in lts.transitions:
        if dst != lts.initial and dst not in parents:
            parents[dst] = (src, label)
    return parents


def _trace_to(lts: Lts, state: int, parents: dict[int, tuple[int, str]]) -> list[str] | None:
    labels: list[str] = []
    cur = state
    while cur != lts.initial:
        edge = parents.get(cur)
        if edge is None or len(labels) >= lts.num_states:
            return None  # disconnected or cyclically ordered input
        cur, label = edge
        labels.append(label)
    labels.reverse()
    return labels


# ----------------------------------------------------------------------
# deadlock and reachability


def _terminated_states(lts: Lts) -> set[int]:
    """States that only successful termination leads into.  Such a state is
    a proper end, not a deadlock."""
    incoming: dict[int, set[str]] = {}
    for _, label, dst in lts.transitions:
        incoming.setdefault(dst, set()).add(label)
    return {s for s, labels in incoming.items() if labels == {"exit"}}


def check_deadlock(lts: Lts) -> VerifyResult:
    """ok when every reachable state can either move or has terminated."""
    terminated = _terminated_states(lts)
    parents = _parents(lts)
    for s in range(lts.num_states):
        if not lts.outgoing(s) and s not in terminated:
            form = lts.form_text(s)
            where = f"state {s}" if form is None else f"state {s} = {form}"
            return VerifyResult(
                ok=False,
                detail=f"deadlock at {where}",
                trace=_trace_to(lts, s, parents),
            )
    return VerifyResult(ok=True, detail=f"no deadlock in {lts.num_states} state(s)")


def check_reachable(lts: Lts, pattern: LabelPattern) -> VerifyResult:
    """ok when some reachable transition matches; the trace ends with it."""
    parents = _parents(lts)
    for src, label, _ in lts.transitions:
        if pattern.matches(label):
            prefix = _trace_to(lts, src, parents)
            trace = None if prefix is None else prefix + [label]
            return VerifyResult(ok=True, detail=f"'{label}' is reachable", trace=trace)
    return VerifyResult(ok=False, detail=f"no transition matches '{pattern}'")


# ----------------------------------------------------------------------
# safety monitors


@dataclass
class Monitor:
    """Deterministic observer.  On each label the first listed transition
    out of the current state whose pattern matches is taken; with no match
    the monitor stays put.  Reaching a bad state is a violation."""

    states: tuple[str, ...]
    initial: str
    bad: frozenset[str]
    rules: tuple[tuple[str, str, LabelPattern], ...]

    def step(self, state: str, label: str) -> str:
        for src, dst, pat in self.rules:
            if src == state and pat.matches(label):
                return dst
        return state


def parse_monitor(text: str, filename: str = "<monitor>") -> tuple[Monitor | None, list[Diagnostic]]:
    """Line format: "states a b ...", "initial a", "bad a ...",
    "trans src dst label-pattern"; '#' starts a comment."""
    states: list[str] = []
    initial: str | None = None
    bad: set[str] = set()
    rules: list[tuple[str, str, LabelPattern]] = []
    diags: list[Diagnostic] = []

    def fail(line_no: int, message: str) -> tuple[None, list[Diagnostic]]:
        diags.append(error(message, Span.point(line_no, 1), SYNTAX_ERROR))
        return None, diags

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        head, rest = parts[0], parts[1] if len(parts) > 1 else ""
        if head == "states":
            states.extend(rest.split())
        elif head == "initial":
            names = rest.split()
            if len(names) != 1:
                return fail(line_no, "initial takes exactly one state")
            initial = names[0]
        elif head == "bad":
            bad.update(rest.split())
        elif head == "trans":
            fields = rest.split(None, 2)
            if len(fields) < 3:
                return fail(line_no, "trans needs: source, target, label pattern")
            src, dst, pat_text = fields
            try:
                pat = parse_label_pattern(pat_text)
            except ValueError as exc:
                return fail(line_no, str(exc))
            rules.append((src, dst, pat))
        else:
            return fail(line_no, f"unknown directive '{head}'")

    if initial is None:
        return fail(1, "monitor has no initial state")
    known = set(states)
    for name in [initial, *sorted(bad)] + [s for r in rules for s in r[:2]]:
        if name not in known:
            return fail(1, f"state '{name}' is not listed under 'states'")
    return Monitor(tuple(states), initial, frozenset(bad), tuple(rules)), diags


def check_safety(lts: Lts, monitor: Monitor) -> VerifyResult:
    """Breadth-first product of system and monitor; ok when no bad monitor
    state is reachable.  A violation comes with a shortest trace."""
    start = (lts.initial, monitor.initial)
    seen: dict[tuple[int, str], tuple[tuple[int, str], str] | None] = {start: None}
    queue = [start]
    hit: tuple[int, str] | None = start if monitor.initial in monitor.bad else None

    while queue and hit is None:
        next_queue: list[tuple[int, str]] = []
        for prod in queue:
            s, m = prod
            for label, dst in lts.outgoing(s):
                nxt = (dst, monitor.step(m, label))
                if nxt in seen:
                    continue
                seen[nxt] = (prod, label)
                if nxt[1] in monitor.bad:
                    hit = nxt
                    break
                next_queue.append(nxt)
            if hit is not None:
                break
        queue = next_queue

    if hit is None:
        return VerifyResult(ok=True, detail=f"monitor stays out of {sorted(monitor.bad)}")

    labels: list[str] = []
    cur: tuple[int, str] | None = hit
    while cur is not None and seen[cur] is not None:
        prev, label = seen[cur]  # type: ignore[misc]
        labels.append(label)
        cur = prev
    labels.reverse()
    return VerifyResult(
        ok=False,
        detail=f"monitor reaches bad state '{hit[1]}'",
        trace=labels,
    )


# ----------------------------------------------------------------------
# strong bisimulation


def _refine(num_states: int, out: list[list[tuple[str, int]]]) -> tuple[list[int], list[list[int]]]:
    """Partition refinement; returns the stable block assignment and the
    whole refinement history (coarsest first)."""
    block = [0] * num_states
    history = [block]
    while True:
        keys: dict[tuple[int, frozenset[tuple[str, int]]], int] = {}
        new = []
        for s in range(num_states):
            sig = frozenset((label, block[dst]) for label, dst in out[s])
            key = (block[s], sig)
            if key not in keys:
                keys[key] = len(keys)
            new.append(keys[key])
        if new == block:
            return block, history
        block = new
        history.append(block)


def _out_table(lts: Lts, offset: int = 0) -> list[list[tuple[str, int]]]:
    table: list[list[tuple[str, int]]] = [[] for _ in range(lts.num_states)]
    for src, label, dst in lts.transitions:
        table[src].append((label, dst + offset))
    return table


def _distinguish(
    s1: int,
    s2: int,
    out: list[list[tuple[str, int]]],
    history: list[list[int]],
) -> list[str]:
    """One experiment a refuter can play to tell two non-bisimilar states
    apart: every label in the list is answered by the opponent until the
    last one, which exactly one side can perform."""
    depth = next(r for r, blocks in enumerate(history) if blocks[s1] != blocks[s2])
    prev = history[depth - 1]
    sig1 = {(label, prev[dst]) for label, dst in out[s1]}
    sig2 = {(label, prev[dst]) for label, dst in out[s2]}
    if sig1 - sig2:
        owner, other = s1, s2
        label, blk = min(sig1 - sig2)
    else:
        owner, other = s2, s1
        label, blk = min(sig2 - sig1)
    replies = [dst for lab, dst in out[other] if lab == label]
    if not replies:
        return [label]
    t_owner = next(dst for lab, dst in out[owner] if lab == label and prev[dst] == blk)
    # every reply sits outside blk at this depth, so the recursion works on
    # a pair that separated strictly earlier and terminates
    return [label] + _distinguish(t_owner, replies[0], out, history[:depth])


def bisim_equiv(a: Lts, b: Lts) -> VerifyResult:
    """Strong bisimulation equivalence of two systems."""
    out = _out_table(a) + _out_table(b, offset=a.num_states)
    block, history = _refine(a.num_states + b.num_states, out)
    s1, s2 = a.initial, a.num_states + b.initial
    if block[s1] == block[s2]:
        return VerifyResult(ok=True, detail="strongly bisimilar")
    trace = _distinguish(s1, s2, out, history)
    return VerifyResult(
        ok=False,
        detail="not strongly bisimilar; evidence is a distinguishing experiment "
        "whose last step only one side can answer",
        trace=trace,
    )


def minimize(lts: Lts) -> Lts:
    """Quotient by strong bisimilarity, renumbered breadth-first from the
    initial block (per block, transitions ordered by label text then by
    the target block's smallest original state)."""
    out = _out_table(lts)
    block, _ = _refine(lts.num_states, out)

    rep: dict[int, int] = {}
    for s in range(lts.num_states):
        rep.setdefault(block[s], s)

    moves: dict[int, list[tuple[str, int]]] = {}
    for blk, r in rep.items():
        moves[blk] = sorted(
            {(label, block[dst]) for label, dst in out[r]},
            key=lambda t: (t[0], rep[t[1]]),
        )

    order = {block[lts.initial]: 0}
    queue = [block[lts.initial]]
    while queue:
        blk = queue.pop(0)
        for _, tblk in moves[blk]:
            if tblk not in order:
                order[tblk] = len(order)
                queue.append(tblk)

    transitions: list[tuple[int, str, int]] = []
    for blk in sorted(order, key=order.get):  # type: ignore[arg-type]
        for label, tblk in moves[blk]:
            transitions.append((order[blk], label, order[tblk]))

    forms = None
    if lts.forms is not None:
        forms = [lts.forms[rep[blk]] for blk in sorted(order, key=order.get)]  # type: ignore[arg-type]
    return Lts(num_states=len(order), transitions=transitions, forms=forms)


# ----------------------------------------------------------------------
# .aut exchange format

_AUT_HEADER = re.compile(r"des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*\Z")
_AUT_LINE = re.compile(r"\(\s*(\d+)\s*,\s*\"([^\"]*)\"\s*,\s*(\d+)\s*\)\s*\Z")


def export_aut(lts: Lts) -> str:
    """Aldebaran format: header des (initial, transitions, states), then
    one (source, "label", target) line per transition.  Byte-stable for a
    given system."""
    lines = [f"des ({lts.initial}, {lts.num_transitions}, {lts.num_states})"]
    for src, label, dst in lts.transitions:
        lines.append(f'({src}, "{label}", {dst})')
    return "\n".join(lines) + "\n"


def read_aut(text: str) -> Lts:
    """Parse Aldebaran text; raises ValueError on malformed input."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty .aut input")
    head = _AUT_HEADER.match(lines[0])
    if not head:
        raise ValueError(f"bad .aut header: {lines[0]!r}")
    initial, num_trans, num_states = (int(g) for g in head.groups())
    transitions: list[tuple[int, str, int]] = []
    for ln in lines[1:]:
        m = _AUT_LINE.match(ln)
        if not m:
            raise ValueError(f"bad .aut transition: {ln!r}")
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if src >= num_states or dst >= num_states:
            raise ValueError(f"state out of range in: {ln!r}")
        transitions.append((src, label, dst))
    if len(transitions) != num_trans:
        raise ValueError(
            f"header promises {num_trans} transition(s), found {len(transitions)}"
        )
    if initial >= num_states and num_states > 0:
        raise ValueError("initial state out of range")
    return Lts(num_states=num_states, transitions=transitions, initial=initial)
