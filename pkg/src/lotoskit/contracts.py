"""Design-component contracts.

A contract has up to three checkable parts plus a free-text assertion:

* structural (sc): an existential conjunctive query over a fact base
  describing the static design;
* interface (ic): participants, input/output ports, the messages moving
  through them, externally fed messages, and port-to-port flows, checked
  against rules C1-C4 and basic referential sanity;
* behavioural (bc): a named behaviour specification that must be free of
  deadlock.

Facts use a fixed predicate vocabulary so misspellings fail loudly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .semantics import ExplorationBudget, generate_lts
from .syntax.diagnostics import (
    BAD_ARITY,
    Diagnostic,
    Span,
    UNKNOWN_PREDICATE,
    error,
    has_errors,
)
from .verify import VerifyResult, check_deadlock

# predicate name -> arity; the only predicates facts and queries may use
PREDICATES: dict[str, int] = {
    "abstract_class": 1,
    "abstract_aspect": 1,
    "class": 1,
    "aspect": 1,
    "inherit": 2,
    "associate": 2,
    "aggregate": 2,
    "invoke": 4,
    "new": 3,
    "return": 3,
    "declare_parent": 3,
    "call": 3,
    "advice": 3,
}


# ----------------------------------------------------------------------
# facts


@dataclass(frozen=True)
class Fact:
    predicate: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(self.args)})"


class FactBase:
    """A set of ground facts over the fixed vocabulary."""

    def __init__(self) -> None:
        self._facts: set[Fact] = set()

    def __len__(self) -> int:
        return len(self._facts)

    def __contains__(self, fact: Fact) -> bool:
        return fact in self._facts

    def add(self, fact: Fact) -> None:
        arity = PREDICATES.get(fact.predicate)
        if arity is None:
            raise ValueError(f"unknown predicate '{fact.predicate}'")
        if arity != len(fact.args):
            raise ValueError(
                f"'{fact.predicate}' takes {arity} argument(s), got {len(fact.args)}"
            )
        self._facts.add(fact)

    def assert_fact(self, predicate: str, *args: str) -> Fact:
        fact = Fact(predicate, tuple(args))
        self.add(fact)
        return fact

    def by_predicate(self, predicate: str) -> list[Fact]:
        """Matching facts in lexicographic argument order."""
        return sorted(
            (f for f in self._facts if f.predicate == predicate),
            key=lambda f: f.args,
        )

    def sorted_facts(self) -> list[Fact]:
        return sorted(self._facts, key=lambda f: (f.predicate, f.args))


_FACT_LINE_COMMENT = "%"


def parse_facts(text: str, filename: str = "<facts>") -> tuple[FactBase, list[Diagnostic]]:
    """One fact per line, "predicate(arg, arg)." with an optional trailing
    dot; '%' starts a comment.  All problems are reported, not just the
    first."""
    fb = FactBase()
    diags: list[Diagnostic] = []
    line_re = re.compile(
        r"([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*([^()]*?)\s*\)\s*\.?\s*\Z"
    )
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(_FACT_LINE_COMMENT, 1)[0].strip()
        if not line:
            continue
        m = line_re.match(line)
        if not m:
            diags.append(error(f"cannot read fact: {line!r}", Span.point(line_no, 1), "syntax-error"))
            continue
        pred = m.group(1)
        args = tuple(a.strip() for a in m.group(2).split(",")) if m.group(2) else ()
        arity = PREDICATES.get(pred)
        if arity is None:
            diags.append(error(f"unknown predicate '{pred}'", Span.point(line_no, 1), UNKNOWN_PREDICATE))
            continue
        if arity != len(args) or any(not a for a in args):
            diags.append(
                error(
                    f"'{pred}' takes {arity} argument(s)",
                    Span.point(line_no, 1),
                    BAD_ARITY,
                )
            )
            continue
        fb.add(Fact(pred, args))
    return fb, diags


# ----------------------------------------------------------------------
# conjunctive queries


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


Term = Var | Const


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(t.name for t in self.args)})"


@dataclass(frozen=True)
class Query:
    """exists x, y . p(x, C) and q(y, x) ...  All variables are the
    declared ones; every other identifier is a constant."""

    variables: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __str__(self) -> str:
        body = " and ".join(str(a) for a in self.atoms)
        if self.variables:
            return f"exists {', '.join(self.variables)} . {body}"
        return body


def eval_query(fb: FactBase, query: Query) -> dict[str, str] | None:
    """First witness, or None.  The search is depth-first through the
    conjuncts in written order, trying each conjunct's facts in
    lexicographic order, so the answer is reproducible."""
    candidates = {a.predicate: fb.by_predicate(a.predicate) for a in query.atoms}

    def unify(atom: Atom, fact: Fact, env: dict[str, str]) -> dict[str, str] | None:
        out = env
        for term, value in zip(atom.args, fact.args):
            if isinstance(term, Const):
                if term.name != value:
                    return None
            else:
                bound = out.get(term.name)
                if bound is None:
                    if out is env:
                        out = dict(env)
                    out[term.name] = value
                elif bound != value:
                    return None
        return out

    def search(index: int, env: dict[str, str]) -> dict[str, str] | None:
        if index == len(query.atoms):
            return env
        atom = query.atoms[index]
        for fact in candidates[atom.predicate]:
            nxt = unify(atom, fact, env)
            if nxt is not None:
                found = search(index + 1, nxt)
                if found is not None:
                    return found
        return None

    witness = search(0, {})
    if witness is None:
        return None
    return {v: witness[v] for v in query.variables}


# ----------------------------------------------------------------------
# interface contracts


@dataclass(frozen=True)
class InterfaceContract:
    """Ports keep their declaration order and possible duplicates; the
    checks below are what rules on them."""

    participants: tuple[str, ...] = ()
    in_ports: tuple[tuple[str, str], ...] = ()  # (port, owner)
    out_ports: tuple[tuple[str, str], ...] = ()
    in_msgs: tuple[tuple[str, str], ...] = ()  # (message, port)
    out_msgs: tuple[tuple[str, str], ...] = ()
    external_in: tuple[str, ...] = ()
    flows: tuple[tuple[str, str, str], ...] = ()  # (message, out port, in port)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


def check_interface(ic: InterfaceContract) -> list[Violation]:
    """C1: input ports unique.  C2: output ports unique.  C3: every input
    message is an output message or externally fed.  C4: every output
    message is consumed by an input message.  Plus referential checks on
    owners, message ports, and flows."""
    out: list[Violation] = []
    participants = set(ic.participants)

    seen: set[str] = set()
    for port, owner in ic.in_ports:
        if port in seen:
            out.append(Violation("C1", f"input port '{port}' is declared more than once"))
        seen.add(port)
        if owner not in participants:
            out.append(Violation("unknown-owner", f"input port '{port}' belongs to unknown participant '{owner}'"))

    seen = set()
    for port, owner in ic.out_ports:
        if port in seen:
            out.append(Violation("C2", f"output port '{port}' is declared more than once"))
        seen.add(port)
        if owner not in participants:
            out.append(Violation("unknown-owner", f"output port '{port}' belongs to unknown participant '{owner}'"))

    in_port_names = {p for p, _ in ic.in_ports}
    out_port_names = {p for p, _ in ic.out_ports}
    for msg, port in ic.in_msgs:
        if port not in in_port_names:
            out.append(Violation("unknown-port", f"input message '{msg}' names missing input port '{port}'"))
    for msg, port in ic.out_msgs:
        if port not in out_port_names:
            out.append(Violation("unknown-port", f"output message '{msg}' names missing output port '{port}'"))

    produced = {m for m, _ in ic.out_msgs} | set(ic.external_in)
    consumed = {m for m, _ in ic.in_msgs}
    for msg in _unique_in_order(m for m, _ in ic.in_msgs):
        if msg not in produced:
            out.append(
                Violation("C3", f"input message '{msg}' is never produced: not an output message and not external")
            )
    for msg in _unique_in_order(m for m, _ in ic.out_msgs):
        if msg not in consumed:
            out.append(Violation("C4", f"output message '{msg}' is never consumed"))

    out_pairs = set(ic.out_msgs)
    in_pairs = set(ic.in_msgs)
    for msg, src, dst in ic.flows:
        if (msg, src) not in out_pairs:
            out.append(Violation("bad-flow", f"flow of '{msg}' from '{src}' has no matching output message"))
        if (msg, dst) not in in_pairs:
            out.append(Violation("bad-flow", f"flow of '{msg}' into '{dst}' has no matching input message"))
    return out


def _unique_in_order(items) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


# ----------------------------------------------------------------------
# whole contracts


@dataclass(frozen=True)
class BcRef:
    """Behavioural part: a named behaviour held in a separate file."""

    name: str
    path: str


@dataclass(frozen=True)
class AscContract:
    name: str
    assertion: str | None = None
    sc: Query | None = None
    ic: InterfaceContract | None = None
    bc: BcRef | None = None


class ContractCheckError(Exception):
    """The contract could not be evaluated (missing inputs, bad files)."""


@dataclass
class ContractReport:
    name: str
    sc_checked: bool = False
    sc_witness: dict[str, str] | None = None
    ic_violations: list[Violation] | None = None
    bc_result: VerifyResult | None = None

    @property
    def ok(self) -> bool:
        if self.sc_checked and self.sc_witness is None:
            return False
        if self.ic_violations:
            return False
        if self.bc_result is not None and not self.bc_result.ok:
            return False
        return True

    def lines(self) -> list[str]:
        """Human-readable summary, one finding per line."""
        out = [f"contract {self.name}: {'ok' if self.ok else 'FAILED'}"]
        if self.sc_checked:
            if self.sc_witness is None:
                out.append("  sc: no witness satisfies the structural query")
            elif self.sc_witness:
                binding = ", ".join(f"{k}={v}" for k, v in sorted(self.sc_witness.items()))
                out.append(f"  sc: witness {binding}")
            else:
                out.append("  sc: holds")
        if self.ic_violations is not None:
            if self.ic_violations:
                for v in self.ic_violations:
                    out.append(f"  ic: {v}")
            else:
                out.append("  ic: all rules hold")
        if self.bc_result is not None:
            status = "deadlock free" if self.bc_result.ok else self.bc_result.detail
            out.append(f"  bc: {status}")
            if not self.bc_result.ok and self.bc_result.trace is not None:
                out.append(f"  bc: trace {self.bc_result.trace}")
        return out


def check_asc(
    contract: AscContract,
    facts: FactBase | None = None,
    *,
    base_dir: str | Path = ".",
    budget: ExplorationBudget | None = None,
) -> ContractReport:
    """Evaluate every part the contract carries.  Raises
    ContractCheckError when a part cannot be evaluated at all; a cleanly
    failing part just makes the report not ok."""
    report = ContractReport(name=contract.name)

    if contract.sc is not None:
        if facts is None:
            raise ContractCheckError(
                f"contract '{contract.name}' has a structural query but no facts were given"
            )
        report.sc_checked = True
        report.sc_witness = eval_query(facts, contract.sc)

    if contract.ic is not None:
        report.ic_violations = check_interface(contract.ic)

    if contract.bc is not None:
        report.bc_result = _check_bc(contract.bc, Path(base_dir), budget)

    return report


def _check_bc(bc: BcRef, base_dir: Path, budget: ExplorationBudget | None) -> VerifyResult:
    from .syntax.parser import parse_spec
    from .syntax.validator import validate_spec

    path = base_dir / bc.path
    try:
        text = path.read_text()
    except OSError as exc:
        raise ContractCheckError(f"cannot read behaviour '{bc.name}': {exc}") from exc

    result = parse_spec(text, str(path))
    if result.spec is None or has_errors(result.diagnostics):
        first = next(d for d in result.diagnostics if d.severity == "error")
        raise ContractCheckError(f"behaviour '{bc.name}' does not parse: {first}")
    problems = validate_spec(result.spec)
    if has_errors(problems):
        first = next(d for d in problems if d.severity == "error")
        raise ContractCheckError(f"behaviour '{bc.name}' is not valid: {first}")

    return check_deadlock(generate_lts(result.spec, budget))
