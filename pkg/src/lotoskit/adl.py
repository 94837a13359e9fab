"""Architecture configurations: named component and connector instances
bound to defined processes, composed by a behaviour expression.

Validation enforces the architectural style: at least two components, at
least one connector, unique instance names, resolvable bindings with the
right gate counts, and no pair of components synchronising with each
other directly (components talk through connectors).

Flattening turns a valid configuration into an ordinary specification
whose top behaviour is the composition with every instance name replaced
by its bound process, so the whole verification tool chain applies.
"""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import ast

COMPONENT = "component"
CONNECTOR = "connector"


@dataclass(frozen=True)
class ArchElement:
    """One instance in a configuration: its name, its role, the process it
    runs and the actual gates the process is wired to."""

    name: str
    role: str  # COMPONENT | CONNECTOR
    process: str
    gates: tuple[str, ...] = ()


@dataclass(frozen=True)
class ArchConfig:
    name: str
    uses: tuple[str, ...]  # behaviour files the bindings resolve against
    elements: tuple[ArchElement, ...]
    composition: ast.Behavior  # instantiates elements by name, no gates

    def element(self, name: str) -> ArchElement | None:
        for e in self.elements:
            if e.name == name:
                return e
        return None


@dataclass(frozen=True)
class ConfigDiagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


# ----------------------------------------------------------------------
# validation


def validate_config(
    config: ArchConfig, sources: list[ast.Specification]
) -> list[ConfigDiagnostic]:
    out: list[ConfigDiagnostic] = []

    processes: dict[str, ast.ProcessDef] = {}
    for spec in sources:
        for p in spec.processes:
            if p.name in processes:
                out.append(
                    ConfigDiagnostic(
                        "duplicate-name",
                        f"process '{p.name}' is defined by more than one source",
                    )
                )
            else:
                processes[p.name] = p

    seen: set[str] = set()
    for e in config.elements:
        if e.name in seen:
            out.append(
                ConfigDiagnostic("duplicate-name", f"instance '{e.name}' is declared twice")
            )
        seen.add(e.name)

    components = [e for e in config.elements if e.role == COMPONENT]
    if len(components) < 2:
        out.append(
            ConfigDiagnostic(
                "too-few-components",
                f"an architecture needs at least two components, found {len(components)}",
            )
        )
    if not any(e.role == CONNECTOR for e in config.elements):
        out.append(ConfigDiagnostic("no-connector", "an architecture needs at least one connector"))

    for e in config.elements:
        target = processes.get(e.process)
        if target is None:
            out.append(
                ConfigDiagnostic(
                    "unresolved-element",
                    f"instance '{e.name}' binds process '{e.process}', which no source defines",
                )
            )
        elif len(e.gates) != len(target.formal_gates):
            out.append(
                ConfigDiagnostic(
                    "gate-mismatch",
                    f"instance '{e.name}': process '{e.process}' takes "
                    f"{len(target.formal_gates)} gate(s), got {len(e.gates)}",
                )
            )

    element_names = {e.name for e in config.elements}
    for node in _walk(config.composition):
        if isinstance(node, ast.Inst):
            if node.process not in element_names:
                out.append(
                    ConfigDiagnostic(
                        "unresolved-element",
                        f"composition instantiates '{node.process}', which is not a declared instance",
                    )
                )
            elif node.gates:
                out.append(
                    ConfigDiagnostic(
                        "gate-mismatch",
                        f"instance '{node.process}' already carries its gates; "
                        "the composition must use the bare name",
                    )
                )

    out.extend(_coupling_violations(config))
    return out


def _walk(b: ast.Behavior):
    yield b
    for c in ast.children(b):
        yield from _walk(c)


def _coupling_violations(config: ArchConfig) -> list[ConfigDiagnostic]:
    """Components on opposite sides of a synchronising parallel operator
    must not share a synchronised gate; only connectors mediate."""
    out: list[ConfigDiagnostic] = []

    def instances(b: ast.Behavior) -> list[ArchElement]:
        found = []
        for node in _walk(b):
            if isinstance(node, ast.Inst):
                e = config.element(node.process)
                if e is not None:
                    found.append(e)
        return found

    for node in _walk(config.composition):
        if not isinstance(node, ast.Par) or node.kind is ast.ParKind.INTERLEAVE:
            continue
        left = [e for e in instances(node.left) if e.role == COMPONENT]
        right = [e for e in instances(node.right) if e.role == COMPONENT]
        for l in left:
            for r in right:
                shared = set(l.gates) & set(r.gates)
                if node.kind is ast.ParKind.GATES:
                    shared &= node.gates
                if shared:
                    out.append(
                        ConfigDiagnostic(
                            "direct-component-coupling",
                            f"components '{l.name}' and '{r.name}' synchronise directly "
                            f"on gate '{sorted(shared)[0]}'",
                        )
                    )
    return out


# ----------------------------------------------------------------------
# flattening


def flatten(config: ArchConfig, sources: list[ast.Specification]) -> ast.Specification:
    """Build the specification a valid configuration denotes.  The result
    parses, validates and explores with the ordinary machinery; its top
    gates are the unhidden gates of the composition in first-use order."""
    elements = {e.name: e for e in config.elements}

    def rewrite(b: ast.Behavior) -> ast.Behavior:
        if isinstance(b, ast.Inst):
            e = elements.get(b.process)
            if e is None:
                raise ValueError(f"'{b.process}' is not a declared instance")
            return ast.Inst(e.process, e.gates)
        if isinstance(b, ast.Prefix):
            return ast.Prefix(b.action, rewrite(b.rest))
        if isinstance(b, (ast.Choice, ast.Seq, ast.Disrupt)):
            return type(b)(rewrite(b.left), rewrite(b.right))
        if isinstance(b, ast.Par):
            return ast.Par(rewrite(b.left), b.kind, b.gates, rewrite(b.right))
        if isinstance(b, ast.Hide):
            return ast.Hide(b.gates, rewrite(b.body))
        return b

    top = rewrite(config.composition)

    top_gates: list[str] = []

    def free_gates(b: ast.Behavior, hidden: frozenset[str]) -> None:
        if isinstance(b, ast.Hide):
            free_gates(b.body, hidden | b.gates)
            return
        if isinstance(b, ast.Inst):
            for g in b.gates:
                if g not in hidden and g not in top_gates:
                    top_gates.append(g)
        if isinstance(b, ast.Prefix) and isinstance(b.action, ast.Comm):
            g = b.action.gate
            if g not in hidden and g not in top_gates:
                top_gates.append(g)
        for c in ast.children(b):
            free_gates(c, hidden)

    free_gates(top, frozenset())

    sorts: list[ast.SortDecl] = []
    sort_names: set[str] = set()
    processes: list[ast.ProcessDef] = []
    process_names: set[str] = set()
    for spec in sources:
        for s in spec.sorts:
            if s.name not in sort_names:
                sort_names.add(s.name)
                sorts.append(s)
        for p in spec.processes:
            if p.name not in process_names:
                process_names.add(p.name)
                processes.append(p)

    return ast.Specification(
        name=config.name,
        top_gates=tuple(top_gates),
        sorts=tuple(sorts),
        processes=tuple(processes),
        top_behavior=top,
    )
