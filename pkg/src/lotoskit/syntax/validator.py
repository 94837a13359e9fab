"""Static checks that run after parsing.

The parser only enforces shape; everything name-related lives here:
declaration uniqueness, gate scoping, process instantiation arity,
variable binding, and the reserved action name "i".
"""
from __future__ import annotations

from . import ast
from .diagnostics import (
    DUPLICATE_DEFINITION,
    Diagnostic,
    GATE_ARITY_MISMATCH,
    INTERNAL_ACTION_OFFERS,
    RESERVED_NAME,
    SHADOWS_VALUE,
    UNBOUND_VARIABLE,
    UNKNOWN_GATE,
    UNKNOWN_PROCESS,
    UNKNOWN_SORT,
    error,
)


def validate_spec(spec: ast.Specification) -> list[Diagnostic]:
    return _Validator(spec).run()


class _Validator:
    def __init__(self, spec: ast.Specification):
        self.spec = spec
        self.out: list[Diagnostic] = []
        self.sorts = {s.name: s for s in spec.sorts}
        self.values = spec.value_sorts()
        self.processes = {p.name: p for p in spec.processes}

    def _err(self, message: str, loc, code: str) -> None:
        self.out.append(error(message, loc, code))

    # ------------------------------------------------------------------

    def run(self) -> list[Diagnostic]:
        self._check_declarations()
        self._check_behavior(self.spec.top_behavior, frozenset(self.spec.top_gates), {})
        for p in self.spec.processes:
            self._check_behavior(p.body, frozenset(p.formal_gates), {})
        return self.out

    def _check_declarations(self) -> None:
        spec = self.spec

        seen_sorts: set[str] = set()
        seen_values: set[str] = set()
        for s in spec.sorts:
            if s.name == "i":
                self._err("'i' is reserved for the internal action", s.loc, RESERVED_NAME)
            if s.name in seen_sorts:
                self._err(f"sort '{s.name}' is declared twice", s.loc, DUPLICATE_DEFINITION)
            seen_sorts.add(s.name)
            for v in s.values:
                if v == "i":
                    self._err("'i' is reserved for the internal action", s.loc, RESERVED_NAME)
                # values are globally unique so "!v" resolves without a sort annotation
                if v in seen_values:
                    self._err(f"value '{v}' is declared twice", s.loc, DUPLICATE_DEFINITION)
                seen_values.add(v)

        self._check_gate_decls(spec.top_gates, spec.loc)

        seen_procs: set[str] = set()
        for p in spec.processes:
            if p.name == "i":
                self._err("'i' is reserved for the internal action", p.loc, RESERVED_NAME)
            if p.name in seen_procs:
                self._err(f"process '{p.name}' is defined twice", p.loc, DUPLICATE_DEFINITION)
            seen_procs.add(p.name)
            self._check_gate_decls(p.formal_gates, p.loc)

    def _check_gate_decls(self, gates: tuple[str, ...], loc) -> None:
        seen: set[str] = set()
        for g in gates:
            if g == "i":
                self._err("'i' is reserved for the internal action", loc, RESERVED_NAME)
            if g in seen:
                self._err(f"gate '{g}' is listed twice", loc, DUPLICATE_DEFINITION)
            seen.add(g)

    # ------------------------------------------------------------------

    def _check_behavior(self, b: ast.Behavior, gates: frozenset[str], vars_: dict[str, str]) -> None:
        if isinstance(b, (ast.Stop, ast.Exit)):
            return

        if isinstance(b, ast.Prefix):
            rest_vars = self._check_action(b.action, gates, vars_)
            self._check_behavior(b.rest, gates, rest_vars)
            return

        if isinstance(b, (ast.Choice, ast.Seq, ast.Disrupt)):
            self._check_behavior(b.left, gates, vars_)
            self._check_behavior(b.right, gates, vars_)
            return

        if isinstance(b, ast.Par):
            for g in sorted(b.gates):
                if g == "i":
                    self._err("'i' is reserved for the internal action", b.loc, RESERVED_NAME)
                elif g not in gates:
                    self._err(f"gate '{g}' is not in scope", b.loc, UNKNOWN_GATE)
            self._check_behavior(b.left, gates, vars_)
            self._check_behavior(b.right, gates, vars_)
            return

        if isinstance(b, ast.Hide):
            for g in sorted(b.gates):
                if g == "i":
                    self._err("'i' is reserved for the internal action", b.loc, RESERVED_NAME)
            self._check_behavior(b.body, gates | b.gates, vars_)
            return

        if isinstance(b, ast.Inst):
            target = self.processes.get(b.process)
            if target is None:
                self._err(f"process '{b.process}' is not defined", b.loc, UNKNOWN_PROCESS)
            elif len(b.gates) != len(target.formal_gates):
                self._err(
                    f"process '{b.process}' takes {len(target.formal_gates)} gate(s), got {len(b.gates)}",
                    b.loc,
                    GATE_ARITY_MISMATCH,
                )
            for g in b.gates:
                if g == "i":
                    self._err("'i' is reserved for the internal action", b.loc, RESERVED_NAME)
                elif g not in gates:
                    self._err(f"gate '{g}' is not in scope", b.loc, UNKNOWN_GATE)
            return

        raise TypeError(f"unknown behaviour node {b!r}")

    def _check_action(
        self, a: ast.ActionExpr, gates: frozenset[str], vars_: dict[str, str]
    ) -> dict[str, str]:
        if isinstance(a, ast.InternalAction):
            return vars_

        if a.gate == "i":
            self._err("the internal action cannot carry offers", a.loc, INTERNAL_ACTION_OFFERS)
            return vars_
        if a.gate not in gates:
            self._err(f"gate '{a.gate}' is not in scope", a.loc, UNKNOWN_GATE)

        out = vars_
        for offer in a.offers:
            if isinstance(offer, ast.Send):
                e = offer.expr
                if isinstance(e, ast.VarRef) and e.name not in out:
                    self._err(f"variable '{e.name}' is not bound", e.loc, UNBOUND_VARIABLE)
            else:
                if offer.sort not in self.sorts:
                    self._err(f"sort '{offer.sort}' is not declared", offer.loc, UNKNOWN_SORT)
                if offer.var == "i":
                    self._err("'i' is reserved for the internal action", offer.loc, RESERVED_NAME)
                elif offer.var in self.values:
                    self._err(
                        f"variable '{offer.var}' shadows a declared value", offer.loc, SHADOWS_VALUE
                    )
                if out is vars_:
                    out = dict(vars_)
                out[offer.var] = offer.sort
        return out
