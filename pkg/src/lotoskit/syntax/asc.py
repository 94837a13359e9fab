"""Parser for component contract files.

Layout::

    component NAME where
      assert { free text, kept verbatim }
      sc { exists x, y . pred(x, y) and pred(y, Const) }
      ic {
        processes   { A, B }
        in_ports    { p: A, q: B }
        out_ports   { r: A }
        in_msgs     { m -> p, n -> q }
        out_msgs    { m -> r }
        external_in { n }
        flows       { m: r -> p }
      }
      bc NAME from "file.lot"      (or: bc none)
    end

Sections may appear in any order, each at most once.  Query predicates
come from the fixed vocabulary; names declared after "exists" are the
variables, everything else is a constant.
"""
from __future__ import annotations

from ..contracts import (
    Atom,
    AscContract,
    BcRef,
    Const,
    InterfaceContract,
    PREDICATES,
    Query,
    Term,
    Var,
)
from .diagnostics import (
    BAD_ARITY,
    DUPLICATE_DEFINITION,
    Diagnostic,
    MALFORMED_IC,
    SYNTAX_ERROR,
    Span,
    UNKNOWN_PREDICATE,
    UNKNOWN_QUERY_VARIABLE,
    error,
    has_errors,
)
from .lexer import EOF, IDENT, LexFailure, STRING, Token, TokenStream


class _Bail(Exception):
    def __init__(self, span: Span, message: str):
        super().__init__(message)
        self.span = span
        self.message = message


_IC_SECTIONS = (
    "processes",
    "in_ports",
    "out_ports",
    "in_msgs",
    "out_msgs",
    "external_in",
    "flows",
)


class _AscParser:
    def __init__(self, stream: TokenStream):
        self.ts = stream
        self.diags: list[Diagnostic] = []

    def _expect_punct(self, text: str) -> Token:
        tok = self.ts.peek()
        if not self.ts.at_punct(text):
            raise _Bail(tok.span, f"expected '{text}', found '{tok.text}'")
        return self.ts.next()

    def _expect_kw(self, word: str) -> Token:
        tok = self.ts.peek()
        if not self.ts.at_kw(word):
            raise _Bail(tok.span, f"expected '{word}', found '{tok.text}'")
        return self.ts.next()

    def _expect_ident(self, what: str) -> Token:
        tok = self.ts.peek()
        if tok.kind != IDENT:
            raise _Bail(tok.span, f"expected {what}, found '{tok.text}'")
        return self.ts.next()

    # ------------------------------------------------------------------

    def contract(self) -> AscContract:
        self._expect_kw("component")
        name = self._expect_ident("a contract name")
        self._expect_kw("where")

        assertion: str | None = None
        sc: Query | None = None
        ic: InterfaceContract | None = None
        bc: BcRef | None = None
        seen: set[str] = set()

        while not self.ts.at_kw("end"):
            tok = self.ts.peek()
            if tok.kind == EOF:
                raise _Bail(tok.span, "missing 'end'")
            part = tok.text.lower()
            if part in seen:
                raise _Bail(tok.span, f"section '{part}' appears twice")

            if self.ts.accept_kw("assert"):
                assertion, _span = self.ts.raw_brace_block()
            elif self.ts.accept_kw("sc"):
                self._expect_punct("{")
                sc = self._query()
                self._expect_punct("}")
            elif self.ts.accept_kw("ic"):
                ic = self._interface()
            elif self.ts.accept_kw("bc"):
                bc = self._bc()
            else:
                raise _Bail(tok.span, f"expected a contract section, found '{tok.text}'")
            seen.add(part)

        self._expect_kw("end")
        tail = self.ts.peek()
        if tail.kind != EOF:
            raise _Bail(tail.span, f"unexpected '{tail.text}' after end")
        return AscContract(name=name.text, assertion=assertion, sc=sc, ic=ic, bc=bc)

    # ------------------------------------------------------------------

    def _query(self) -> Query:
        variables: list[str] = []
        if self.ts.at_kw("exists"):
            self.ts.next()
            variables.append(self._expect_ident("a variable name").text)
            while self.ts.accept_punct(","):
                variables.append(self._expect_ident("a variable name").text)
            self._expect_punct(".")
        declared = set()
        for v in variables:
            if v in declared:
                self.diags.append(
                    error(f"variable '{v}' is declared twice", self.ts.peek().span, DUPLICATE_DEFINITION)
                )
            declared.add(v)

        atoms = [self._atom(declared)]
        while self.ts.accept_kw("and"):
            atoms.append(self._atom(declared))

        used = {t.name for a in atoms for t in a.args if isinstance(t, Var)}
        for v in variables:
            if v not in used:
                self.diags.append(
                    error(
                        f"variable '{v}' does not occur in the query",
                        self.ts.peek().span,
                        UNKNOWN_QUERY_VARIABLE,
                    )
                )
        return Query(tuple(variables), tuple(atoms))

    def _atom(self, variables: set[str]) -> Atom:
        pred = self._expect_ident("a predicate name")
        self._expect_punct("(")
        terms: list[Term] = []
        if not self.ts.at_punct(")"):
            terms.append(self._term(variables))
            while self.ts.accept_punct(","):
                terms.append(self._term(variables))
        self._expect_punct(")")

        arity = PREDICATES.get(pred.text)
        if arity is None:
            self.diags.append(error(f"unknown predicate '{pred.text}'", pred.span, UNKNOWN_PREDICATE))
        elif arity != len(terms):
            self.diags.append(
                error(f"'{pred.text}' takes {arity} argument(s), got {len(terms)}", pred.span, BAD_ARITY)
            )
        return Atom(pred.text, tuple(terms))

    def _term(self, variables: set[str]) -> Term:
        tok = self._expect_ident("a term")
        return Var(tok.text) if tok.text in variables else Const(tok.text)

    # ------------------------------------------------------------------

    def _interface(self) -> InterfaceContract:
        self._expect_punct("{")
        parts: dict[str, tuple] = {}
        while not self.ts.at_punct("}"):
            tok = self.ts.peek()
            if tok.kind != IDENT or tok.text.lower() not in _IC_SECTIONS:
                raise _Bail(
                    tok.span,
                    f"expected one of {', '.join(_IC_SECTIONS)}, found '{tok.text}'",
                )
            section = tok.text.lower()
            self.ts.next()
            if section in parts:
                self.diags.append(error(f"'{section}' appears twice", tok.span, MALFORMED_IC))
            self._expect_punct("{")
            if section in ("processes", "external_in"):
                parts[section] = self._name_list()
            elif section in ("in_ports", "out_ports"):
                parts[section] = self._pair_list(":")
            elif section in ("in_msgs", "out_msgs"):
                parts[section] = self._pair_list("->")
            else:
                parts[section] = self._flow_list()
            self._expect_punct("}")
        self._expect_punct("}")
        return InterfaceContract(
            participants=parts.get("processes", ()),
            in_ports=parts.get("in_ports", ()),
            out_ports=parts.get("out_ports", ()),
            in_msgs=parts.get("in_msgs", ()),
            out_msgs=parts.get("out_msgs", ()),
            external_in=parts.get("external_in", ()),
            flows=parts.get("flows", ()),
        )

    def _name_list(self) -> tuple[str, ...]:
        names: list[str] = []
        if self.ts.peek().kind == IDENT:
            names.append(self.ts.next().text)
            while self.ts.accept_punct(","):
                names.append(self._expect_ident("a name").text)
        return tuple(names)

    def _pair_list(self, sep: str) -> tuple[tuple[str, str], ...]:
        pairs: list[tuple[str, str]] = []
        if self.ts.peek().kind == IDENT:
            pairs.append(self._pair(sep))
            while self.ts.accept_punct(","):
                pairs.append(self._pair(sep))
        return tuple(pairs)

    def _pair(self, sep: str) -> tuple[str, str]:
        a = self._expect_ident("a name")
        self._expect_punct(sep)
        b = self._expect_ident("a name")
        return (a.text, b.text)

    def _flow_list(self) -> tuple[tuple[str, str, str], ...]:
        flows: list[tuple[str, str, str]] = []
        while self.ts.peek().kind == IDENT:
            msg = self.ts.next()
            self._expect_punct(":")
            src = self._expect_ident("an output port")
            self._expect_punct("->")
            dst = self._expect_ident("an input port")
            flows.append((msg.text, src.text, dst.text))
            if not self.ts.accept_punct(","):
                break
        return tuple(flows)

    # ------------------------------------------------------------------

    def _bc(self) -> BcRef | None:
        if self.ts.accept_kw("none"):
            return None
        name = self._expect_ident("a behaviour name")
        self._expect_kw("from")
        tok = self.ts.peek()
        if tok.kind != STRING:
            raise _Bail(tok.span, f"expected a quoted file name, found '{tok.text}'")
        self.ts.next()
        return BcRef(name.text, tok.text)


def parse_asc(text: str, filename: str = "<contract>") -> tuple[AscContract | None, list[Diagnostic]]:
    """Parse a contract file.  Returns (contract, diagnostics); the
    contract is None whenever the diagnostics contain an error."""
    try:
        parser = _AscParser(TokenStream(text))
        contract = parser.contract()
        if has_errors(parser.diags):
            return None, parser.diags
        return contract, parser.diags
    except LexFailure as exc:
        return None, [error(exc.message, exc.span, "lex-error")]
    except _Bail as exc:
        return None, [error(exc.message, exc.span, SYNTAX_ERROR)]
