"""Recursive-descent parser for behaviour specifications.

Grammar (keywords case-insensitive, identifiers case-sensitive)::

    spec        ::= "specification" IDENT gates ":" func ":="
                    library? sorts? "behaviour" behaviour where? "endspec"
    library     ::= "library" IDENT ("," IDENT)* "endlib"
    sorts       ::= "sorts" sortdecl+
    sortdecl    ::= IDENT "=" "{" IDENT ("," IDENT)* "}"
    where       ::= "where" procdef+
    procdef     ::= "process" IDENT gates ":" func ":="
                    behaviour ("endproc" | "endprocess")
    gates       ::= "[" "]" | "[" IDENT ("," IDENT)* "]" | /* empty */
    func        ::= "noexit" | "exit"

    behaviour   ::= b_enable
    b_enable    ::= b_disrupt (">>" b_disrupt)*
    b_disrupt   ::= b_par ("[>" b_par)*
    b_par       ::= b_choice (par_op b_choice)*
    par_op      ::= "|||" | "||" | "|[" IDENT ("," IDENT)* "]|"
    b_choice    ::= b_prefix ("[]" b_prefix)*
    b_prefix    ::= action ";" b_prefix | b_atom
    b_atom      ::= "stop" | "exit" | "hide" IDENT ("," IDENT)* "in" behaviour
                  | IDENT gates | "(" behaviour ")"
    action      ::= "i" | IDENT offer*
    offer       ::= "!" IDENT | "?" IDENT ":" IDENT

All binary operators associate to the left.  Precedence, tightest first:
";", "[]", the parallel operators, "[>", ">>".  "hide ... in" extends as
far right as possible.

An action and a process instantiation both start with an identifier; the
next token decides: "!", "?" or ";" continue an action, anything else is
an instantiation.  Send offers "!v" are resolved against the declared sort
values at parse time; unknown names become variable references and are
checked later by the validator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import ast
from .diagnostics import (
    Diagnostic,
    LIBRARY_NOT_SUPPORTED,
    SYNTAX_ERROR,
    Span,
    error,
)
from .lexer import EOF, IDENT, LexFailure, Token, TokenStream

_FUNCTIONALITIES = ("noexit", "exit")


class _ParseFailure(Exception):
    """Internal bail-out; converted to a diagnostic at the entry points."""

    def __init__(self, span: Span, message: str):
        super().__init__(message)
        self.span = span
        self.message = message


@dataclass
class ParseResult:
    """Outcome of a parse: a tree when successful, plus any diagnostics."""

    spec: ast.Specification | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.spec is not None


class _Parser:
    def __init__(self, stream: TokenStream):
        self.ts = stream
        self.diagnostics: list[Diagnostic] = []
        # value name -> sort name, from the sorts section; guides offer parsing
        self.value_sorts: dict[str, str] = {}

    # ------------------------------------------------------------------
    # token plumbing

    def _fail(self, span: Span, message: str) -> _ParseFailure:
        return _ParseFailure(span, message)

    def _expect_punct(self, text: str) -> Token:
        tok = self.ts.peek()
        if not self.ts.at_punct(text):
            raise self._fail(tok.span, f"expected '{text}', found '{tok.text}'")
        return self.ts.next()

    def _expect_kw(self, word: str) -> Token:
        tok = self.ts.peek()
        if not self.ts.at_kw(word):
            raise self._fail(tok.span, f"expected '{word}', found '{tok.text}'")
        return self.ts.next()

    def _expect_ident(self, what: str) -> Token:
        tok = self.ts.peek()
        if tok.kind != IDENT:
            raise self._fail(tok.span, f"expected {what}, found '{tok.text}'")
        return self.ts.next()

    # ------------------------------------------------------------------
    # header pieces

    def _gate_list(self, empty_brackets_ok: bool = True) -> tuple[tuple[str, ...], bool]:
        """Parse an optional bracketed gate list; returns (gates, present).

        In behaviour position "[]" is the choice operator, so instantiation
        sites pass empty_brackets_ok=False and "P [] Q" stays a choice.
        """
        if empty_brackets_ok and self.ts.accept_punct("[]"):
            return (), True
        if not self.ts.accept_punct("["):
            return (), False
        if self.ts.accept_punct("]"):
            return (), True
        names = [self._expect_ident("a gate name").text]
        while self.ts.accept_punct(","):
            names.append(self._expect_ident("a gate name").text)
        self._expect_punct("]")
        return tuple(names), True

    def _functionality(self) -> str:
        tok = self.ts.peek()
        for f in _FUNCTIONALITIES:
            if self.ts.accept_kw(f):
                return f
        raise self._fail(tok.span, f"expected 'noexit' or 'exit', found '{tok.text}'")

    def _sorts_section(self) -> list[ast.SortDecl]:
        decls: list[ast.SortDecl] = []
        while self.ts.peek().kind == IDENT and not self.ts.at_kw("behaviour") and not self.ts.at_kw("behavior"):
            name_tok = self.ts.next()
            self._expect_punct("=")
            self._expect_punct("{")
            values = [self._expect_ident("a value name").text]
            while self.ts.accept_punct(","):
                values.append(self._expect_ident("a value name").text)
            self._expect_punct("}")
            decls.append(ast.SortDecl(name_tok.text, tuple(values), loc=name_tok.span))
            for v in values:
                self.value_sorts.setdefault(v, name_tok.text)
        if not decls:
            raise self._fail(self.ts.peek().span, "expected at least one sort declaration")
        return decls

    # ------------------------------------------------------------------
    # behaviour expressions, loosest binding first

    def behaviour(self) -> ast.Behavior:
        return self._enable()

    def _enable(self) -> ast.Behavior:
        left = self._disrupt()
        while self.ts.at_punct(">>"):
            op = self.ts.next()
            right = self._disrupt()
            left = ast.Seq(left, right, loc=op.span)
        return left

    def _disrupt(self) -> ast.Behavior:
        left = self._par()
        while self.ts.at_punct("[>"):
            op = self.ts.next()
            right = self._par()
            left = ast.Disrupt(left, right, loc=op.span)
        return left

    def _par(self) -> ast.Behavior:
        left = self._choice()
        while True:
            if self.ts.at_punct("|||"):
                op = self.ts.next()
                kind, gates = ast.ParKind.INTERLEAVE, frozenset()
            elif self.ts.at_punct("||"):
                op = self.ts.next()
                kind, gates = ast.ParKind.FULL, frozenset()
            elif self.ts.at_punct("|["):
                op = self.ts.next()
                names = [self._expect_ident("a gate name").text]
                while self.ts.accept_punct(","):
                    names.append(self._expect_ident("a gate name").text)
                self._expect_punct("]|")
                kind, gates = ast.ParKind.GATES, frozenset(names)
            else:
                return left
            right = self._choice()
            left = ast.Par(left, kind, gates, right, loc=op.span)

    def _choice(self) -> ast.Behavior:
        left = self._prefix()
        while self.ts.at_punct("[]"):
            op = self.ts.next()
            right = self._prefix()
            left = ast.Choice(left, right, loc=op.span)
        return left

    def _prefix(self) -> ast.Behavior:
        tok = self.ts.peek()
        if tok.kind == IDENT and not self._is_behaviour_keyword(tok):
            # identifier: action prefix or process instantiation
            name = self.ts.next()
            if name.text == "i" and self.ts.at_punct(";"):
                self.ts.next()
                return ast.Prefix(ast.InternalAction(loc=name.span), self._prefix(), loc=name.span)
            if self.ts.at_punct("!") or self.ts.at_punct("?"):
                action = self._finish_action(name)
                self._expect_punct(";")
                return ast.Prefix(action, self._prefix(), loc=name.span)
            if self.ts.at_punct(";"):
                self.ts.next()
                action = ast.Comm(name.text, (), loc=name.span)
                return ast.Prefix(action, self._prefix(), loc=name.span)
            gates, _ = self._gate_list(empty_brackets_ok=False)
            return ast.Inst(name.text, gates, loc=name.span)
        return self._atom()

    def _finish_action(self, gate: Token) -> ast.Comm:
        offers: list[ast.Offer] = []
        while True:
            if self.ts.accept_punct("!"):
                val = self._expect_ident("a value or variable name")
                if val.text in self.value_sorts:
                    expr: ast.ValueExpr = ast.ValueLit(val.text, self.value_sorts[val.text], loc=val.span)
                else:
                    expr = ast.VarRef(val.text, loc=val.span)
                offers.append(ast.Send(expr, loc=val.span))
            elif self.ts.accept_punct("?"):
                var = self._expect_ident("a variable name")
                self._expect_punct(":")
                sort = self._expect_ident("a sort name")
                offers.append(ast.Receive(var.text, sort.text, loc=var.span))
            else:
                return ast.Comm(gate.text, tuple(offers), loc=gate.span)

    _BEHAVIOUR_KEYWORDS = frozenset(
        ["stop", "exit", "hide", "where", "endproc", "endprocess", "endspec", "process", "in"]
    )

    def _is_behaviour_keyword(self, tok: Token) -> bool:
        return tok.text.lower() in self._BEHAVIOUR_KEYWORDS

    def _atom(self) -> ast.Behavior:
        tok = self.ts.peek()
        if self.ts.accept_kw("stop"):
            return ast.Stop(loc=tok.span)
        if self.ts.accept_kw("exit"):
            return ast.Exit(loc=tok.span)
        if self.ts.accept_kw("hide"):
            names = [self._expect_ident("a gate name").text]
            while self.ts.accept_punct(","):
                names.append(self._expect_ident("a gate name").text)
            self._expect_kw("in")
            body = self.behaviour()
            return ast.Hide(frozenset(names), body, loc=tok.span)
        if self.ts.accept_punct("("):
            inner = self.behaviour()
            self._expect_punct(")")
            return inner
        raise self._fail(tok.span, f"expected a behaviour expression, found '{tok.text}'")

    # ------------------------------------------------------------------
    # top level

    def specification(self) -> ast.Specification:
        head = self._expect_kw("specification")
        name = self._expect_ident("a specification name")
        gates, _ = self._gate_list()
        self._expect_punct(":")
        self._functionality()
        self._expect_punct(":=")

        if self.ts.at_kw("library"):
            lib = self.ts.next()
            self.diagnostics.append(
                error(
                    "library sections are not supported; declare finite sorts instead",
                    lib.span,
                    LIBRARY_NOT_SUPPORTED,
                )
            )
            while not self.ts.at_kw("endlib"):
                if self.ts.peek().kind == EOF:
                    raise self._fail(lib.span, "unterminated library section")
                self.ts.next()
            self.ts.next()

        sorts: list[ast.SortDecl] = []
        if self.ts.accept_kw("sorts"):
            sorts = self._sorts_section()

        if not (self.ts.accept_kw("behaviour") or self.ts.accept_kw("behavior")):
            tok = self.ts.peek()
            raise self._fail(tok.span, f"expected 'behaviour', found '{tok.text}'")
        top = self.behaviour()

        processes: list[ast.ProcessDef] = []
        if self.ts.accept_kw("where"):
            while self.ts.at_kw("process"):
                processes.append(self._process_def())
            if not processes:
                tok = self.ts.peek()
                raise self._fail(tok.span, f"expected a process definition, found '{tok.text}'")

        self._expect_kw("endspec")
        tail = self.ts.peek()
        if tail.kind != EOF:
            raise self._fail(tail.span, f"unexpected '{tail.text}' after endspec")

        return ast.Specification(
            name=name.text,
            top_gates=gates,
            sorts=tuple(sorts),
            processes=tuple(processes),
            top_behavior=top,
            loc=head.span,
        )

    def _process_def(self) -> ast.ProcessDef:
        head = self._expect_kw("process")
        name = self._expect_ident("a process name")
        gates, _ = self._gate_list()
        self._expect_punct(":")
        func = self._functionality()
        self._expect_punct(":=")
        body = self.behaviour()
        if not (self.ts.accept_kw("endproc") or self.ts.accept_kw("endprocess")):
            tok = self.ts.peek()
            raise self._fail(tok.span, f"expected 'endproc', found '{tok.text}'")
        return ast.ProcessDef(name.text, gates, func, body, loc=head.span)


# ----------------------------------------------------------------------
# entry points


def parse_spec(text: str, filename: str = "<input>") -> ParseResult:
    """Parse a full specification.  Never raises; errors become diagnostics."""
    try:
        parser = _Parser(TokenStream(text))
        spec = parser.specification()
        return ParseResult(spec, parser.diagnostics)
    except LexFailure as exc:
        return ParseResult(None, [error(exc.message, exc.span, "lex-error")])
    except _ParseFailure as exc:
        return ParseResult(None, [error(exc.message, exc.span, SYNTAX_ERROR)])


def parse_behavior(
    text: str,
    filename: str = "<input>",
    value_sorts: dict[str, str] | None = None,
) -> tuple[ast.Behavior | None, list[Diagnostic]]:
    """Parse a bare behaviour expression (used by tests and the ADL layer)."""
    try:
        parser = _Parser(TokenStream(text))
        if value_sorts:
            parser.value_sorts.update(value_sorts)
        b = parser.behaviour()
        tail = parser.ts.peek()
        if tail.kind != EOF:
            raise parser._fail(tail.span, f"unexpected '{tail.text}' after behaviour")
        return b, parser.diagnostics
    except LexFailure as exc:
        return None, [error(exc.message, exc.span, "lex-error")]
    except _ParseFailure as exc:
        return None, [error(exc.message, exc.span, SYNTAX_ERROR)]
