"""Command line front end.

Subcommands: check (parse and validate), lts (generate and export the
state space), verify (deadlock, reach, safety, bisim), contract, adl.

Exit codes: 0 everything holds, 1 the checked property or contract fails,
2 the inputs cannot be processed (unreadable or invalid files, exhausted
exploration budget), 3 command line usage errors.  Human-readable
findings go to stdout, diagnostics to stderr; --format json prints one
machine-readable object to stdout instead.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import adl as adlmod
from . import contracts as contractsmod
from . import semantics, verify
from .syntax import ast, has_errors, parse_spec, pretty_spec, validate_spec
from .syntax.adlparse import parse_adl
from .syntax.asc import parse_asc
from .syntax.diagnostics import Diagnostic


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit 3, not 2
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


# ----------------------------------------------------------------------
# shared plumbing


def _print_diags(diags: list[Diagnostic], path: str) -> None:
    for d in diags:
        print(f"{path}:{d}", file=sys.stderr)


def _diag_json(d: Diagnostic) -> dict:
    return {
        "severity": d.severity,
        "line": d.span.line,
        "col": d.span.col,
        "code": d.code,
        "message": d.message,
    }


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(2, f"cannot read '{path}': {exc}") from exc


def _load_spec(path: str, *, strict: bool = True) -> tuple[ast.Specification | None, list[Diagnostic]]:
    """Parse and validate a behaviour file.  With strict=True any error
    aborts with exit code 2 (the caller needs a working specification)."""
    text = _read_file(path)
    result = parse_spec(text, path)
    diags = list(result.diagnostics)
    spec = result.spec
    if spec is not None:
        diags.extend(validate_spec(spec))
    if has_errors(diags):
        spec = None
    if strict and spec is None:
        _print_diags(diags, path)
        raise CliError(2, f"'{path}' is not a valid specification")
    return spec, diags


def _budget(args: argparse.Namespace) -> semantics.ExplorationBudget:
    return semantics.ExplorationBudget(
        max_states=args.max_states, max_transitions=args.max_transitions
    )


def _generate(spec: ast.Specification, args: argparse.Namespace) -> semantics.Lts:
    if getattr(args, "no_hide", False):
        spec = semantics.strip_hiding(spec)
    try:
        return semantics.generate_lts(spec, _budget(args))
    except (semantics.BudgetExceededError, semantics.UnguardedRecursionError) as exc:
        raise CliError(2, str(exc)) from exc


def _load_lts(path: str, args: argparse.Namespace) -> semantics.Lts:
    """A transition system from either a behaviour file or an .aut file."""
    if path.endswith(".aut"):
        try:
            return verify.read_aut(_read_file(path))
        except ValueError as exc:
            raise CliError(2, f"'{path}': {exc}") from exc
    spec, _ = _load_spec(path)
    assert spec is not None
    return _generate(spec, args)


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-states", type=int, default=100_000, metavar="N",
                   help="abort exploration beyond N states (default 100000)")
    p.add_argument("--max-transitions", type=int, default=500_000, metavar="N",
                   help="abort exploration beyond N transitions (default 500000)")


def _add_no_hide(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-hide", action="store_true",
                   help="treat hidden gates as observable")


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="output format (default text)")


def _emit(args: argparse.Namespace, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


# ----------------------------------------------------------------------
# subcommands


def _cmd_check(args: argparse.Namespace) -> int:
    spec, diags = _load_spec(args.file, strict=False)
    ok = not has_errors(diags)
    if args.format == "json":
        payload = {
            "command": "check",
            "ok": ok,
            "name": spec.name if spec else None,
            "diagnostics": [_diag_json(d) for d in diags],
        }
        print(json.dumps(payload, indent=2))
    else:
        _print_diags(diags, args.file)
        if ok:
            assert spec is not None
            print(f"{spec.name}: ok ({len(spec.processes)} process(es), "
                  f"{len(spec.sorts)} sort(s))")
        else:
            errors = sum(1 for d in diags if d.severity == "error")
            print(f"{args.file}: {errors} error(s)")
    return 0 if ok else 1


def _cmd_lts(args: argparse.Namespace) -> int:
    spec, _ = _load_spec(args.file)
    assert spec is not None
    lts = _generate(spec, args)
    if args.minimize:
        lts = verify.minimize(lts)
    aut = verify.export_aut(lts)
    if args.output:
        Path(args.output).write_text(aut)
    payload = {
        "command": "lts",
        "ok": True,
        "states": lts.num_states,
        "transitions": lts.num_transitions,
        "output": args.output,
    }
    if args.output:
        lines = [f"{lts.num_states} state(s), {lts.num_transitions} transition(s) "
                 f"-> {args.output}"]
    else:
        payload["aut"] = aut
        lines = [aut.rstrip("\n")]
    _emit(args, payload, lines)
    return 0


def _verify_result(args: argparse.Namespace, name: str, result: verify.VerifyResult) -> int:
    payload = {
        "command": "verify",
        "property": name,
        "ok": result.ok,
        "detail": result.detail,
        "trace": result.trace,
    }
    lines = [f"{name}: {'ok' if result.ok else 'violated'} ({result.detail})"]
    if result.trace is not None:
        shown = " ; ".join(result.trace) if result.trace else "<empty>"
        lines.append(f"trace: {shown}")
    _emit(args, payload, lines)
    return 0 if result.ok else 1


def _cmd_verify_deadlock(args: argparse.Namespace) -> int:
    return _verify_result(args, "deadlock", verify.check_deadlock(_load_lts(args.file, args)))


def _cmd_verify_reach(args: argparse.Namespace) -> int:
    try:
        pattern = verify.parse_label_pattern(args.pattern)
    except ValueError as exc:
        raise CliError(3, f"bad pattern: {exc}") from exc
    return _verify_result(args, "reach", verify.check_reachable(_load_lts(args.file, args), pattern))


def _cmd_verify_safety(args: argparse.Namespace) -> int:
    monitor, diags = verify.parse_monitor(_read_file(args.monitor), args.monitor)
    if monitor is None:
        _print_diags(diags, args.monitor)
        raise CliError(2, f"'{args.monitor}' is not a valid monitor")
    return _verify_result(args, "safety", verify.check_safety(_load_lts(args.file, args), monitor))


def _cmd_verify_bisim(args: argparse.Namespace) -> int:
    a = _load_lts(args.file, args)
    b = _load_lts(args.other, args)
    return _verify_result(args, "bisim", verify.bisim_equiv(a, b))


def _cmd_contract(args: argparse.Namespace) -> int:
    contract, diags = parse_asc(_read_file(args.file), args.file)
    if contract is None:
        _print_diags(diags, args.file)
        raise CliError(2, f"'{args.file}' is not a valid contract")

    facts = None
    if args.facts:
        facts, fact_diags = contractsmod.parse_facts(_read_file(args.facts), args.facts)
        if has_errors(fact_diags):
            _print_diags(fact_diags, args.facts)
            raise CliError(2, f"'{args.facts}' is not a valid fact base")

    try:
        report = contractsmod.check_asc(
            contract,
            facts,
            base_dir=Path(args.file).parent,
            budget=_budget(args),
        )
    except contractsmod.ContractCheckError as exc:
        raise CliError(2, str(exc)) from exc
    except (semantics.BudgetExceededError, semantics.UnguardedRecursionError) as exc:
        raise CliError(2, str(exc)) from exc

    payload = {
        "command": "contract",
        "ok": report.ok,
        "name": report.name,
        "sc": {"checked": report.sc_checked, "witness": report.sc_witness},
        "ic": None
        if report.ic_violations is None
        else [{"code": v.code, "message": v.message} for v in report.ic_violations],
        "bc": None
        if report.bc_result is None
        else {
            "ok": report.bc_result.ok,
            "detail": report.bc_result.detail,
            "trace": report.bc_result.trace,
        },
    }
    _emit(args, payload, report.lines())
    return 0 if report.ok else 1


def _cmd_adl(args: argparse.Namespace) -> int:
    config, diags = parse_adl(_read_file(args.file), args.file)
    if config is None:
        _print_diags(diags, args.file)
        raise CliError(2, f"'{args.file}' is not a valid configuration")

    base = Path(args.file).parent
    sources = []
    for use in config.uses:
        spec, _ = _load_spec(str(base / use))
        assert spec is not None
        sources.append(spec)

    violations = adlmod.validate_config(config, sources)
    ok = not violations

    flattened_to = None
    if ok and args.flatten:
        flat = adlmod.flatten(config, sources)
        problems = validate_spec(flat)
        if has_errors(problems):
            _print_diags(problems, args.flatten)
            raise CliError(2, "flattened specification is not valid")
        Path(args.flatten).write_text(pretty_spec(flat))
        flattened_to = args.flatten

    payload = {
        "command": "adl",
        "ok": ok,
        "name": config.name,
        "violations": [{"code": v.code, "message": v.message} for v in violations],
        "flattened": flattened_to,
    }
    components = sum(1 for e in config.elements if e.role == adlmod.COMPONENT)
    connectors = sum(1 for e in config.elements if e.role == adlmod.CONNECTOR)
    if ok:
        lines = [f"{config.name}: ok ({components} component(s), {connectors} connector(s))"]
        if flattened_to:
            lines.append(f"flattened -> {flattened_to}")
    else:
        lines = [f"{config.name}: {len(violations)} violation(s)"]
        lines.extend(f"  {v}" for v in violations)
    _emit(args, payload, lines)
    return 0 if ok else 1


# ----------------------------------------------------------------------
# wiring


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="lotoskit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a behaviour file")
    p.add_argument("file")
    _add_format(p)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("lts", help="generate the state space and print it in .aut form")
    p.add_argument("file")
    p.add_argument("-o", "--output", metavar="FILE", help="write the .aut here instead of stdout")
    p.add_argument("--minimize", action="store_true", help="quotient by strong bisimilarity first")
    _add_no_hide(p)
    _add_budget_flags(p)
    _add_format(p)
    p.set_defaults(fn=_cmd_lts)

    v = sub.add_parser("verify", help="check properties of a state space")
    vsub = v.add_subparsers(dest="property", required=True)

    p = vsub.add_parser("deadlock", help="every state can move or has terminated")
    p.add_argument("file", help="behaviour file or .aut file")
    _add_no_hide(p)
    _add_budget_flags(p)
    _add_format(p)
    p.set_defaults(fn=_cmd_verify_deadlock)

    p = vsub.add_parser("reach", help="some transition matches a label pattern")
    p.add_argument("file", help="behaviour file or .aut file")
    p.add_argument("pattern", help="label pattern, e.g. 'inv !Service1 !*'")
    _add_no_hide(p)
    _add_budget_flags(p)
    _add_format(p)
    p.set_defaults(fn=_cmd_verify_reach)

    p = vsub.add_parser("safety", help="a monitor never reaches a bad state")
    p.add_argument("file", help="behaviour file or .aut file")
    p.add_argument("monitor", help="monitor file")
    _add_no_hide(p)
    _add_budget_flags(p)
    _add_format(p)
    p.set_defaults(fn=_cmd_verify_safety)

    p = vsub.add_parser("bisim", help="two systems are strongly bisimilar")
    p.add_argument("file", help="behaviour file or .aut file")
    p.add_argument("other", help="behaviour file or .aut file")
    _add_no_hide(p)
    _add_budget_flags(p)
    _add_format(p)
    p.set_defaults(fn=_cmd_verify_bisim)

    p = sub.add_parser("contract", help="check a component contract")
    p.add_argument("file")
    p.add_argument("--facts", metavar="FILE", help="fact base for the structural query")
    _add_budget_flags(p)
    _add_format(p)
    p.set_defaults(fn=_cmd_contract)

    p = sub.add_parser("adl", help="validate an architecture configuration")
    p.add_argument("file")
    p.add_argument("--flatten", metavar="FILE", help="write the flattened specification here")
    _add_format(p)
    p.set_defaults(fn=_cmd_adl)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"lotoskit: {exc.message}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
