import random

import pytest

import query_oracle
from lotoskit import (
    ContractCheckError,
    FactBase,
    check_asc,
    check_interface,
    eval_query,
    parse_asc,
    parse_facts,
)
from lotoskit.contracts import Atom, Const, Fact, InterfaceContract, Query, Var
from lotoskit.contracts import PREDICATES
from lotoskit.syntax import has_errors


# ----------------------------------------------------------------------
# fact bases


def test_parse_facts_basic():
    fb, diags = parse_facts(
        "% static structure\n"
        "class(A).\n"
        "inherit(B, A)\n"          # trailing dot optional
        "invoke(A, B, m, void). % call\n"
    )
    assert not diags
    assert len(fb) == 3
    assert Fact("inherit", ("B", "A")) in fb


def test_parse_facts_reports_every_problem():
    fb, diags = parse_facts(
        "classs(A).\n"             # unknown predicate
        "inherit(A).\n"            # wrong arity
        "not a fact\n"             # unparseable
        "class(B).\n"
    )
    assert [d.code for d in diags] == ["unknown-predicate", "bad-arity", "syntax-error"]
    assert len(fb) == 1


def test_parse_facts_empty_argument():
    _, diags = parse_facts("inherit(A, ).\n")
    assert [d.code for d in diags] == ["bad-arity"]


def test_factbase_validates_additions():
    fb = FactBase()
    with pytest.raises(ValueError):
        fb.add(Fact("made_up", ("A",)))
    with pytest.raises(ValueError):
        fb.add(Fact("class", ("A", "B")))
    fb.assert_fact("class", "A")
    fb.assert_fact("class", "A")   # idempotent
    assert len(fb) == 1


def test_by_predicate_sorted():
    fb = FactBase()
    fb.assert_fact("class", "Zeta")
    fb.assert_fact("class", "Alpha")
    assert [f.args for f in fb.by_predicate("class")] == [("Alpha",), ("Zeta",)]


# ----------------------------------------------------------------------
# query evaluation


def base(*lines):
    fb, diags = parse_facts("\n".join(lines))
    assert not diags
    return fb


OBSERVER_FACTS = base(
    "abstract_class(Subject).",
    "abstract_class(Observer).",
    "class(ConcreteSubject).",
    "class(ConcreteObserver).",
    "inherit(ConcreteSubject, Subject).",
    "inherit(ConcreteObserver, Observer).",
    "associate(Subject, Observer).",
)


def q(variables, *atoms):
    return Query(tuple(variables), tuple(atoms))


def a(pred, *terms):
    return Atom(pred, tuple(Var(t) if t.islower() else Const(t) for t in terms))


def test_join_query_backtracks():
    # lexicographically Observer comes first for abstract_class, but only
    # Subject satisfies the associate conjunct, so the search must back up
    query = q(["s", "o"], a("abstract_class", "s"), a("associate", "s", "o"))
    assert eval_query(OBSERVER_FACTS, query) == {"s": "Subject", "o": "Observer"}


def test_constant_filter():
    query = q(["x"], a("inherit", "x", "Subject"))
    assert eval_query(OBSERVER_FACTS, query) == {"x": "ConcreteSubject"}


def test_unsatisfiable():
    query = q(["x"], a("inherit", "Subject", "x"))
    assert eval_query(OBSERVER_FACTS, query) is None


def test_repeated_variable_must_agree():
    fb = base("associate(A, B).", "associate(C, C).")
    query = q(["x"], a("associate", "x", "x"))
    assert eval_query(fb, query) == {"x": "C"}


def test_ground_query():
    query = q([], a("class", "ConcreteSubject"))
    assert eval_query(OBSERVER_FACTS, query) == {}
    assert eval_query(OBSERVER_FACTS, q([], a("class", "Subject"))) is None


def test_eval_is_deterministic():
    query = q(["s", "o"], a("abstract_class", "s"), a("abstract_class", "o"))
    first = eval_query(OBSERVER_FACTS, query)
    assert first == eval_query(OBSERVER_FACTS, query)
    assert first == {"s": "Observer", "o": "Observer"}  # lexicographic facts


def random_instance(rng):
    """A fact base of up to 12 facts and a query of up to 4 conjuncts."""
    consts = ["A", "B", "C", "D"]
    preds = ["class", "inherit", "associate", "invoke"]
    fb = FactBase()
    for _ in range(rng.randint(1, 12)):
        pred = rng.choice(preds)
        args = tuple(rng.choice(consts) for _ in range(PREDICATES[pred]))
        fb.add(Fact(pred, args))
    variables = ["x", "y", "z"][: rng.randint(1, 3)]
    atoms = []
    for _ in range(rng.randint(1, 4)):
        pred = rng.choice(preds)
        terms = tuple(
            Var(rng.choice(variables)) if rng.random() < 0.6 else Const(rng.choice(consts))
            for _ in range(PREDICATES[pred])
        )
        atoms.append(Atom(pred, terms))
    used = {t.name for atom in atoms for t in atom.args if isinstance(t, Var)}
    variables = [v for v in variables if v in used]
    if not variables:
        atoms.append(Atom("class", (Var("x"),)))
        variables = ["x"]
    return fb, Query(tuple(variables), tuple(atoms))


def test_agrees_with_brute_force_enumeration():
    rng = random.Random(31)
    for _ in range(200):
        fb, query = random_instance(rng)
        witness = eval_query(fb, query)
        solutions = query_oracle.all_solutions(fb, query)
        if witness is None:
            assert solutions == []
        else:
            assert witness in solutions


# ----------------------------------------------------------------------
# interface rules


CLEAN_IC = InterfaceContract(
    participants=("A", "B"),
    in_ports=(("pin", "A"),),
    out_ports=(("pout", "B"),),
    in_msgs=(("m", "pin"), ("ext", "pin")),
    out_msgs=(("m", "pout"),),
    external_in=("ext",),
    flows=(("m", "pout", "pin"),),
)


def violation_codes(ic):
    return [v.code for v in check_interface(ic)]


def test_clean_interface():
    assert check_interface(CLEAN_IC) == []


def test_c1_duplicate_input_port():
    ic = InterfaceContract(
        participants=("A",),
        in_ports=(("p", "A"), ("p", "A")),
    )
    assert violation_codes(ic) == ["C1"]


def test_c2_duplicate_output_port():
    ic = InterfaceContract(
        participants=("A",),
        out_ports=(("p", "A"), ("p", "A")),
    )
    assert violation_codes(ic) == ["C2"]


def test_c3_unproduced_input_message():
    ic = InterfaceContract(
        participants=("A",),
        in_ports=(("pin", "A"),),
        in_msgs=(("m", "pin"),),
    )
    assert violation_codes(ic) == ["C3"]


def test_c3_satisfied_by_external_feed():
    ic = InterfaceContract(
        participants=("A",),
        in_ports=(("pin", "A"),),
        in_msgs=(("m", "pin"),),
        external_in=("m",),
    )
    assert violation_codes(ic) == []


def test_c4_unconsumed_output_message():
    ic = InterfaceContract(
        participants=("A",),
        out_ports=(("pout", "A"),),
        out_msgs=(("m", "pout"),),
    )
    assert violation_codes(ic) == ["C4"]


def test_unknown_owner():
    ic = InterfaceContract(
        participants=("A",),
        in_ports=(("p", "Ghost"),),
    )
    assert violation_codes(ic) == ["unknown-owner"]


def test_unknown_port_in_message():
    ic = InterfaceContract(
        participants=("A",),
        in_msgs=(("m", "ghost"),),
        external_in=("m",),
    )
    assert violation_codes(ic) == ["unknown-port"]


def test_bad_flow_ends():
    ic = InterfaceContract(
        participants=("A",),
        in_ports=(("pin", "A"),),
        out_ports=(("pout", "A"),),
        in_msgs=(("m", "pin"),),
        out_msgs=(("m", "pout"),),
        flows=(("m", "pin", "pout"),),  # reversed direction
    )
    assert violation_codes(ic) == ["bad-flow", "bad-flow"]


def test_duplicate_message_reported_once():
    ic = InterfaceContract(
        participants=("A",),
        in_ports=(("p1", "A"), ("p2", "A")),
        in_msgs=(("m", "p1"), ("m", "p2")),
    )
    assert violation_codes(ic) == ["C3"]


# ----------------------------------------------------------------------
# contract files


def test_parse_observer_contract(corpus_dir):
    contract, diags = parse_asc((corpus_dir / "observer.asc").read_text())
    assert contract is not None and not has_errors(diags)
    assert contract.name == "ObserverContract"
    assert "state change" in contract.assertion
    assert contract.sc.variables == ("s", "o", "cs", "co")
    assert len(contract.sc.atoms) == 5
    assert contract.ic.participants == (
        "aConcreteSubject", "aConcreteObserver", "anotherConcreteObserver",
    )
    assert ("change", "input") in contract.ic.in_msgs
    assert contract.ic.external_in == ("change",)
    assert contract.bc.name == "ObserverPattern"
    assert contract.bc.path == "observer.lot"


def asc(text):
    return parse_asc(f"component C where\n{text}\nend")


def test_section_appears_at_most_once():
    contract, diags = asc("bc none\nbc none")
    assert contract is None
    assert any("twice" in d.message for d in diags)


def test_duplicate_query_variable():
    contract, diags = asc("sc { exists x, x . class(x) }")
    assert contract is None
    assert any(d.code == "duplicate-definition" for d in diags)


def test_unused_query_variable():
    contract, diags = asc("sc { exists x, y . class(x) }")
    assert contract is None
    assert any(d.code == "unknown-query-variable" for d in diags)


def test_unknown_predicate_in_query():
    contract, diags = asc("sc { exists x . klass(x) }")
    assert contract is None
    assert any(d.code == "unknown-predicate" for d in diags)


def test_wrong_arity_in_query():
    contract, diags = asc("sc { exists x . inherit(x) }")
    assert contract is None
    assert any(d.code == "bad-arity" for d in diags)


def test_duplicate_ic_section():
    contract, diags = asc("ic {\nprocesses { A }\nprocesses { B }\n}")
    assert contract is None
    assert any(d.code == "malformed-ic" for d in diags)


def test_bc_none():
    contract, diags = asc("bc none")
    assert contract is not None and not has_errors(diags)
    assert contract.bc is None


def test_assertion_kept_verbatim():
    contract, _ = asc("assert { anything goes here, even [ brackets ] }")
    assert contract.assertion == "anything goes here, even [ brackets ]"


# ----------------------------------------------------------------------
# whole-contract checking


def observer_contract(corpus_dir):
    contract, _ = parse_asc((corpus_dir / "observer.asc").read_text())
    return contract


def observer_facts(corpus_dir):
    fb, diags = parse_facts((corpus_dir / "observer.facts").read_text())
    assert not diags
    return fb


def test_observer_contract_holds(corpus_dir):
    report = check_asc(
        observer_contract(corpus_dir),
        observer_facts(corpus_dir),
        base_dir=corpus_dir,
    )
    assert report.ok
    assert report.sc_witness == {
        "s": "Subject", "o": "Observer",
        "cs": "ConcreteSubject", "co": "ConcreteObserver",
    }
    assert report.ic_violations == []
    assert report.bc_result.ok
    assert report.lines()[0] == "contract ObserverContract: ok"


def test_structural_query_needs_facts(corpus_dir):
    with pytest.raises(ContractCheckError):
        check_asc(observer_contract(corpus_dir), None, base_dir=corpus_dir)


def test_failing_query_is_a_clean_failure(corpus_dir):
    fb = base("class(Lonely).")
    report = check_asc(observer_contract(corpus_dir), fb, base_dir=corpus_dir)
    assert not report.ok
    assert report.sc_checked and report.sc_witness is None
    assert any("no witness" in line for line in report.lines())


def test_missing_behaviour_file(tmp_path):
    contract, _ = parse_asc('component C where\nbc B from "gone.lot"\nend')
    with pytest.raises(ContractCheckError):
        check_asc(contract, base_dir=tmp_path)


def test_broken_behaviour_file(tmp_path):
    (tmp_path / "bad.lot").write_text("specification X [")
    contract, _ = parse_asc('component C where\nbc B from "bad.lot"\nend')
    with pytest.raises(ContractCheckError):
        check_asc(contract, base_dir=tmp_path)


def test_deadlocking_behaviour_fails_cleanly(tmp_path, corpus_dir):
    text = (corpus_dir / "deadlocked.lot").read_text()
    (tmp_path / "dead.lot").write_text(text)
    contract, _ = parse_asc('component C where\nbc B from "dead.lot"\nend')
    report = check_asc(contract, base_dir=tmp_path)
    assert not report.ok
    assert report.bc_result is not None and not report.bc_result.ok
    assert report.bc_result.trace == ["b"]


def mutation_codes(corpus_dir, name):
    contract, diags = parse_asc((corpus_dir / "mutations" / name).read_text())
    if contract is None:
        return [d.code for d in diags]
    report = check_asc(contract, observer_facts(corpus_dir), base_dir=corpus_dir / "mutations")
    assert not report.ok
    return [v.code for v in report.ic_violations]


def test_mutation_duplicate_in_port(corpus_dir):
    assert mutation_codes(corpus_dir, "observer_dup_in_port.asc") == ["C1"]


def test_mutation_change_not_external(corpus_dir):
    codes = mutation_codes(corpus_dir, "observer_change_not_external.asc")
    assert codes == ["C3"]


def test_mutation_notify_unproduced(corpus_dir):
    codes = mutation_codes(corpus_dir, "observer_notify_unproduced.asc")
    assert codes == ["C3"]


def test_mutation_misspelled_predicate(corpus_dir):
    codes = mutation_codes(corpus_dir, "observer_bad_predicate.asc")
    assert "unknown-predicate" in codes
