import json

import pytest

from conftest import CORPUS
from lotoskit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def corpus(name):
    return str(CORPUS / name)


# ----------------------------------------------------------------------
# check


def test_check_ok(capsys):
    code, out, err = run(capsys, "check", corpus("client_server.lot"))
    assert code == 0
    assert "ClientServer: ok" in out
    assert err == ""


def test_check_reports_diagnostics(capsys, tmp_path):
    bad = tmp_path / "bad.lot"
    bad.write_text("specification S [g] : noexit :=\n  behaviour\n    q; stop\nendspec\n")
    code, out, err = run(capsys, "check", str(bad))
    assert code == 1
    assert "unknown-gate" in err
    assert "1 error(s)" in out


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", corpus("observer.lot"), "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["name"] == "ObserverPattern"
    assert payload["diagnostics"] == []


def test_check_json_carries_diagnostics(capsys, tmp_path):
    bad = tmp_path / "bad.lot"
    bad.write_text("specification S [g] : noexit := behaviour q; stop endspec\n")
    code, out, _ = run(capsys, "check", str(bad), "--format", "json")
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False
    assert payload["diagnostics"][0]["code"] == "unknown-gate"
    assert payload["diagnostics"][0]["line"] == 1


def test_unreadable_file_is_operational_error(capsys):
    code, _, err = run(capsys, "check", "no/such/file.lot")
    assert code == 2
    assert "cannot read" in err


# ----------------------------------------------------------------------
# lts


EXPECTED_AUT = (
    "des (0, 4, 4)\n"
    '(0, "invClt !s1 !op1", 1)\n'
    '(1, "invSrv !s1 !op1", 2)\n'
    '(2, "terSrv !s1 !r1", 3)\n'
    '(3, "terClt !s1 !r1", 0)\n'
)


def test_lts_to_stdout(capsys):
    code, out, _ = run(capsys, "lts", corpus("client_server.lot"))
    assert code == 0
    assert out == EXPECTED_AUT


def test_lts_to_file(capsys, tmp_path):
    target = tmp_path / "out.aut"
    code, out, _ = run(capsys, "lts", corpus("client_server.lot"), "-o", str(target))
    assert code == 0
    assert target.read_text() == EXPECTED_AUT
    assert "4 state(s), 4 transition(s)" in out


def test_lts_minimize(capsys):
    code, out, _ = run(capsys, "lts", corpus("multicast_unordered.lot"), "--minimize")
    assert code == 0
    assert out.startswith("des (0, 9, 9)\n")


def test_lts_budget_exhaustion(capsys):
    code, _, err = run(capsys, "lts", corpus("multicast_unordered.lot"), "--max-states", "5")
    assert code == 2
    assert "budget" in err


def test_lts_invalid_spec_is_operational_error(capsys, tmp_path):
    bad = tmp_path / "bad.lot"
    bad.write_text("specification S [g] : noexit := behaviour q; stop endspec\n")
    code, _, err = run(capsys, "lts", str(bad))
    assert code == 2
    assert "unknown-gate" in err


# ----------------------------------------------------------------------
# verify


def test_verify_deadlock_ok(capsys):
    code, out, _ = run(capsys, "verify", "deadlock", corpus("client_server.lot"))
    assert code == 0
    assert out.startswith("deadlock: ok")


def test_verify_deadlock_violated(capsys):
    code, out, _ = run(capsys, "verify", "deadlock", corpus("deadlocked.lot"))
    assert code == 1
    assert "violated" in out
    assert "trace: b" in out


def test_verify_deadlock_json(capsys):
    code, out, _ = run(
        capsys, "verify", "deadlock", corpus("deadlocked.lot"), "--format", "json"
    )
    assert code == 1
    payload = json.loads(out)
    assert payload["property"] == "deadlock"
    assert payload["ok"] is False
    assert payload["trace"] == ["b"]


def test_verify_reach(capsys):
    code, out, _ = run(
        capsys, "verify", "reach", corpus("multicast.lot"), "terClt !res"
    )
    assert code == 0
    assert "reachable" in out


def test_verify_reach_negative(capsys):
    code, out, _ = run(
        capsys, "verify", "reach", corpus("multicast.lot"), "inv !Service1 !*"
    )
    assert code == 1  # hidden gates are not observable without --no-hide


def test_verify_reach_no_hide(capsys):
    code, out, _ = run(
        capsys, "verify", "reach", corpus("multicast.lot"), "inv !Service1 !*", "--no-hide"
    )
    assert code == 0
    assert "trace: invClt !op1 ; inv !Service1 !op1" in out


def test_verify_reach_bad_pattern(capsys):
    code, _, err = run(capsys, "verify", "reach", corpus("multicast.lot"), "!!")
    assert code == 3
    assert "bad pattern" in err


def test_verify_safety(capsys):
    code, out, _ = run(
        capsys, "verify", "safety", corpus("multicast.lot"),
        corpus("multicast_order.mon"), "--no-hide",
    )
    assert code == 0

    code, out, _ = run(
        capsys, "verify", "safety", corpus("multicast_unordered.lot"),
        corpus("multicast_order.mon"), "--no-hide",
    )
    assert code == 1
    assert "trace: invClt !op1 ; inv !Service2 !op1" in out


def test_verify_safety_bad_monitor(capsys, tmp_path):
    mon = tmp_path / "bad.mon"
    mon.write_text("states a\n")
    code, _, err = run(capsys, "verify", "safety", corpus("multicast.lot"), str(mon))
    assert code == 2
    assert "not a valid monitor" in err


def test_verify_bisim(capsys):
    code, out, _ = run(
        capsys, "verify", "bisim",
        corpus("multicast.lot"), corpus("multicast_unordered.lot"),
    )
    assert code == 0
    assert "strongly bisimilar" in out


def test_verify_bisim_negative(capsys):
    code, out, _ = run(
        capsys, "verify", "bisim",
        corpus("client_server.lot"), corpus("deadlocked.lot"),
    )
    assert code == 1
    assert "trace:" in out


def test_verify_accepts_aut_input(capsys, tmp_path):
    target = tmp_path / "cs.aut"
    run(capsys, "lts", corpus("client_server.lot"), "-o", str(target))
    code, out, _ = run(
        capsys, "verify", "bisim", str(target), corpus("client_server.lot")
    )
    assert code == 0

    code, _, err = run(capsys, "verify", "deadlock", str(tmp_path / "junk.aut"))
    assert code == 2


# ----------------------------------------------------------------------
# contract


def test_contract_ok(capsys):
    code, out, _ = run(
        capsys, "contract", corpus("observer.asc"),
        "--facts", corpus("observer.facts"),
    )
    assert code == 0
    assert "contract ObserverContract: ok" in out
    assert "witness" in out


def test_contract_json(capsys):
    code, out, _ = run(
        capsys, "contract", corpus("observer.asc"),
        "--facts", corpus("observer.facts"), "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["sc"]["witness"]["s"] == "Subject"
    assert payload["ic"] == []
    assert payload["bc"]["ok"] is True


def test_contract_violation_exit_code(capsys):
    code, out, _ = run(
        capsys, "contract", str(CORPUS / "mutations" / "observer_dup_in_port.asc"),
        "--facts", corpus("observer.facts"),
    )
    assert code == 1
    assert "[C1]" in out


def test_contract_missing_facts_is_operational(capsys):
    code, _, err = run(capsys, "contract", corpus("observer.asc"))
    assert code == 2
    assert "no facts" in err


def test_contract_unparseable_file(capsys, tmp_path):
    bad = tmp_path / "bad.asc"
    bad.write_text("component ???")
    code, _, err = run(capsys, "contract", str(bad))
    assert code == 2


# ----------------------------------------------------------------------
# adl


def test_adl_ok(capsys):
    code, out, _ = run(capsys, "adl", corpus("multicast.adl"))
    assert code == 0
    assert "Multicast: ok (3 component(s), 2 connector(s))" in out


def test_adl_flatten_round_trip(capsys, tmp_path):
    flat = tmp_path / "flat.lot"
    code, out, _ = run(
        capsys, "adl", corpus("client_server.adl"), "--flatten", str(flat)
    )
    assert code == 0
    assert flat.exists()
    code, _, _ = run(capsys, "verify", "bisim", str(flat), corpus("client_server.lot"))
    assert code == 0


def test_adl_violations_exit_code(capsys, tmp_path):
    bad = tmp_path / "coupled.adl"
    bad.write_text("""
configuration Coupled
  use "client_server.lot"
  components {
    a = Client [g, h],
    b = Server [g, h]
  }
  connectors {
    conn = Connector [g, h, g2, h2]
  }
  composition { ( a || b ) ||| conn }
end
""")
    (tmp_path / "client_server.lot").write_text(
        (CORPUS / "client_server.lot").read_text()
    )
    code, out, _ = run(capsys, "adl", str(bad))
    assert code == 1
    assert "direct-component-coupling" in out


def test_adl_missing_source_is_operational(capsys, tmp_path):
    orphan = tmp_path / "orphan.adl"
    orphan.write_text((CORPUS / "client_server.adl").read_text())
    code, _, err = run(capsys, "adl", str(orphan))
    assert code == 2


# ----------------------------------------------------------------------
# usage errors


def test_unknown_flag_exits_3(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["lts", "--bogus"])
    assert exc.value.code == 3


def test_missing_subcommand_exits_3(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 3


def test_verify_requires_property(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 3
