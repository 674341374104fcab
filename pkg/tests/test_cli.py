"""Command line behavior: exit codes, JSON stability, log queries."""

import json
from pathlib import Path

import pytest

from dymon.cli import main

ROOT = Path(__file__).resolve().parent.parent
SPLICE = str(ROOT / "attacks" / "rpcattack_1.dsl")
HONEST = str(ROOT / "attacks" / "rpcattack_0.dsl")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bundled_attack_files_match_embedded_scripts():
    from dymon import OR_HONEST, RPC_HONEST, RPC_SPLICE

    assert Path(HONEST).read_text() == RPC_HONEST
    assert Path(SPLICE).read_text() == RPC_SPLICE
    assert (ROOT / "attacks" / "or_honest.dsl").read_text() == OR_HONEST


def test_run_honest_exits_zero(capsys):
    code, out, _ = run_cli(capsys, "run", "rpc-correct", "--honest")
    assert code == 0
    assert "verdict: ok" in out


def test_run_splice_against_flawed_exits_ten(capsys):
    code, out, _ = run_cli(capsys, "run", "rpc-flawed", SPLICE, "--seed", "3")
    assert code == 10
    assert "assertion-failure" in out
    assert "rpc_client" in out


def test_run_splice_against_correct_exits_zero(capsys):
    code, out, _ = run_cli(capsys, "run", "rpc-correct", SPLICE, "--seed", "3")
    assert code == 0


def test_run_json_is_byte_stable(capsys):
    code1, out1, _ = run_cli(capsys, "run", "otway-rees", "--honest", "--seed", "5", "--json")
    code2, out2, _ = run_cli(capsys, "run", "otway-rees", "--honest", "--seed", "5", "--json")
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["verdict"]["kind"] == "ok"
    assert doc["seed"] == 5


def test_run_needs_script_or_honest_flag(capsys):
    code, _, err = run_cli(capsys, "run", "rpc-correct")
    assert code == 2 and "give exactly one" in err
    code, _, err = run_cli(capsys, "run", "rpc-correct", SPLICE, "--honest")
    assert code == 2


def test_run_missing_file_exits_two(capsys):
    code, _, err = run_cli(capsys, "run", "rpc-correct", "/nope/missing.dsl")
    assert code == 2
    assert "cannot read" in err


def test_run_bad_script_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.dsl"
    bad.write_text("let x : gremlin\n")
    code, _, err = run_cli(capsys, "run", "rpc-correct", str(bad))
    assert code == 2
    assert "grammar item 1" in err


def test_unknown_protocol_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "telnet", "--honest"])
    assert info.value.code == 2


def test_dump_and_query_round_trip(tmp_path, capsys):
    dump = tmp_path / "log.json"
    code, _, _ = run_cli(
        capsys, "run", "otway-rees", "--honest", "--seed", "5", "--dump", str(dump)
    )
    assert code == 0
    doc = json.loads(dump.read_text())

    # the session key literal is High but not Low in the final log
    key_event = next(e for e in doc["events"] if "SessionKey" in e)
    key_term = key_event[len("New("):].split(",")[0]
    code, out, _ = run_cli(capsys, "query", str(dump), "--level", "high", "--term", key_term)
    assert code == 0 and "= true" in out
    code, out, _ = run_cli(capsys, "query", str(dump), "--level", "low", "--term", key_term)
    assert code == 1 and "= false" in out


def test_query_plain_event_lines_and_explain(tmp_path, capsys):
    logfile = tmp_path / "events.txt"
    logfile.write_text(
        "New(Literal(0x6b),HmacKey(PresharedKey(Literal(0x41),Literal(0x42))))\n"
        "Bad(Literal(0x41))\n"
    )
    code, out, _ = run_cli(
        capsys, "query", str(logfile), "--level", "low",
        "--term", "Literal(0x6b)", "--explain",
    )
    assert code == 0
    assert "owner compromised: true" in out


def test_query_bad_term_exits_two(tmp_path, capsys):
    logfile = tmp_path / "events.txt"
    logfile.write_text("Bad(Literal(0x41))\n")
    code, _, err = run_cli(capsys, "query", str(logfile), "--level", "low", "--term", "wat")
    assert code == 2
    assert "query:" in err


def test_fuzz_json_and_exit_codes(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys, "fuzz", "rpc-correct", "--count", "40", "--seed", "3", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert sum(doc["histogram"].values()) == 40

    outdir = tmp_path / "cex"
    code, out, _ = run_cli(
        capsys, "fuzz", "rpc-flawed", "--count", "10", "--seed", "3",
        "--out-dir", str(outdir),
    )
    assert code == 10
    saved = list(outdir.glob("counterexample_*.dsl"))
    assert saved
    # saved programs parse back
    from dymon import parse_attack

    parse_attack(saved[0].read_text())


def test_fuzz_human_output(capsys):
    code, out, _ = run_cli(capsys, "fuzz", "otway-rees", "--count", "15", "--seed", "1")
    assert code == 0
    assert "ran 15 programs against otway-rees" in out
    assert "counterexamples: 0" in out
