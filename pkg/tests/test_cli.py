import json

import pytest

from locver.cli import NO, OK, UNKNOWN, main
from locver.fileformat import parse


@pytest.fixture
def instance(tmp_path):
    def write(text, name="g.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def gen(capsys, *argv):
    capsys.readouterr()
    assert main(["gen", *argv]) == OK
    return capsys.readouterr().out


def test_decide_exit_codes(instance, capsys):
    member = instance(gen(capsys, "cycle", "4", "--selected", "0,2"))
    assert main(["decide", "exts", member]) == OK
    other = instance(gen(capsys, "cycle", "4", "--selected", "0"), "h.txt")
    assert main(["decide", "exts", other, "--format", "json"]) == NO
    record = json.loads(capsys.readouterr().out)
    assert record == {"language": "exts", "member": False}


def test_decide_runs_local_checker(instance, capsys):
    path = instance(gen(capsys, "path", "3", "--inputs", "01,01,00"))
    assert main(["decide", "and", path, "--format", "json"]) == NO
    record = json.loads(capsys.readouterr().out)
    assert record["local"]["verdicts"] == [True, True, False]


def test_verify_prover_and_certificate_files(instance, capsys):
    tree = instance(gen(capsys, "star", "3"))
    assert main(["verify", "tree", tree, "--prove"]) == OK
    cycle = instance(gen(capsys, "cycle", "4"), "c.txt")
    assert main(["verify", "tree", cycle, "--prove"]) == UNKNOWN
    certs = instance("n 4\ne 0 1\ne 1 2\ne 2 3\ne 0 3\nc 0 0 00\nc 0 1 01\nc 0 2 02\nc 0 3 01\n", "certs.txt")
    capsys.readouterr()
    assert main(["verify", "tree", cycle, "--certs", certs]) == NO
    assert "reject" in capsys.readouterr().out


def test_game_command(instance, capsys):
    path = instance(gen(capsys, "cycle", "3", "--selected", "0"))
    assert main(["game", path, "--alg", "alts", "--class", "NLD", "--space", "alts:1"]) == OK
    assert main(["game", path, "--alg", "alts", "--class", "NLD", "--space", "alts:1", "--truth", "legal",
                 "--format", "json"]) == NO
    record = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert record["consistent"] is False
    assert main(["game", path, "--alg", "pi2:exts", "--class", "Pi2", "--space", "describe", "--space",
                 "refute"]) == OK


def test_game_budget_is_inconclusive(instance, capsys, monkeypatch):
    path = instance(gen(capsys, "complete", "4"))
    monkeypatch.setenv("LOCVER_BUDGET", "10")
    assert main(["game", path, "--alg", "tree", "--class", "NLD", "--space", "tree:4"]) == UNKNOWN
    assert "inconclusive" in capsys.readouterr().err


def test_lift_commands(instance, capsys):
    tri = instance(gen(capsys, "cycle", "3", "--selected", "0"))
    assert main(["lift", tri, "--search", "amos"]) == NO
    lifted = parse(capsys.readouterr().out)
    assert lifted.config.n == 6
    twisted = instance("n 3\ne 0 1\ne 1 2\ne 0 2\nv 0 1 1,0\n", "t.txt")
    assert main(["lift", twisted, "--format", "json"]) == OK
    record = json.loads(capsys.readouterr().out)
    assert parse(record["cover"]).config.n == 6
    untwisted = instance("n 3\ne 0 1\ne 1 2\ne 0 2\n", "u.txt")
    assert main(["lift", untwisted]) == UNKNOWN


def test_reduce_label_preservation(instance, capsys):
    path = instance(gen(capsys, "path", "2", "--inputs", "01,00"))
    assert main(["reduce", path, "--lang", "and", "--check-label-preserving", "--format", "json"]) == OK
    out = capsys.readouterr()
    rows = [json.loads(line) for line in out.out.splitlines()]
    assert len(rows) == 3 and not any(r["member"] for r in rows)
    assert len({r["certs"] for r in rows}) == 1
    assert "label-preserving: yes" in out.err


def test_gen_iter_round_trip(tmp_path, capsys):
    out = tmp_path / "iter.txt"
    assert main(["gen", "iter", "--machine", "parity", "--tape", "3", "--len-l", "4", "--len-r", "2",
                 "-o", str(out)]) == OK
    assert main(["decide", "iter_minus", str(out)]) == OK
    assert main(["decide", "iter", str(out)]) == OK
    both_one = tmp_path / "odd.txt"
    assert main(["gen", "iter", "--tape", "3", "--a", "1", "--b", "1", "--len-l", "2", "--len-r", "2",
                 "-o", str(both_one)]) == OK
    assert main(["decide", "iter_minus", str(both_one)]) == OK
    assert main(["decide", "iter", str(both_one)]) == NO


def test_parse_errors_report_position(instance, capsys):
    bad = instance("n 2\ne 0 1\nx 0 zz\n")
    assert main(["decide", "and", bad]) == UNKNOWN
    assert "line 3, column 5" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main(["decide"]) == UNKNOWN
    assert main(["frobnicate"]) == UNKNOWN
    assert main(["decide", "and", "/nonexistent/file"]) == UNKNOWN
    assert main(["--help"]) == OK


def test_report_is_deterministic_without_runtimes(capsys):
    assert main(["report", "--max-n", "3", "--no-runtime", "--format", "json"]) == OK
    first = capsys.readouterr().out
    assert main(["report", "--max-n", "3", "--no-runtime", "--format", "json"]) == OK
    assert capsys.readouterr().out == first
    lines = [json.loads(line) for line in first.splitlines()]
    assert "caveats" in lines[0]
    records = lines[1:]
    assert [(r["language"], r["claim"]) for r in records] == sorted((r["language"], r["claim"]) for r in records)
    assert not any(r["evidence"] in ("counterexample", "inconclusive") and r["claim"] not in ("not NLD",)
                   for r in records)
