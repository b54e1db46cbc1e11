import json
import subprocess
import sys

import pytest

from popmatch import cli, fixtures
from popmatch.errors import InvariantViolation
from popmatch.instance import dumps, parse_instance


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc, encoding="utf-8")
    return str(path)


def _matching(*edges):
    return {"edges": [{"agent": a, "job": b} for a, b in edges]}


def _run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    return {
        "f1": _write(tmp_path, "f1.json", fixtures.F1_DOC),
        "f2": _write(tmp_path, "f2.json", fixtures.F2_DOC),
        "f4": _write(tmp_path, "f4.json", fixtures.F4_DOC),
        "f4c": _write(tmp_path, "f4c.json", fixtures.F4_COSTS_DOC),
        "f2_all": _write(tmp_path, "f2_all.json",
                         _matching(("a", "b"), ("a", "b'"), ("a'", "b"), ("a'", "b'"))),
        "f4_m": _write(tmp_path, "f4_m.json", _matching(("a1", "b1"), ("a2", "b2"))),
        "f4_n": _write(tmp_path, "f4_n.json", _matching(("a1", "b2"), ("a2", "b1"))),
    }


def test_validate(capsys, files):
    code, out, _ = _run(capsys, "validate", files["f4"])
    assert code == 0
    assert json.loads(out) == {"valid": True, "agents": 2, "jobs": 2, "edges": 4,
                               "perfect_matchable": True}


def test_verify_popular(capsys, files):
    code, out, _ = _run(capsys, "verify", files["f2"], "--matching", files["f2_all"])
    assert code == 0
    assert json.loads(out) == {"verdict": "popular", "witness": None}


def test_verify_not_popular(capsys, files):
    code, out, err = _run(capsys, "verify", files["f4"], "--matching", files["f4_m"])
    assert code == 3
    doc = json.loads(out)
    assert doc["verdict"] == "not popular"
    assert doc["witness"] == _matching(("a1", "b2"), ("a2", "b1"))
    assert doc["delta"] == -2
    assert len(doc["cycle"]) == 4
    assert "beats" in err


def test_compare(capsys, files):
    code, out, _ = _run(capsys, "compare", files["f4"],
                        "--matching", files["f4_m"], "--matching", files["f4_n"])
    assert code == 0
    doc = json.loads(out)
    assert doc["delta"] == -2
    assert sum(doc["per_vertex"].values()) == -2


def test_compare_needs_two(capsys, files):
    code, _, _ = _run(capsys, "compare", files["f4"], "--matching", files["f4_m"])
    assert code == 1


def test_solve_with_costs(capsys, files):
    code, out, _ = _run(capsys, "solve", files["f4c"])
    assert code == 0
    doc = json.loads(out)
    assert doc["cost"] == 10
    assert doc["matching"] == _matching(("a1", "b2"), ("a2", "b1"))
    assert doc["perfect_matchings"] == 2
    assert doc["popular_perfect_matchings"] == 1


def test_stable_plain_and_colorful(capsys, files):
    code, out, _ = _run(capsys, "stable", files["f1"])
    assert code == 0
    assert json.loads(out) == {**_matching(("a", "b")), "perfect": False}
    code, out, _ = _run(capsys, "stable", files["f4"], "--colorful")
    assert code == 0
    doc = json.loads(out)
    assert doc["perfect"] is True
    assert doc["edges"] == [{"agent": "a1", "job": "b2", "color": 1},
                            {"agent": "a2", "job": "b1", "color": 1}]


def test_enumerate(capsys, files):
    code, out, _ = _run(capsys, "enumerate", files["f4c"])
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 2
    assert sorted(m["popular"] for m in doc["matchings"]) == [False, True]
    code, out, _ = _run(capsys, "enumerate", files["f4c"], "--popular-only")
    doc = json.loads(out)
    assert doc["count"] == 1
    assert doc["matchings"][0]["cost"] == 10


def test_reduce_gstar(capsys, files):
    code, out, _ = _run(capsys, "reduce", files["f2"], "--gstar")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "gstar"
    assert doc["colors"] == 4
    a = doc["agents"][0]
    assert a["name"] == "a"
    assert len(a["preferences"]) == 2 * 4
    assert a["preferences"][:3] == [{"vertex": "b", "color": 1}, {"vertex": "b'", "color": 1},
                                    {"vertex": "b", "color": 2}]
    b = doc["jobs"][0]
    assert b["preferences"][0] == {"vertex": "a", "color": 4}


def test_reduce_gm(capsys, files):
    code, out, _ = _run(capsys, "reduce", files["f2"], "--gm", "--matching", files["f2_all"])
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "g0"
    assert doc["colors"] == 4
    assert [a["name"] for a in doc["agents"]] == ["a_1", "a_2", "a'_1", "a'_2"]
    real = {(r["agent"], r["job"]): (r["clone_agent"], r["clone_job"])
            for r in doc["realization"]}
    assert real == {("a", "b"): ("a_1", "b_1"), ("a", "b'"): ("a_2", "b'_2"),
                    ("a'", "b'"): ("a'_1", "b'_1"), ("a'", "b"): ("a'_2", "b_2")}


def test_reduce_gm_needs_matching(capsys, files):
    code, _, _ = _run(capsys, "reduce", files["f2"], "--gm")
    assert code == 1


def test_lift(capsys, files):
    code, out, _ = _run(capsys, "lift", files["f4"], "--matching", files["f4_n"])
    assert code == 0
    doc = json.loads(out)
    assert doc["found"] is True
    assert {(e["agent"], e["job"]) for e in doc["edges"]} == {("a1", "b2"), ("a2", "b1")}
    code, out, _ = _run(capsys, "lift", files["f4"], "--matching", files["f4_m"])
    assert code == 0
    assert json.loads(out) == {"found": False, "edges": []}


def test_gen_round_trips(capsys, tmp_path):
    out_path = tmp_path / "gen.json"
    argv = ["gen", "--seed", "7", "--agents", "3", "--jobs", "3", "--max-cap", "2",
            "--density", "0.8", "--out", str(out_path)]
    code, out, _ = _run(capsys, *argv)
    assert code == 0 and out == ""
    first = out_path.read_bytes()
    inst = parse_instance(first.decode())
    assert len(inst.agents) == 3
    assert cli.run(argv) == 0
    assert out_path.read_bytes() == first


def test_gen_impossible_shape(capsys):
    code, _, err = _run(capsys, "gen", "--seed", "1", "--agents", "4", "--jobs", "1",
                        "--max-cap", "1", "--density", "1.0")
    assert code == 1
    assert "invalid input" in err


@pytest.mark.parametrize("argv", [
    ["solve", "{f4c}"],
    ["verify", "{f4}", "--matching", "{f4_m}"],
    ["enumerate", "{f4c}"],
    ["reduce", "{f2}", "--gstar"],
    ["stable", "{f2}", "--colorful"],
])
def test_output_is_byte_identical(capsys, files, argv):
    argv = [a.format(**files) for a in argv]
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert first == second
    assert first == dumps(json.loads(first))


@pytest.mark.parametrize("doc", [
    "not json",
    {"agents": []},
    {"agents": [{"name": "a", "capacity": 1, "preferences": ["b"]}],
     "jobs": [{"name": "b", "capacity": 1, "preferences": []}]},
    {"agents": [{"name": "a", "capacity": 2, "preferences": ["b"]}],
     "jobs": [{"name": "b", "capacity": 1, "preferences": ["a"]}]},
])
def test_invalid_instance_exits_1(capsys, tmp_path, doc):
    code, out, err = _run(capsys, "solve", _write(tmp_path, "bad.json", doc))
    assert code == 1
    assert out == ""
    assert "invalid input" in err


def test_missing_file_exits_1(capsys, tmp_path):
    code, _, err = _run(capsys, "validate", str(tmp_path / "nope.json"))
    assert code == 1
    assert "cannot read" in err


def test_bad_matching_exits_1(capsys, files, tmp_path):
    bad = _write(tmp_path, "bad_m.json", _matching(("a1", "b1")))
    code, _, _ = _run(capsys, "verify", files["f4"], "--matching", bad)
    assert code == 1
    ghost = _write(tmp_path, "ghost.json", _matching(("a1", "zz")))
    code, _, _ = _run(capsys, "compare", files["f4"], "--matching", ghost, "--matching", ghost)
    assert code == 1


def test_usage_errors_exit_1(capsys):
    assert _run(capsys, "frobnicate")[0] == 1
    assert _run(capsys)[0] == 1
    assert _run(capsys, "reduce", "x.json")[0] == 1


def test_infeasible_exits_2(capsys, tmp_path):
    doc = {
        "agents": [{"name": "a1", "capacity": 1, "preferences": ["b", "c"]},
                   {"name": "a2", "capacity": 1, "preferences": ["c"]}],
        "jobs": [{"name": "b", "capacity": 1, "preferences": ["a1"]},
                 {"name": "c", "capacity": 2, "preferences": ["a1", "a2"]}],
    }
    path = _write(tmp_path, "inf.json", doc)
    for cmd in ("solve", "enumerate"):
        code, out, err = _run(capsys, cmd, path)
        assert code == 2
        assert "infeasible" in err
    code, out, _ = _run(capsys, "validate", path)
    assert code == 0
    assert json.loads(out)["perfect_matchable"] is False


def test_enumeration_limit_exits_5(capsys, files, monkeypatch):
    monkeypatch.setenv("POPMATCH_MAX_ENUM", "1")
    code, _, err = _run(capsys, "solve", files["f4"])
    assert code == 5
    assert "enumeration limit" in err
    monkeypatch.setenv("POPMATCH_MAX_ENUM", "2")
    assert _run(capsys, "solve", files["f4"])[0] == 0


def test_invariant_violation_exits_4(capsys, files, monkeypatch):
    def broken(*args, **kwargs):
        raise InvariantViolation("synthetic")

    monkeypatch.setattr(cli, "solve_min_cost", broken)
    code, _, err = _run(capsys, "solve", files["f4"])
    assert code == 4
    assert "synthetic" in err


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "popmatch", "verify", files["f4"],
                           "--matching", files["f4_m"]],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 3
    assert json.loads(proc.stdout)["delta"] == -2
