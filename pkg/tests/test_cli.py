import json

import pytest

from ramforge import serialize as ser
from ramforge.cli import JobConfig, config_from_args, build_parser, main, parse_alpha, run, threads_from_env
from ramforge.errors import ValidationError
from ramforge.lubintate import FrobeniusSeries, lt_group
from ramforge.ring import make_ring

from cli_cases import CASES, read_goldens, run_case, run_suite


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, tmp_path):
    got = run_case(CASES[name], tmp_path)
    want = read_goldens(name)
    assert want, f"no golden for {name}; run python tests/cli_cases.py"
    assert sorted(got) == sorted(want)
    for fname in want:
        assert got[fname] == want[fname], fname


def test_two_runs_are_byte_identical(tmp_path):
    a = run_suite(tmp_path / "a")
    b = run_suite(tmp_path / "b")
    assert a == b


def test_residual_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["lt", "build", "--p", "3", "--T", "5", "--N", "6"]) == 0
    doc = json.loads((tmp_path / "F.json").read_text())
    doc["F"]["coeffs"][1][1] = [[1]]
    (tmp_path / "F.json").write_text(json.dumps(doc))
    assert main(["lt", "check"]) == 5
    assert "RESIDUAL" in capsys.readouterr().err


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("RAMFORGE_THREADS", "0")
    assert main(["ring", "info", "--p", "2"]) == 2
    monkeypatch.setenv("RAMFORGE_THREADS", "4")
    assert main(["ring", "info", "--p", "2"]) == 0
    assert threads_from_env({}) == 1
    with pytest.raises(ValidationError):
        threads_from_env({"RAMFORGE_THREADS": "many"})


def test_case1_command(tmp_path, monkeypatch):
    R = make_ring(2, prec=30)
    G = lt_group(FrobeniusSeries.canonical(R), 5, 10)
    g, u = G.endo(R(2), 16), G.endo(R(3), 16)
    (tmp_path / "g.json").write_text(ser.dumps(ser.series_to_json(g)))
    (tmp_path / "u.json").write_text(ser.dumps(ser.series_to_json(u)))
    (tmp_path / "x.json").write_text(ser.dumps(ser.series_to_json(g.__class__.x(R, 16, 10))))
    monkeypatch.chdir(tmp_path)
    assert main(["lift", "case1", "--input", "g.json", "--u", "u.json"]) == 4
    assert main(["lift", "case1", "--input", "g.json", "--u", "x.json", "--out", "h.json"]) == 0
    h = ser.series_from_json(json.loads((tmp_path / "h.json").read_text()))
    assert h == g


def test_parse_alpha():
    R = make_ring(2, 2, 1, prec=10)
    assert parse_alpha("1+2^2", R) == 5
    assert parse_alpha("-(pi**3) + 7*w", R) == -8 + 7 * R.omega()
    for bad in ("__import__('os')", "1/2", "w**-1", "x", "2 if 1 else 3", "[1]"):
        with pytest.raises(ValidationError):
            parse_alpha(bad, R)


def test_job_config_round_trip():
    ns = build_parser().parse_args(["criterion", "check", "--p", "3", "--alpha", "4", "--nmax", "2"])
    cfg = config_from_args(ns)
    assert cfg.command == "criterion check" and cfg.ring == {"p": 3, "f": 1, "e": 1, "N": 16}
    doc = json.loads(cfg.to_json())
    assert doc["format"] == 1 and doc["kind"] == "job"
    assert JobConfig(doc["command"], doc["ring"], doc["options"], doc["outputs"], doc["seed"]) == cfg


def test_unknown_command_is_validation_error():
    assert run(JobConfig("lt frobnicate")) == 2
