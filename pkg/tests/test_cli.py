import csv
import json
import subprocess
import sys
from importlib import resources

import pytest

from qlmwkb.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def manifest(directory):
    return json.loads((directory / "manifest.json").read_text())


def test_expand_latex(tmp_path):
    assert run("expand", "--target", "wkb", "--order", 8, "--format", "latex", "--out", tmp_path) == 0
    tex = (tmp_path / "wkb_series.tex").read_text()
    assert r"\begin{align*}" in tex
    assert "3" in tex and "k''" in tex
    m = manifest(tmp_path)
    assert m["command"] == "expand"
    assert m["artifact_paths"] == [str(tmp_path / "wkb_series.tex")]
    assert set(m) == {"command", "config_echo", "artifact_paths", "timestamp", "engine_version"}


def test_expand_text_first_iterate(tmp_path):
    out = tmp_path / "y1.txt"
    assert run("expand", "--target", "qlm", "--iterate", 1, "--order", 3, "--out", out, "--format", "text") == 0
    lines = [l for l in out.read_text().splitlines() if l.startswith("[")]
    assert lines[0] == "[0] (1 i) k"
    assert lines[2] == "[2] (1/4 i) k^-3 k1^2 + (-1/4 i) k^-2 k2"


def test_expand_single_term_json(tmp_path):
    out = tmp_path / "w.json"
    assert run("expand", "--order", 1, "--format", "json", "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["series"]["order_cap"] == 1
    assert data["series"]["coeffs"] == [[{"kpow": 1, "dexp": {}, "re": [0, 1], "im": [1, 1]}]]


def test_order_cap_is_usage_error(tmp_path, capsys):
    assert run("expand", "--target", "wkb", "--order", 13, "--out", tmp_path) == 2
    assert "12" in capsys.readouterr().err
    assert run("expand", "--target", "qlm", "--order", 11, "--out", tmp_path) == 2


def test_env_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("QLMWKB_MAX_ORDER", "4")
    assert run("expand", "--order", 5, "--out", tmp_path) == 2
    assert run("expand", "--order", 4, "--out", tmp_path) == 0
    monkeypatch.setenv("QLMWKB_MAX_ORDER", "many")
    assert run("expand", "--order", 4, "--out", tmp_path) == 2


@pytest.mark.parametrize("p,prefix", [(0, 1), (2, 4), (3, 8)])
def test_compare(tmp_path, p, prefix):
    assert run("compare", "--iterate", p, "--order", 8, "--out", tmp_path) == 0
    report = json.loads((tmp_path / f"compare_p{p}.json").read_text())
    assert report["match_prefix"] == prefix
    assert [r["equal"] for r in report["per_order"]] == [m < prefix for m in range(8)]


def test_spectrum_csv(tmp_path):
    out = tmp_path / "table.csv"
    assert run("spectrum", "--potential", "hulthen", "--param", "a=1", "--param", "lambda=2", "--levels", 2, "--out", out) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(raw.decode().splitlines()))
    assert list(rows[0]) == ["n", "method", "energy", "status"]
    assert len(rows) == 9
    by = {(r["n"], r["method"]): r for r in rows}
    assert float(by["0", "qlm"]["energy"]) == -1.125
    assert float(by["0", "wkb"]["energy"]) == -7.03125
    assert by["1", "qlm"]["status"] == "no_bound_state" and by["1", "qlm"]["energy"] == "nan"


def test_spectrum_ho_and_morse(tmp_path):
    out = tmp_path / "ho.csv"
    assert run("spectrum", "--potential", "ho1d", "--levels", 3, "--out", out) == 0
    for r in csv.DictReader(out.read_text().splitlines()):
        assert float(r["energy"]) == int(r["n"]) + 0.5
    out = tmp_path / "morse.csv"
    assert run("spectrum", "--potential", "morse", "--param", "A=1", "--param", "B=1", "--param", "a=1",
               "--levels", 0, "--out", out) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 3 and len({r["energy"] for r in rows}) == 1


def test_spectrum_json_provenance(tmp_path):
    out = tmp_path / "e.json"
    assert run("spectrum", "--potential", "eckart1d", "--param", "A=0", "--param", "B=3", "--levels", 2, "--out", out) == 0
    data = json.loads(out.read_text())
    first = data["rows"][0]
    assert first["E_qlm"] == pytest.approx(-0.5, rel=1e-13)
    assert "bracket" in first["levels"]["qlm"]["provenance"]
    assert data["rows"][2]["E_qlm"] is None


def test_spectrum_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert run("spectrum", "--potential", "modified_pt", "--param", "V0=6", "--levels", 3, "--out", out) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"potential": "hulthen", "params": {"lam": 8}, "levels": 1, "methods": "qlm"}))
    out = tmp_path / "c.csv"
    assert run("spectrum", "--config", cfg, "--out", out) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [r["n"] for r in rows] == ["0", "1"]
    assert float(rows[0]["energy"]) == -28.125
    # a flag beats the config value
    assert run("--config", cfg, "spectrum", "--levels", 0, "--param", "lam=2", "--out", out) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 1 and float(rows[0]["energy"]) == -1.125
    assert manifest(tmp_path)["config_echo"]["levels"] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--potential", "ho1d", "--methods", "exact,guess"],
        ["spectrum", "--potential", "ho1d", "--param", "a"],
        ["spectrum", "--potential", "morse", "--param", "A=-1"],
        ["spectrum", "--potential", "ho1d", "--format", "latex"],
        ["expand", "--iterate", "9", "--target", "qlm"],
        ["solve", "--potential", "ho1d"],
        ["nonsense"],
        ["--config", "missing.json", "expand"],
    ],
)
def test_usage_errors(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_solve_run_json(tmp_path):
    out = tmp_path / "run.json"
    assert run("solve", "--potential", "ho1d", "--energy", 2.5, "--iterates", 4, "--grid-points", 801, "--out", out) == 0
    run_ = json.loads(out.read_text())
    assert len(run_["grid"]) == 801
    assert len(run_["iterates"]) == 5 and len(run_["iterates"][4]["re"]) == 801
    assert len(run_["sup_diffs"]) == 4
    assert run_["config"]["z_max"] == 40.0
    assert run_["asymptotic_residue"]["alpha"] == pytest.approx(2.0, abs=1e-3)
    assert str(out) in manifest(tmp_path)["artifact_paths"]


def test_verify_formal(tmp_path, capsys):
    assert run("verify", "--suite", "formal", "--out", tmp_path) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4 and all(l.startswith("PASS") for l in lines)
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert report["passed"] is True


def test_verify_spectra(tmp_path):
    assert run("verify", "--suite", "spectra", "--out", tmp_path) == 0


def test_verify_corrupted_fixture(tmp_path, capsys):
    fixtures = tmp_path / "fx"
    fixtures.mkdir()
    src = resources.files("qlmwkb") / "fixtures" / "v1"
    for name in ("wkb_series.txt", "qlm_iterate1.txt", "qlm_iterate2.txt"):
        (fixtures / name).write_text((src / name).read_text())
    path = fixtures / "wkb_series.txt"
    path.write_text(path.read_text().replace("(3/8 i)", "(3/7 i)"))
    assert run("verify", "--suite", "formal", "--fixtures", fixtures, "--out", tmp_path / "r") == 1
    assert "FAIL  golden WKB series" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qlmwkb", "compare", "--iterate", "1", "--order", "4", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "compare_p1.json").read_text())["match_prefix"] == 2
