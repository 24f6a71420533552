import json
import subprocess
import sys
from pathlib import Path

import pytest

from kuznetsov4.cli import EXIT_ASSERT, EXIT_BUDGET, EXIT_OK, EXIT_USAGE, run
from kuznetsov4.emit import parse


def _json(capsys, argv, code=EXIT_OK):
    assert run(argv) == code
    return parse(capsys.readouterr().out, "json")


def test_identity_element_prints_one(capsys):
    doc = _json(capsys, ["kloosterman", "--w", "w1", "--c", "1,1,1", "--L", "1,1,1", "--M", "1,1,1"])
    assert doc["value"] == 1
    assert doc["ok"] and doc["provenance"]["command"] == "kloosterman"


def test_long_element_csv(capsys):
    assert run(["kloosterman", "--w", "w8", "--c", "2,2,2", "--format", "csv"]) == EXIT_OK
    rows = parse(capsys.readouterr().out, "csv")
    assert rows[0]["w"] == "w8" and rows[0]["cells"] == 9
    assert rows[0]["value"] == pytest.approx(-3)


def test_zeroset_enumerate_three_records(capsys):
    doc = _json(capsys, ["zeroset", "enumerate"])
    assert len(doc["regions"]) == 3
    assert doc["counts"] == {"identically_vanishing": 6, "feasible": 3}


def test_classical(capsys):
    doc = _json(capsys, ["kloosterman", "--classical", "1,1,3"])
    assert doc["value"] == pytest.approx(-1)


def test_budget_exit(capsys):
    assert run(["kloosterman", "--w", "w8", "--c", "30,30,30", "--max-cells", "1000"]) == EXIT_BUDGET
    assert "budget" in capsys.readouterr().err


def test_usage_exits(capsys):
    assert run(["no-such-command"]) == EXIT_USAGE
    assert run(["kloosterman", "--w", "w9", "--c", "1,1,1"]) == EXIT_USAGE
    assert run(["intbounds", "--lemma", "A1", "--e", "1"]) == EXIT_USAGE
    assert run(["kloosterman", "--c", "1,1"]) == EXIT_USAGE


def test_assertion_exit(capsys):
    # the lemma fails without epsilon slack in the log case
    argv = ["intbounds", "--lemma", "A1", "--e", "1", "--f", "1", "--epsilon", "0", "--factor", "2"]
    assert run(argv) == EXIT_ASSERT


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"w": "w8", "c": [2, 2, 2], "seed": 5}))
    doc = _json(capsys, ["kloosterman", "--config", str(cfg)])
    assert doc["value"] == pytest.approx(-3) and doc["provenance"]["seed"] == 5
    doc = _json(capsys, ["kloosterman", "--config", str(cfg), "--w", "w5"])
    assert doc["value"] == pytest.approx(6)


def test_out_file_format_from_suffix(tmp_path, capsys):
    out = tmp_path / "a1.csv"
    assert run(["intbounds", "--lemma", "A1", "--e", "2", "--f", "0.5", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    rows = parse(out.read_text(), "csv")
    assert [r["T"] for r in rows] == [10, 100, 1000, 10000, 100000]


def test_deterministic_output(capsys):
    argv = ["zeroset", "sample", "--n", "2000", "--seed", "3"]
    assert run(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert run(argv) == EXIT_OK
    assert capsys.readouterr().out == first


def test_mellin_and_residue(capsys):
    doc = _json(capsys, ["whittaker", "mellin", "--alpha", "0,0,0,0", "--s", "2,2,2"])
    assert doc["value"] == pytest.approx(3.125833198449167e-4, rel=1e-10)
    assert doc["error"] < 1e-12
    doc = _json(capsys, ["whittaker", "residue", "--alpha", "0.3i,0.1i,-0.15i,-0.25i", "--contour",
                         "--nodes", "24", "--radius", "0.03"])
    assert doc["relative_error"] < 1e-6


def test_eisenstein_commands(capsys):
    doc = _json(capsys, ["eisenstein", "hecke", "--m", "12", "--s1", "0", "--s2", "0", "--s3", "0",
                         "--check-bound"])
    assert doc["value"] == pytest.approx(40)  # d4(12)
    doc = _json(capsys, ["eisenstein", "langlands", "--partition", "2,2", "--s1", "0.1i", "--v", "0.2i,0.3i"])
    assert len(doc["alpha"]) == 4


def test_verify_all_only(capsys):
    assert run(["verify-all", "--only", "5,11"]) == EXIT_OK
    captured = capsys.readouterr()
    doc = parse(captured.out, "json")
    assert doc["passed"] == 2 and doc["total"] == 2
    assert "criterion  5 [PASS]" in captured.err
    assert run(["verify-all", "--only", "12"]) == EXIT_USAGE


def test_main_term_command(capsys):
    doc = _json(capsys, ["main-term", "--T", "8,16,32", "--quad", "16"])
    assert abs(doc["slope"] - 17) < 0.85


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kuznetsov4", "kloosterman", "--w", "w1", "--c", "1,1,1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == {"re": 1.0, "im": 0.0}


def _documented_headers():
    readme = (Path(__file__).resolve().parents[1] / "README.md").read_text()
    table = readme.split("| command | CSV columns |")[1].split("\n\n")[0]
    out = {}
    for line in table.splitlines()[2:]:
        cells = [c.strip() for c in line.strip("|").split("|")]
        out[cells[0].strip("`")] = cells[1].split("`")[1]
    return out


SCHEMA_RUNS = {
    "whittaker mellin": ["whittaker", "mellin", "--alpha", "0,0,0,0", "--s", "2,2,2"],
    "whittaker residue": ["whittaker", "residue", "--alpha", "0.3i,0.1i,-0.15i,-0.25i"],
    "main-term": ["main-term", "--T", "8,16", "--quad", "8"],
    "zeroset maps": ["zeroset", "maps", "--samples", "5"],
    "zeroset sample": ["zeroset", "sample", "--n", "100"],
    "kloosterman": ["kloosterman", "--w", "w8", "--c", "2,2,2"],
    "kloosterman --classical": ["kloosterman", "--classical", "1,1,3"],
    "intbounds --lemma A1": ["intbounds", "--lemma", "A1", "--e", "2", "--f", "1"],
    "intbounds --lemma A3": ["intbounds", "--lemma", "A3", "--e", "1,2,1", "--B", "0,5,20"],
    "eisenstein hecke": ["eisenstein", "hecke", "--m", "6", "--s1", "0", "--s2", "0", "--s3", "0"],
    "verify-all": ["verify-all", "--only", "5"],
}


@pytest.mark.parametrize("name", sorted(SCHEMA_RUNS))
def test_csv_header_matches_readme(name, capsys):
    run(SCHEMA_RUNS[name] + ["--format", "csv"])
    header = capsys.readouterr().out.splitlines()[0]
    assert header == _documented_headers()[name]
