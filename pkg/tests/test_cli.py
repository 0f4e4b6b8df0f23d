import json
import subprocess
import sys
from pathlib import Path

import pytest

from amverify.cli import main
from amverify.lattice import dp_picard

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_lines(capsys):
    code, out, _ = run(capsys, "lines", "--degree", "2")
    assert code == 0
    assert len(json.loads(out)["lines"]) == 56
    code, out, _ = run(capsys, "lines", "--degree", "3")
    assert len(json.loads(out)["lines"]) == 27
    code, out, _ = run(capsys, "lines", "--degree", "9")
    assert json.loads(out)["lines"] == []


def test_conic_bundles(capsys):
    code, out, _ = run(capsys, "conic-bundles")
    assert code == 0 and len(json.loads(out)["bundles"]) == 126


def test_intersection(capsys):
    code, out, _ = run(capsys, "intersection", "--expr", "(-K)^3", "--space", "amx")
    assert code == 0 and json.loads(out) == {"value": -4}
    code, out, _ = run(capsys, "intersection", "--expr", "A1.D1", "--space", "dp2")
    assert json.loads(out) == {"value": 2}


def test_intersection_with_lattice_file(capsys, tmp_path):
    path = tmp_path / "lat.json"
    path.write_text(json.dumps(dp_picard(3).to_json()))
    code, out, _ = run(capsys, "intersection", "--expr", "(l-a1)^2", "--space", "lattice", "--lattice-file", str(path))
    assert code == 0 and json.loads(out) == {"value": 0}


def test_enriques_decomp(capsys):
    code, out, _ = run(capsys, "enriques-decomp", "--total", "10", "--parts", "2", "--min-square", "4", "--min-cross", "1")
    assert code == 0 and json.loads(out) == [[4, 4, 1]]
    code, out, _ = run(capsys, "enriques-decomp", "--total", "10", "--min-square", "4", "--hodge-flag")
    assert json.loads(out) == [{"tuple": [4, 4, 1], "hodge_ok": False}, {"tuple": [4, 6, 0], "hodge_ok": False}]


def test_torsion_solve(capsys, tmp_path):
    code, out, _ = run(capsys, "torsion-solve")
    doc = json.loads(out)
    assert code == 0 and doc["consistent"] and doc["rank"] == 121
    bad = {"unknowns": ["a", "b"], "equations": [
        {"terms": ["a"], "rhs": 1, "provenance": "p"},
        {"terms": ["a"], "rhs": 0, "provenance": "q"},
        {"terms": ["b"], "rhs": 0, "provenance": "r"},
    ]}
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "torsion-solve", "--system-file", str(path))
    doc = json.loads(out)
    assert code == 0 and not doc["consistent"]
    assert [e["index"] for e in doc["core"]] == [0, 1]


def test_verify_sign_lemma(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify-sign-lemma", "--strategy", "propagation", "--report", str(report))
    doc = json.loads(out)
    assert code == 0
    assert doc["conclusion_failures"] == 0 and doc["hypothesis_satisfying"] == 128
    assert json.loads(report.read_text()) == doc
    code, out, _ = run(capsys, "verify-sign-lemma", "--strategy", "naive", "--slice", "m=7", "--shards", "1")
    assert code == 0 and json.loads(out)["total_scanned"] == 1 << 21


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-sign-lemma", "--slice", "m=9"],
        ["verify-sign-lemma", "--slice", "k=3"],
        ["verify-sign-lemma", "--strategy", "fast"],
        ["verify-sign-lemma", "--shards", "0"],
        ["intersection", "--expr", "(-K"],
        ["intersection", "--expr", "H", "--space", "lattice"],
        ["lines", "--degree", "1"],
        ["enriques-decomp", "--total", "10", "--parts", "1"],
        ["enriques-decomp"],
        ["golden"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejects malformed flags itself
        code = exc.code
    assert code == 2
    assert capsys.readouterr().err


def test_manifest_digest_is_deterministic(capsys, tmp_path):
    digests = []
    for k in range(2):
        path = tmp_path / f"m{k}.json"
        assert main(["--manifest", str(path), "verify-sign-lemma", "--slice", "m=6"]) == 0
        m = json.loads(path.read_text())
        assert set(m) == {"command", "parameters", "started_at", "finished_at", "artifact_version", "result_digest"}
        assert m["command"] == "verify-sign-lemma" and m["parameters"]["slice"] == "m=6"
        digests.append(m["result_digest"])
    capsys.readouterr()
    assert digests[0] == digests[1]


def test_golden_check(capsys, tmp_path):
    assert run(capsys, "golden", "--check", str(GOLDEN))[0] == 0
    out_dir = tmp_path / "g"
    code, out, _ = run(capsys, "golden", "--output-dir", str(out_dir))
    assert code == 0 and len(json.loads(out)["written"]) == 5
    edited = out_dir / "conic_bundles.json"
    edited.write_text(edited.read_text().replace('"II"', '"XX"', 1))
    code, out, err = run(capsys, "golden", "--check", str(out_dir))
    assert code == 1 and "conic_bundles.json" in json.loads(out)["differences"]


def test_golden_detects_perturbed_gram(capsys, tmp_path):
    doc = dp_picard(7).to_json()
    good = tmp_path / "good.json"
    good.write_text(json.dumps(doc))
    assert run(capsys, "golden", "--check", str(GOLDEN), "--dp2-lattice", str(good))[0] == 0
    doc["gram"][1][1] = -2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out, err = run(capsys, "golden", "--check", str(GOLDEN), "--dp2-lattice", str(bad))
    assert code == 1
    assert "lines.json" in json.loads(out)["differences"]


def test_check_all_table(capsys):
    code, out, _ = run(capsys, "check-all")
    assert code == 0
    rows = out.strip().splitlines()
    assert len(rows) == 8 and all(r.startswith("PASS") for r in rows)
    code, out, _ = run(capsys, "check-all", "--json")
    assert json.loads(out)["all_passed"] is True


def test_console_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "amverify.cli", "intersection", "--expr", "(2H)^3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"value": 16}
    proc = subprocess.run([sys.executable, "-m", "amverify.cli", "lines", "--bogus"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
