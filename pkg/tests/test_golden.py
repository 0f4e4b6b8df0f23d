from pathlib import Path

from amverify import golden

GOLDEN = Path(__file__).parent / "golden"


def test_live_output_matches_golden_files():
    live = golden.reports()
    assert sorted(live) == sorted(p.name for p in GOLDEN.glob("*.json"))
    for name, doc in live.items():
        assert (GOLDEN / name).read_text(encoding="utf-8") == golden.canonical_json(doc), name


def test_regeneration_is_byte_identical(tmp_path):
    first = golden.regenerate_golden(tmp_path / "a")
    second = golden.regenerate_golden(tmp_path / "b")
    assert len(first) == 5
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() == (GOLDEN / a.name).read_bytes()


def test_check_golden_reports_edits(tmp_path):
    golden.regenerate_golden(tmp_path)
    assert golden.check_golden(tmp_path) == {}
    path = tmp_path / "enriques.json"
    path.write_text(path.read_text().replace("4", "5", 1))
    (tmp_path / "torsion.json").unlink()
    assert golden.check_golden(tmp_path) == {"enriques.json": "content differs", "torsion.json": "missing"}


def test_digest_is_stable():
    doc = {"b": [1, 2], "a": {"y": 1, "x": 2}}
    assert golden.digest(doc) == golden.digest({"a": {"x": 2, "y": 1}, "b": [1, 2]})
    assert golden.digest(doc) != golden.digest({"b": [2, 1], "a": {"y": 1, "x": 2}})
