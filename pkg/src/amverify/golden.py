"""Canonical JSON outputs and golden-file regeneration / comparison."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import amcycles, dp2, enriques
from .lattice import BilinearLattice
from .signlemma import verify_lemma


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(doc) -> str:
    compact = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()


def lines_doc(lattice: BilinearLattice | None = None) -> dict:
    """Line list; a custom lattice is re-enumerated (and cross-checked) from scratch."""
    if lattice is None:
        return dp2.lines_report()
    tags = dp2.enumerate_lines(lattice.rank - 1, lattice)
    return {"lines": [{"family": t.family, "indices": list(t.indices), "coeffs": list(t.cls.coeffs)} for t in tags]}


def enriques_doc() -> dict:
    cases = [(10, 2, 4, 1), (10, 2, 4, 0), (10, 3, 4, 0)]
    decomps = []
    for total, parts, mins, minc in cases:
        c = enriques.DecompositionConstraint(total, parts, mins, minc)
        tuples = enriques.enumerate_decompositions(c)
        decomps.append(
            {
                "constraint": {"total": total, "parts": parts, "min_square": mins, "min_cross": minc},
                "tuples": [list(x) for x in tuples],
                "hodge_ok": [enriques.hodge_index_flag(*x) if parts == 2 else None for x in tuples],
            }
        )
    rr = [
        {"D2": d2, "chi": enriques.chi(d2), "dim": enriques.linear_system_dim(d2).to_json()}
        for d2 in (0, 2, 4, 10)
    ]
    return {"decompositions": decomps, "riemann_roch": rr}


def reports(lattice: BilinearLattice | None = None) -> dict[str, dict]:
    """The five exported report kinds, keyed by file name."""
    return {
        "lines.json": lines_doc(lattice),
        "conic_bundles.json": dp2.bundles_report(),
        "sign_lemma.json": verify_lemma("reduced", parallelism=1).to_json(timing=False),
        "torsion.json": amcycles.solve_report(amcycles.build_am_relation_system()),
        "enriques.json": enriques_doc(),
    }


def regenerate_golden(output_dir: str | Path) -> list[Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, doc in reports().items():
        path = out / name
        path.write_text(canonical_json(doc), encoding="utf-8")
        written.append(path)
    return written


def check_golden(golden_dir: str | Path, lattice: BilinearLattice | None = None) -> dict[str, str]:
    """Golden files that differ from the live output, mapped to a short reason."""
    root = Path(golden_dir)
    bad = {}
    try:
        live = reports(lattice)
    except dp2.ConsistencyError as exc:
        live = reports()
        bad["lines.json"] = f"live computation failed: {exc}"
    for name, doc in live.items():
        if name in bad:
            continue
        path = root / name
        if not path.exists():
            bad[name] = "missing"
        elif path.read_text(encoding="utf-8") != canonical_json(doc):
            bad[name] = "content differs"
    return bad
