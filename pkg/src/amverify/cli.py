"""``amverify`` command line.

Every subcommand prints canonical JSON on stdout (``check-all`` prints a
table unless ``--json``).  Exit codes: 0 success, 1 a verification failed,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, acceptance, amcycles, dp2, enriques, gf2, golden, intersect
from .lattice import LatticeError, dp_picard, load_lattice
from .signlemma import STRATEGIES, StrategyDisagreement, verify_lemma
from .signlemma.search import default_parallelism


class UsageError(Exception):
    pass


class Outcome:
    """Result document plus exit code of one command."""

    def __init__(self, doc, code: int = 0, text: str | None = None, message: str | None = None):
        self.doc = doc
        self.code = code
        self.text = text
        self.message = message


def _load_lattice(path: str | None):
    if path is None:
        return None
    try:
        return load_lattice(path)
    except (OSError, json.JSONDecodeError, LatticeError) as exc:
        raise UsageError(f"cannot load lattice {path}: {exc}") from exc


def cmd_lines(args) -> Outcome:
    if not 2 <= args.degree <= 9:
        raise UsageError("--degree must be between 2 and 9")
    n_points = 9 - args.degree
    lattice = _load_lattice(args.lattice_file)
    if args.degree == 2 and lattice is None:
        return Outcome(dp2.lines_report())
    if lattice is not None and lattice.rank != n_points + 1:
        raise UsageError(f"lattice rank {lattice.rank} does not match degree {args.degree}")
    try:
        tags = dp2.enumerate_lines(n_points, lattice or dp_picard(n_points))
    except dp2.ConsistencyError as exc:
        return Outcome({"error": str(exc)}, 1, message=f"line census mismatch: {exc}")
    return Outcome({"lines": [{"family": t.family, "indices": list(t.indices), "coeffs": list(t.cls.coeffs)} for t in tags]})


def cmd_conic_bundles(args) -> Outcome:
    return Outcome(dp2.bundles_report())


def _parse_slice(text: str | None) -> int | None:
    if text is None:
        return None
    key, _, val = text.partition("=")
    if key.strip() != "m" or not val.strip().lstrip("-").isdigit():
        raise UsageError(f"--slice expects m=K, got {text!r}")
    m = int(val)
    if not 0 <= m <= 7:
        raise UsageError("--slice m must be between 0 and 7")
    return m


def cmd_verify_sign_lemma(args) -> Outcome:
    slice_m = _parse_slice(args.slice)
    if args.shards < 1:
        raise UsageError("--shards must be positive")
    report = verify_lemma(args.strategy, parallelism=args.shards, slice_m=slice_m)
    doc = report.to_json(timing=True)
    if args.report:
        Path(args.report).write_text(golden.canonical_json(doc), encoding="utf-8")
    if report.conclusion_failures:
        return Outcome(doc, 1, message="sign lemma: some homogeneous assignment has no witnessing bundle")
    return Outcome(doc)


def cmd_intersection(args) -> Outcome:
    lattice = _load_lattice(args.lattice_file)
    try:
        space = intersect.get_space(args.space, lattice)
        value = intersect.evaluate(args.expr, space)
    except intersect.ExpressionError as exc:
        raise UsageError(str(exc)) from exc
    return Outcome({"value": value})


def cmd_torsion_solve(args) -> Outcome:
    if args.system_file:
        try:
            doc = json.loads(Path(args.system_file).read_text(encoding="utf-8"))
            system = gf2.LinearSystem.from_json(doc)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise UsageError(f"cannot load relation system: {exc}") from exc
        return Outcome(amcycles.solve_report(system))
    system = amcycles.build_am_relation_system()
    report = amcycles.solve_report(system)
    ok, _ = acceptance.check_torsion()
    if not ok:
        return Outcome(report, 1, message="torsion: relation system does not force the expected non-equivalences")
    return Outcome(report)


def cmd_enriques_decomp(args) -> Outcome:
    try:
        c = enriques.DecompositionConstraint(args.total, args.parts, args.min_square, args.min_cross)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    tuples = enriques.enumerate_decompositions(c)
    if args.hodge_flag:
        if args.parts != 2:
            raise UsageError("--hodge-flag applies to two-part decompositions only")
        return Outcome([{"tuple": list(t), "hodge_ok": enriques.hodge_index_flag(*t)} for t in tuples])
    return Outcome([list(t) for t in tuples])


def cmd_check_all(args) -> Outcome:
    results = acceptance.run_all(full=args.full, shards=args.shards)
    doc = {"criteria": [r.to_json() for r in results], "all_passed": all(r.passed for r in results)}
    failed = [r for r in results if not r.passed]
    message = "; ".join(f"FAILED: {r.claim}" for r in failed) or None
    text = None if args.json else acceptance.format_table(results) + "\n"
    return Outcome(doc, 1 if failed else 0, text=text, message=message)


def cmd_golden(args) -> Outcome:
    if args.check:
        lattice = _load_lattice(args.dp2_lattice)
        bad = golden.check_golden(args.check, lattice)
        doc = {"golden_dir": str(args.check), "differences": bad}
        return Outcome(doc, 1 if bad else 0, message="golden files differ: " + ", ".join(sorted(bad)) if bad else None)
    written = golden.regenerate_golden(args.output_dir)
    return Outcome({"written": [p.name for p in written]})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amverify", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--manifest", metavar="PATH", help="also write a run manifest (JSON) to PATH")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", metavar="PATH", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lines", parents=[common], help="lines on a del Pezzo surface")
    s.add_argument("--degree", type=int, default=2)
    s.add_argument("--lattice-file", help="Picard lattice JSON {name, basis, gram}")
    s.set_defaults(func=cmd_lines)

    s = sub.add_parser("conic-bundles", parents=[common], help="the 126 conic bundles on dP2")
    s.set_defaults(func=cmd_conic_bundles)

    s = sub.add_parser("verify-sign-lemma", parents=[common], help="exhaustive sign-lemma scan")
    s.add_argument("--strategy", choices=STRATEGIES + ("symmetry-reduced",), default="reduced")
    s.add_argument("--shards", type=int, default=None, help="worker processes (default: $AMVERIFY_SHARDS or 1)")
    s.add_argument("--slice", metavar="m=K", help="restrict to A_i = + exactly for i <= K")
    s.add_argument("--report", metavar="FILE", help="also write the report to FILE")
    s.set_defaults(func=cmd_verify_sign_lemma)

    s = sub.add_parser("intersection", parents=[common], help="evaluate an intersection number")
    s.add_argument("--expr", required=True)
    s.add_argument("--space", choices=("amx", "dp2", "lattice"), default="amx")
    s.add_argument("--lattice-file")
    s.set_defaults(func=cmd_intersection)

    s = sub.add_parser("torsion-solve", parents=[common], help="solve a Z/2 relation system")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--system", choices=("am-full",), default="am-full")
    g.add_argument("--system-file")
    s.set_defaults(func=cmd_torsion_solve)

    s = sub.add_parser("enriques-decomp", parents=[common], help="numerical splittings of an Enriques divisor")
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--parts", type=int, default=2)
    s.add_argument("--min-square", type=int, default=0)
    s.add_argument("--min-cross", type=int, default=0)
    s.add_argument("--hodge-flag", action="store_true")
    s.set_defaults(func=cmd_enriques_decomp)

    s = sub.add_parser("check-all", parents=[common], help="run every acceptance check")
    s.add_argument("--full", action="store_true", help="include the naive 2^28 scan")
    s.add_argument("--shards", type=int, default=None)
    s.add_argument("--json", action="store_true", help="print JSON instead of a table")
    s.set_defaults(func=cmd_check_all)

    s = sub.add_parser("golden", parents=[common], help="regenerate or check golden files")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--output-dir")
    g.add_argument("--check", metavar="DIR")
    s.add_argument("--dp2-lattice", metavar="FILE", help="recompute lines with this Picard lattice")
    s.set_defaults(func=cmd_golden)
    return p


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on malformed flags
    if getattr(args, "shards", 0) is None:
        try:
            args.shards = default_parallelism()
        except ValueError:
            parser.error("AMVERIFY_SHARDS must be an integer")
    started = _now()
    try:
        out = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"amverify: error: {exc}", file=sys.stderr)
        return 2
    except StrategyDisagreement as exc:
        print(f"amverify: strategies disagree: {exc}", file=sys.stderr)
        return 1

    sys.stdout.write(out.text if out.text is not None else golden.canonical_json(out.doc))
    if out.message:
        print(out.message, file=sys.stderr)
    if args.manifest:
        params = {k: v for k, v in vars(args).items() if k not in ("func", "manifest", "command")}
        manifest = {
            "command": args.command,
            "parameters": params,
            "started_at": started,
            "finished_at": _now(),
            "artifact_version": __version__,
            "result_digest": golden.digest(_stable(out.doc)),
        }
        Path(args.manifest).write_text(golden.canonical_json(manifest), encoding="utf-8")
    return out.code


def _stable(doc):
    """Drop wall-clock fields so the digest depends only on the parameters."""
    if isinstance(doc, dict):
        return {k: _stable(v) for k, v in doc.items() if k not in ("wall_time_ms", "seconds", "backend")}
    if isinstance(doc, list):
        return [_stable(v) for v in doc]
    return doc


if __name__ == "__main__":
    sys.exit(main())
