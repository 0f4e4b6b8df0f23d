import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amverify import dp2
from amverify.signlemma import (
    SignAssignment,
    StrategyDisagreement,
    canonicalize,
    conclusion_holds,
    cross_check,
    is_hypothesis_satisfying,
    mixed_profile,
    orbit,
    orbit_size,
    verify_lemma,
)
from amverify.signlemma import kernels
from amverify.signlemma.encoding import FULL_MASK, fiber_table, hypothesis_constraints, line_bits
from amverify.signlemma.propagation import enumerate_homogeneous
from amverify.signlemma.search import case2_assignment, slice_a_bits

bits28 = st.integers(0, FULL_MASK)
perms7 = st.permutations(range(1, 8)).map(tuple)
ALL_PLUS_A = SignAssignment.from_signs([1] * 7, [-1] * 21)


def test_geiser_pairs_have_opposite_signs():
    for x in (0, FULL_MASK, 0x5A5A5A5, ALL_PLUS_A.bits):
        s = SignAssignment(x)
        for t in dp2.lines():
            assert s.sign(t) == -s.sign(dp2.geiser(t))


def test_encoding_uses_a_and_b_bits():
    lb = line_bits()
    assert [b.var for b in lb[:28]] == list(range(28))
    assert all(b.polarity == 0 for b in lb[:28])
    assert all(b.polarity == 1 for b in lb[28:])


def test_mixed_profile_examples():
    prof = mixed_profile(ALL_PLUS_A)
    assert prof[dp2.bundle_index("II", (1, 2, 3))] == (0, 3, 3)
    assert prof[dp2.bundle_index("I", (1,))] == (6, 0, 0)


def test_hypothesis_examples():
    assert is_hypothesis_satisfying(ALL_PLUS_A)
    prof = mixed_profile(ALL_PLUS_A)
    for rec, p in zip(dp2.conic_bundles(), prof):
        assert p[0] == (6 if rec.bundle_type in ("I", "III", "V") else 0)
    assert not is_hypothesis_satisfying(case2_assignment())


def test_conclusion_example():
    w = conclusion_holds(ALL_PLUS_A)
    assert w is not None and dp2.conic_bundles()[w].bundle_type == "II"


def test_conclusion_is_total():
    # defined on assignments that fail the hypothesis too
    assert conclusion_holds(SignAssignment(0)) is None
    conclusion_holds(case2_assignment())


def test_fiber_table_matches_bundles():
    table = fiber_table()
    assert table.shape == (126, 6, 4)
    s = SignAssignment(0x2B3C4D5)
    for rec, rows in zip(dp2.conic_bundles(), table.tolist()):
        for (x, y), (v, p, w, q) in zip(rec.singular_fibers, rows):
            assert s.sign(x) == (1 if ((s.bits >> v) & 1) ^ p else -1)
            assert s.sign(y) == (1 if ((s.bits >> w) & 1) ^ q else -1)


def _gf2_rank(masks):
    rows = [int(m) for m in masks]
    rank = 0
    for bit in range(28):
        piv = next((r for r in rows if (r >> bit) & 1), None)
        if piv is None:
            continue
        rows = [r ^ piv if (r >> bit) & 1 else r for r in rows if r is not piv]
        rank += 1
    return rank


def test_satisfying_count_from_rank():
    masks, rhs = hypothesis_constraints()
    assert len(masks) == 126 * 5
    rank = _gf2_rank(masks)
    sols = enumerate_homogeneous()
    assert len(sols) == 2 ** (28 - rank) == 128
    for x in sols:
        assert all(bin(x & int(m)).count("1") % 2 == r for m, r in zip(masks, rhs))


def test_canonical_form_example():
    s = SignAssignment.from_signs([1, -1, 1, 1, 1, 1, 1], [1] * 21)
    canon, sigma, flipped = canonicalize(s)
    assert not flipped
    assert canon.describe()["A"] == "++++++-"
    assert s.permute(sigma) == canon


@given(bits28)
@settings(max_examples=60)
def test_canonicalize_is_idempotent_and_orbit_invariant(x):
    s = SignAssignment(x)
    canon, sigma, flipped = canonicalize(s)
    assert canonicalize(canon)[0] == canon
    assert (s.flip() if flipped else s).permute(sigma) == canon
    assert canon.m >= 4


@given(bits28, perms7, st.booleans())
@settings(max_examples=60)
def test_canonical_form_is_a_class_invariant(x, sigma, flip):
    s = SignAssignment(x)
    t = s.permute(sigma)
    if flip:
        t = t.flip()
    assert canonicalize(s)[0] == canonicalize(t)[0]


@given(bits28)
@settings(max_examples=8)
def test_orbit_size_matches_brute_force(x):
    s = SignAssignment(x)
    full = orbit(s)
    assert orbit_size(s) == len(full)
    assert {canonicalize(SignAssignment(b))[0] for b in list(full)[:20]} == {canonicalize(s)[0]}


@pytest.mark.parametrize("x", sorted(enumerate_homogeneous())[::16])
def test_orbit_size_of_satisfying_patterns(x):
    s = SignAssignment(x)
    assert orbit_size(s) == len(orbit(s))


@given(bits28, perms7)
@settings(max_examples=40)
def test_s7_invariance(x, sigma):
    s = SignAssignment(x)
    t = s.permute(sigma)
    assert is_hypothesis_satisfying(t) == is_hypothesis_satisfying(s)
    assert (conclusion_holds(t) is None) == (conclusion_holds(s) is None)
    assert is_hypothesis_satisfying(s.flip()) == is_hypothesis_satisfying(s)


@given(st.sampled_from(sorted(enumerate_homogeneous())), perms7)
@settings(max_examples=40)
def test_s7_invariance_on_satisfying(x, sigma):
    t = SignAssignment(x).permute(sigma)
    assert is_hypothesis_satisfying(t)
    assert conclusion_holds(t) is not None


@given(bits28)
@settings(max_examples=40)
def test_profile_respects_geiser(x):
    s = SignAssignment(x)
    prof = mixed_profile(s)
    for i in range(1, 8):
        p1 = prof[dp2.bundle_index("I", (i,))]
        p5 = prof[dp2.bundle_index("V", (i,))]
        assert p5 == (p1[0], p1[2], p1[1])
    rec = dp2.conic_bundles()[dp2.bundle_index("I", (1,))]
    image = dp2.itemized_fibers("V", (1,))
    for a, b in rec.singular_fibers:
        ga, gb = dp2.geiser(a), dp2.geiser(b)
        assert frozenset((ga.name, gb.name)) in image
        assert (s.sign(ga), s.sign(gb)) == (-s.sign(a), -s.sign(b))


def test_witness_recount():
    rep = verify_lemma("propagation")
    bundles = dp2.conic_bundles()
    for x in rep.satisfying:
        s = SignAssignment(x)
        w = conclusion_holds(s)
        signs = [(s.sign(a), s.sign(b)) for a, b in bundles[w].singular_fibers]
        assert signs.count((1, 1)) >= 1 and signs.count((-1, -1)) >= 1


def test_strategies_agree():
    reports = [verify_lemma(s) for s in ("reduced", "propagation")]
    cross_check(reports)
    for r in reports:
        assert r.total_scanned == 1 << 28
        assert r.hypothesis_satisfying == 128
        assert r.conclusion_failures == 0
    orbits = sorted(e["orbit_size"] for e in reports[0].representatives)
    assert sum(orbits) == 128


@pytest.mark.slow
def test_naive_full_scan_agrees():
    naive = verify_lemma("naive")
    assert naive.total_scanned == 1 << 28
    cross_check([naive, verify_lemma("reduced")])
    assert naive.conclusion_failures == 0


def test_disagreement_is_a_hard_failure():
    good = verify_lemma("propagation")
    bad = dataclasses.replace(
        good, strategy="broken", hypothesis_satisfying=127, satisfying=good.satisfying - {min(good.satisfying)}
    )
    with pytest.raises(StrategyDisagreement) as err:
        cross_check([good, bad])
    assert err.value.assignment == SignAssignment(min(good.satisfying))


@pytest.mark.parametrize("m", range(8))
def test_slices_agree_across_strategies(m):
    reports = [verify_lemma(s, slice_m=m) for s in ("naive", "reduced", "propagation")]
    cross_check(reports)
    assert all(x & 0x7F == slice_a_bits(m) for x in reports[0].satisfying)
    assert reports[0].hypothesis_satisfying == 1
    assert reports[0].conclusion_failures == 0


def test_m7_slice_forces_equal_b_signs():
    rep = verify_lemma("reduced", slice_m=7)
    for x in rep.satisfying:
        b = x >> 7
        assert b in (0, (1 << 21) - 1)


def test_slice_bounds():
    with pytest.raises(ValueError):
        verify_lemma("naive", slice_m=8)
    with pytest.raises(ValueError):
        verify_lemma("bogus")


def test_sharded_scan_matches_serial():
    a = verify_lemma("naive", parallelism=2, slice_m=5)
    b = verify_lemma("naive", parallelism=1, slice_m=5)
    assert a.satisfying == b.satisfying


def _relaxed_constraints(rng, k):
    masks, rhs = hypothesis_constraints()
    idx = np.sort(rng.choice(len(masks), size=k, replace=False))
    return masks[idx], rhs[idx]


@pytest.mark.skipif(kernels.compiled_scan_block is None, reason="compiled kernel not built")
@pytest.mark.parametrize("seed", range(6))
def test_compiled_kernel_matches_fallback(seed):
    rng = np.random.default_rng(seed)
    # fewer constraints keep many survivors, including conclusion failures
    masks, rhs = _relaxed_constraints(rng, int(rng.integers(5, 30)))
    fixed = int(rng.integers(0, 128))
    args = (masks, rhs, fiber_table(), fixed, 7, 1 << 14, 1 << 14)
    assert kernels.compiled_scan_block(*args) == kernels.fallback_scan_block(*args)


def test_fallback_kernel_on_one_shard():
    masks, rhs = hypothesis_constraints()
    n_sat, n_fail, found = kernels.fallback_scan_block(masks, rhs, fiber_table(), 0x7F, 7, 1 << 21, 1 << 16)
    assert (n_sat, n_fail) == (1, 0)
    assert found[0][0] == ALL_PLUS_A.bits


def test_fallback_finds_failures_when_unconstrained():
    masks, rhs = hypothesis_constraints()
    n_sat, n_fail, found = kernels.fallback_scan_block(masks[:0], rhs[:0], fiber_table(), 0, 7, 64, 64)
    assert n_sat == 64
    for x, w in found:
        assert (w < 0) == (conclusion_holds(SignAssignment(x)) is None)
        if w >= 0:
            assert w == conclusion_holds(SignAssignment(x))


def test_propagation_respects_fixed_bits():
    for m in range(8):
        sols = enumerate_homogeneous({k: int(k < m) for k in range(7)})
        assert len(sols) == 1 and sols[0] & 0x7F == slice_a_bits(m)


def test_report_json():
    doc = verify_lemma("reduced").to_json()
    assert set(doc) >= {"strategy", "total_scanned", "hypothesis_satisfying", "conclusion_failures", "representatives", "wall_time_ms"}
    assert doc["conclusion_failures"] == 0
    assert all(not r["failure"] for r in doc["representatives"])
    assert "wall_time_ms" not in verify_lemma("reduced").to_json(timing=False)


def test_from_signs_validation():
    with pytest.raises(ValueError):
        SignAssignment.from_signs([1] * 6)
    with pytest.raises(ValueError):
        SignAssignment.from_signs([1] * 7, [0] * 21)
    with pytest.raises(ValueError):
        SignAssignment(1 << 28)
    b = {p: 1 for p in itertools.combinations(range(1, 8), 2)}
    assert SignAssignment.from_signs([1] * 7, b).bits == FULL_MASK


def test_forced_fallback_backend():
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json; from amverify.signlemma import verify_lemma, BACKEND;"
        "r = verify_lemma('naive', slice_m=7);"
        "print(json.dumps([BACKEND, r.hypothesis_satisfying, r.conclusion_failures]))"
    )
    env = dict(os.environ, AMVERIFY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == ["numpy", 1, 0]
