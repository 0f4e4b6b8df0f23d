import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amverify import amcycles
from amverify.amcycles import (
    NODES,
    TorsionedCycle,
    anticanonical_degree,
    build_am_relation_system,
    named_class,
    solve_report,
    t,
)
from amverify.gf2 import solve_gf2, truth_table_count, truth_table_implied
from amverify.lattice import amx_curves

CURVES = amx_curves()
curve_vec = st.lists(st.integers(-1000, 1000), min_size=11, max_size=11).map(CURVES.vector)


def test_named_classes():
    ell = CURVES.basis_vector("l")
    e = {i: CURVES.basis_vector(f"e{i}") for i in NODES}
    assert named_class("l_3") == ell - e[3]
    assert named_class("l_{1,2}") == ell - e[1] - e[2]
    assert named_class("ℓ̃_{1,2}") == named_class("l_{2,1}")
    assert named_class("e_10") == e[10]
    for bad in ("l_11", "e", "l_{3,3}", "x_1", "e_{1,2}"):
        with pytest.raises(ValueError):
            named_class(bad)


def test_anticanonical_degrees():
    assert anticanonical_degree(named_class("l")) == 2
    assert all(anticanonical_degree(named_class(f"e_{i}")) == 1 for i in NODES)
    assert all(anticanonical_degree(named_class(f"l_{i}")) == 1 for i in NODES)
    for i, j in itertools.permutations(NODES, 2):
        assert anticanonical_degree(named_class(f"l_{{{i},{j}}}")) == 0


@given(curve_vec, curve_vec)
def test_degree_is_linear(c1, c2):
    assert anticanonical_degree(c1 + c2) == anticanonical_degree(c1) + anticanonical_degree(c2)


def test_torsioned_cycles():
    e1 = named_class("e_1")
    plus, minus = TorsionedCycle(e1, 0), TorsionedCycle(e1, 1)
    assert plus.numerically_equal(minus)
    assert not plus.algebraically_equal(minus)
    assert (plus + minus).torsion == 1
    with pytest.raises(ValueError):
        TorsionedCycle(e1, 2)


def test_single_pair_core_system():
    s = build_am_relation_system([(1, 2)], conjugates=False, decompositions=False)
    assert len(s.equations) == 3
    assert len(s.unknowns) == 5


def test_full_system_is_consistent_and_forces_conclusions():
    s = build_am_relation_system()
    sol = solve_gf2(s)
    assert sol.consistent
    for j in NODES:
        assert sol.implied(s.row([t(f"e_{j}", "+"), t(f"e_{j}", "-")])) == 1
    for i, j in itertools.combinations(NODES, 2):
        sym = f"l_{{{i},{j}}}"
        assert sol.implied(s.row([t(sym, "+"), t(sym, "-")])) == 1
    assert sol.implied(s.row([t("l", "+"), t("l", "-")])) == 1


def test_without_conjugates_l_ij_is_not_forced():
    s = build_am_relation_system(conjugates=False)
    sol = solve_gf2(s)
    assert sol.consistent
    assert sol.implied(s.row([t("e_1", "+"), t("e_1", "-")])) == 1
    assert sol.implied(s.row([t("l_{1,2}", "+"), t("l_{1,2}", "-")])) is None


def test_every_equation_uses_declared_unknowns_and_has_provenance():
    s = build_am_relation_system()
    declared = set(s.unknowns)
    for eq in s.equations:
        assert set(eq.terms) <= declared
        assert eq.provenance


def test_bad_pairs_rejected():
    with pytest.raises(ValueError):
        build_am_relation_system([(1, 1)])
    with pytest.raises(ValueError):
        build_am_relation_system([(0, 2)])


@pytest.mark.parametrize(
    "pairs,kw",
    [
        ([(1, 2)], {"conjugates": False, "decompositions": False}),
        ([(1, 2), (2, 1)], {}),
        ([(1, 2), (1, 3)], {"decompositions": False}),
        ([(1, 2), (3, 4)], {"conjugates": False}),
    ],
)
def test_subsystems_against_truth_table(pairs, kw):
    s = build_am_relation_system(pairs, **kw)
    assert len(s.unknowns) <= 20
    sol = solve_gf2(s)
    assert sol.n_solutions == truth_table_count(s)
    for _, plus, minus in amcycles.conjugate_pairs(s):
        assert sol.implied(s.row([plus, minus])) == truth_table_implied(s, [plus, minus])


def test_forced_consequences_hold_for_particular_solution():
    s = build_am_relation_system()
    sol = solve_gf2(s)
    for f in amcycles.forced_consequences(s, sol):
        assert sol.satisfies(sol.particular, s.row(f["terms"]), f["rhs"])


def test_solve_report():
    doc = solve_report(build_am_relation_system())
    assert doc["consistent"] and doc["n_unknowns"] == 132 and doc["rank"] == 121
    assert {"terms": [t("e_3", "+"), t("e_3", "-")], "rhs": 1} in doc["forced"]
