import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzylie import topology as T
from fuzzylie.errors import CapacityError, DomainError
from fuzzylie.fuzzy_core import FiniteFuzzySet, fuzzy_intersection, fuzzy_union

PTS = ("a", "b")


def brute_is_topology(carrier, family, q):
    fam = set(family)
    for k in range(q + 1):
        c = Fraction(k, q)
        K = FiniteFuzzySet({s: min(c, carrier(s)) for s in carrier.universe}, carrier.universe)
        if K not in fam:
            return False
    # brute force over all subfamilies for unions, pairs for intersections
    members = list(fam)
    for r in range(1, len(members) + 1):
        for sub in itertools.combinations(members, r):
            U = sub[0]
            for V in sub[1:]:
                U = fuzzy_union(U, V)
            if U not in fam:
                return False
    return all(fuzzy_intersection(U, V) in fam for U, V in itertools.combinations(members, 2))


def test_indiscrete_and_power_families_are_topologies():
    gamma = FiniteFuzzySet.whole(("a", "b", "c"))
    assert T.is_fuzzy_topology(T.FuzzyTopSpace(gamma, T.indiscrete_family(gamma, 5), 5)).passed
    g2 = FiniteFuzzySet.whole(PTS)
    assert T.is_fuzzy_topology(T.FuzzyTopSpace(g2, T.power_family(g2, 3), 3)).passed


def test_missing_constant_is_reported():
    gamma = FiniteFuzzySet.whole(PTS)
    space = T.FuzzyTopSpace(gamma, [FiniteFuzzySet.empty(PTS), gamma], 2)
    rep = T.is_fuzzy_topology(space)
    assert not rep.passed
    assert rep.witness["axiom"] == "i" and rep.witness["kappa"] == Fraction(1, 2)


def test_missing_intersection_is_reported():
    gamma = FiniteFuzzySet.whole(PTS)
    U = FiniteFuzzySet({"a": 1, "b": "1/2"}, PTS)
    V = FiniteFuzzySet({"a": "1/2", "b": 1}, PTS)
    rep = T.is_fuzzy_topology(T.FuzzyTopSpace(gamma, [FiniteFuzzySet.empty(PTS), U, V, gamma], 1))
    assert not rep.passed and rep.witness["axiom"] == "iii"
    assert rep.witness["missing"] == FiniteFuzzySet.constant(PTS, "1/2")


def test_family_order_does_not_change_witness():
    pts = ("a", "b", "c")
    gamma = FiniteFuzzySet.whole(pts)
    fam = [FiniteFuzzySet.empty(pts), gamma, FiniteFuzzySet.crisp(pts, ["a"]), FiniteFuzzySet.crisp(pts, ["b"])]
    w1 = T.is_fuzzy_topology(T.FuzzyTopSpace(gamma, fam, 1)).witness
    w2 = T.is_fuzzy_topology(T.FuzzyTopSpace(gamma, fam[::-1], 1)).witness
    assert w1 == w2


def test_family_members_must_fit_the_carrier():
    gamma = FiniteFuzzySet.constant(PTS, "1/2")
    with pytest.raises(DomainError):
        T.FuzzyTopSpace(gamma, [FiniteFuzzySet.whole(PTS)], 2)
    with pytest.raises(DomainError):
        T.FuzzyTopSpace(gamma, [gamma, gamma], 2)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 15), max_size=8))
def test_axiom_checker_matches_brute_force(picks):
    gamma = FiniteFuzzySet.whole(PTS)
    pool = T.power_family(gamma, 3)
    fam = [pool[i] for i in sorted(picks)] + T.constant_family(gamma, 3)
    fam = list(dict.fromkeys(fam))
    rep = T.is_fuzzy_topology(T.FuzzyTopSpace(gamma, fam, 3))
    assert rep.passed == brute_is_topology(gamma, fam, 3)


def test_open_base():
    gamma = FiniteFuzzySet.whole(PTS)
    space = T.FuzzyTopSpace(gamma, T.power_family(gamma, 2), 2)
    assert T.is_open_base(space.family, space).passed
    # only constants cannot generate the crisp point {a}
    rep = T.is_open_base(T.constant_family(gamma, 2), space)
    assert not rep.passed and rep.witness["reason"] == "not representable"
    assert not T.is_open_base(space.family, space, strict=True).passed


def test_hausdorff():
    g2 = FiniteFuzzySet.whole(PTS)
    assert T.is_hausdorff(T.FuzzyTopSpace(g2, T.power_family(g2, 2), 2)).passed
    rep = T.is_hausdorff(T.FuzzyTopSpace(g2, T.indiscrete_family(g2, 2), 2))
    assert not rep.passed and {rep.witness["x"], rep.witness["y"]} == set(PTS)


def test_compactness():
    pts = ("a", "b", "c")
    gamma = FiniteFuzzySet.whole(pts)
    space = T.FuzzyTopSpace(gamma, T.indiscrete_family(gamma, 2), 2)
    rep = T.is_compact(space, Fraction(1, 4))
    assert rep.passed and rep.params["beta0_size"] == 1
    with pytest.raises(DomainError):
        T.is_compact(space, 0)
    big = T.FuzzyTopSpace(FiniteFuzzySet.whole(PTS), T.power_family(FiniteFuzzySet.whole(PTS), 4), 4)
    with pytest.raises(CapacityError):
        T.is_compact(big, Fraction(1, 2))


def test_separation_and_connectedness():
    g2 = FiniteFuzzySet.whole((0, 1))
    discrete = T.FuzzyTopSpace(g2, [FiniteFuzzySet.empty((0, 1)), FiniteFuzzySet.crisp((0, 1), [0]),
                                    FiniteFuzzySet.crisp((0, 1), [1]), g2], 1)
    sep = T.is_separated(g2, discrete)
    assert sep.passed
    assert fuzzy_union(sep.witness["v"], sep.witness["delta"]) == g2
    assert not T.is_connected(discrete).passed
    assert T.is_connected(T.FuzzyTopSpace(g2, [FiniteFuzzySet.empty((0, 1)), g2], 1)).passed


def test_proper_functions():
    pts = ("a", "b", "c")
    gamma = FiniteFuzzySet.whole(pts)
    half_a = FiniteFuzzySet({"a": "1/2", "b": 0, "c": 0}, pts)
    fam = T.indiscrete_family(gamma, 2) + [half_a]
    fam = list(dict.fromkeys(fam))
    space = T.FuzzyTopSpace(gamma, fam, 2)
    assert T.is_fuzzy_topology(space).passed
    swap = T.ProperFunction(space, space, {"a": "b", "b": "a", "c": "c"})
    rep = T.is_fuzzy_continuous(swap)
    assert not rep.passed
    assert rep.witness["preimage"] == FiniteFuzzySet({"a": 0, "b": "1/2", "c": 0}, pts)
    assert not T.is_fuzzy_homeomorphism(swap).passed
    const = T.ProperFunction(space, space, lambda x: "c")
    assert T.is_fuzzy_continuous(const).passed
    assert not T.is_fuzzy_homeomorphism(const).passed
    with pytest.raises(DomainError):
        T.ProperFunction(space, space, lambda x: "z")


def test_group_topologies():
    z3 = FiniteFuzzySet.whole([0, 1, 2])
    table = T.cyclic_group_table(3)
    assert T.is_compatible_group_topology(table, T.FuzzyTopSpace(z3, T.indiscrete_family(z3, 3), 3)).passed
    point = FiniteFuzzySet.crisp([0, 1, 2], [0])
    space = T.FuzzyTopSpace(z3, T.indiscrete_family(z3, 1) + [point], 1)
    assert T.is_fuzzy_topology(space).passed
    rep = T.is_compatible_group_topology(table, space)
    assert not rep.passed and rep.witness["map"] == "multiplication"
    with pytest.raises(DomainError):
        T.is_compatible_group_topology({(a, b): 0 for a in range(3) for b in range(3)}, space)


def test_space_round_trip():
    g2 = FiniteFuzzySet.whole(PTS)
    space = T.FuzzyTopSpace(g2, T.power_family(g2, 2), 2)
    back = T.FuzzyTopSpace.from_dict(space.to_dict())
    assert back.family == space.family and back.grid_q == 2
