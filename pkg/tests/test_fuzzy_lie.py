import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzylie import fuzzy_lie as FL
from fuzzylie.errors import DomainError
from fuzzylie.fuzzy_core import SampledFuzzySet
from fuzzylie.lie import bracket, builtin

GRID = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, -1, 2), (2, 0, 0)]


def test_example_subalgebra_but_not_ideal():
    F = FL.example_2_2()
    assert FL.is_fuzzy_subspace(F).passed
    assert FL.is_fuzzy_subalgebra(F).passed
    rep = FL.is_fuzzy_ideal(F)
    assert not rep.passed
    w = rep.witness
    assert w.kind == "ideal-bracket"
    assert w.points == {"s": (1, 0, 0), "t": (1, 1, 1), "[s,t]": (0, -1, 1)}
    assert w.lhs == 0 and w.rhs == Fraction(1, 2)
    assert isinstance(w.lhs, Fraction) and isinstance(w.rhs, Fraction)
    # the bracket really is the cross product of the witness points
    assert bracket(builtin("so3_cross"), w.points["s"], w.points["t"]) == w.points["[s,t]"]


def test_example_membership_values():
    F = FL.example_2_2()
    assert F((0, 0, 0)) == 1
    assert F((5, 0, 0)) == Fraction(1, 2) and F((-3, 0, 0)) == Fraction(1, 2)
    assert F((1, 1, 1)) == 0 and F((0, 0, 2)) == 0


def test_grid_closed_under_negation_and_scalars_completed():
    F = FL.FuzzyLieSet("heisenberg", SampledFuzzySet(3, lambda s: 1, [(1, 2, 3)]), scalars=(2,))
    assert (-1, -2, -3) in F.grid
    assert set(F.scalars) >= {0, 1, -1, 2}


def test_rule_validation():
    with pytest.raises(DomainError):
        FL.PiecewiseRule([("0x0", 1)])
    with pytest.raises(DomainError):
        FL.PiecewiseRule([("00", 1), ("000", 1)])
    with pytest.raises(DomainError):
        FL.PiecewiseRule([("000", 2)])
    rule = FL.PiecewiseRule([("0*", "1/3")])
    assert rule((0, 5)) == Fraction(1, 3) and rule((1, 0)) == 0
    with pytest.raises(DomainError):
        rule((0, 0, 0))


def test_bracket_failure_of_subalgebra():
    # 1 on span{e1}, 3/5 on span{e1, e2}: [e1, e2] = e3 falls to 0
    rule = FL.PiecewiseRule([("000", 1), ("n00", 1), ("*n0", Fraction(3, 5))])
    F = FL.FuzzyLieSet("so3_cross", SampledFuzzySet(3, rule, GRID))
    assert FL.is_fuzzy_subspace(F).passed
    rep = FL.is_fuzzy_subalgebra(F)
    assert not rep.passed and rep.witness.kind == "bracket"
    assert rep.witness.rhs == Fraction(3, 5) and rep.witness.lhs == 0


def test_subspace_failure():
    # membership 1 on two axes but 0 on their sum
    rule = FL.PiecewiseRule([("000", 1), ("n00", 1), ("0n0", 1)])
    rep = FL.is_fuzzy_subspace(FL.FuzzyLieSet("sl2", SampledFuzzySet(3, rule, GRID)))
    assert not rep.passed and rep.witness.kind == "sum"
    assert rep.witness.lhs == 0 and rep.witness.rhs == 1


def test_heisenberg_center_is_ideal():
    F = FL.FuzzyLieSet("heisenberg", SampledFuzzySet(3, FL.PiecewiseRule([("00*", 1)]), GRID), (0, 1, -1, 3))
    assert FL.is_fuzzy_ideal(F).passed


patterns = st.text(alphabet="0n*", min_size=3, max_size=3)
levels = st.fractions(min_value=0, max_value=1, max_denominator=4)
rules = st.lists(st.tuples(patterns, levels), min_size=1, max_size=4).map(FL.PiecewiseRule)


def brute_subspace(F):
    pts, U = F.grid, F.U
    ok_sum = all(U(tuple(a + b for a, b in zip(s, t))) >= min(U(s), U(t)) for s in pts for t in pts)
    ok_scal = all(U(tuple(a * v for v in s)) >= U(s) for a in F.scalars for s in pts)
    return ok_sum and ok_scal


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["so3_cross", "sl2", "heisenberg"]), rules)
def test_checkers_against_oracles(name, rule):
    F = FL.FuzzyLieSet(name, SampledFuzzySet(3, rule, GRID))
    sub = FL.is_fuzzy_subspace(F)
    assert sub.passed == brute_subspace(F)
    alg = FL.is_fuzzy_subalgebra(F)
    ideal = FL.is_fuzzy_ideal(F)
    if ideal.passed:
        assert alg.passed
    if alg.passed:
        assert sub.passed
    for rep in (sub, alg, ideal):
        if not rep.passed:
            assert rep.witness.lhs < rep.witness.rhs


def test_json_loading():
    data = {"algebra": "so3_cross", "rule": [{"pattern": "000", "value": 1}, {"pattern": "n00", "value": "1/2"}],
            "grid": [[0, 0, 0], [1, 0, 0], [1, 1, 1], [0, 1, 0], [0, 0, 1]], "scalars": ["2"]}
    F = FL.from_json(json.dumps(data))
    assert FL.is_fuzzy_subalgebra(F).passed
    assert not FL.is_fuzzy_ideal(F).passed
    with pytest.raises(DomainError):
        FL.from_dict({**data, "extra": 1})
    with pytest.raises(DomainError):
        FL.from_dict({"algebra": "sl2"})
