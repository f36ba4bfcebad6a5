"""Acceptance gate: one test per criterion, each with its own runtime limit.

A summary line per criterion is printed at the end of the pytest run.
"""

import json

from fuzzylie import cli, enveloping, lie, spherical, topology
from fuzzylie.fuzzy_core import FiniteFuzzySet
from fuzzylie.groups import HeisenbergModel, SU2Model

ALGEBRAS = ("so3_cross", "sl2", "heisenberg")


def _passed(rep, tol=None):
    assert rep.status == "pass", rep.to_dict()
    if tol is not None and rep.max_error is not None:
        assert rep.max_error <= tol, rep.to_dict()


def test_01_cross_product_example(criterion, capsys):
    with criterion(1, "cross-product example: subalgebra pass, ideal expected-fail with exact witness", 1) as c:
        code = cli.main(["check", "example-2-2", "--no-timing"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        sub, ideal = out
        assert sub["name"] == "fuzzy_lie.subalgebra" and sub["status"] == "pass"
        assert ideal["name"] == "fuzzy_lie.ideal[expected-fail]"
        assert ideal["params"]["observed_status"] == "fail"
        w = ideal["witness"]
        assert w["points"] == {"s": ["1", "0", "0"], "t": ["1", "1", "1"], "[s,t]": ["0", "-1", "1"]}
        assert w["lhs"] == "0" and w["rhs"] == "1/2" and w["U(s)"] == "1/2"
        c.note("witness s=(1,0,0) t=(1,1,1) [s,t]=(0,-1,1), 0 < 1/2")


def test_02_pbw_confluence(criterion):
    with criterion(2, "PBW confluence, 1000 words of degree <= 5 per algebra, exact", 10) as c:
        for name in ALGEBRAS:
            rep = enveloping.pbw_confluence_check(lie.builtin(name), trials=1000, max_degree=5, seed=42)
            _passed(rep, 0)
        c.note("3 algebras, identical normal forms")


def test_03_symmetrization_bijection(criterion):
    with criterion(3, "symmetrization unitriangular and invertible up to degree 4", 10) as c:
        for name in ALGEBRAS:
            rep = enveloping.bijectivity_check(lie.builtin(name), max_degree=4)
            _passed(rep, 0)
            assert rep.params["basis_size"] == 35 and rep.params["determinant"] == 1
        c.note("basis 35, det 1")


def test_04_adjoint_vs_exp_ad(criterion):
    with criterion(4, "Ad(exp X) vs exp(ad X): vectors 1e-10, operators 1e-9, heisenberg exact", 10) as c:
        rep = lie.exp_ad_sweep_check(lie.builtin("so3_cross"), samples=100, trunc=20, tol=1e-10, seed=42)
        _passed(rep, 1e-10)
        c.note(f"vector {rep.max_error:.1e}")
        rep = lie.exp_ad_sweep_check(lie.builtin("heisenberg"), samples=100, trunc=3, tol=0, seed=42)
        _passed(rep, 0)
        rep = enveloping.operator_ad_check("su2", samples=100, max_degree=3, tol=1e-9, seed=42)
        _passed(rep, 1e-9)
        c.note(f"operator {rep.max_error:.1e}")
        rep = enveloping.operator_ad_check("heisenberg", samples=100, max_degree=3, tol=0, seed=42)
        _passed(rep, 0)
        assert rep.params["exact"]


def test_05_automorphism_and_derivation(criterion):
    with criterion(5, "exp(ad X) multiplicative (su2 1e-8, heisenberg exact), ad a derivation", 10) as c:
        rep = enveloping.automorphism_check("so3_cross", samples=20, max_degree=3, tol=1e-8, seed=42)
        _passed(rep, 1e-8)
        c.note(f"su2 {rep.max_error:.1e}")
        rep = enveloping.automorphism_check("heisenberg", samples=20, max_degree=3, tol=0, seed=42)
        _passed(rep, 0)
        for name in ALGEBRAS:
            _passed(enveloping.derivation_check(name, samples=50, max_degree=3, seed=42), 0)


def test_06_symmetrized_operator_consistency(criterion):
    with criterion(6, "polynomial operator vs symmetrized word within 1e-5; pinned value -1/4", 30) as c:
        for model in ("su2", "heisenberg"):
            rep = enveloping.eq3_consistency_check(model, trials=50, max_degree=2, tol=1e-5, seed=42)
            _passed(rep, 1e-5)
            c.note(f"{model} {rep.max_error:.1e}")
        rep = enveloping.pinned_value_check(tol=1e-5)
        _passed(rep, 1e-5)
        assert abs(rep.params["eq3"] + 0.25) <= 1e-5


def test_07_functional_equation(criterion):
    with criterion(7, "functional equation for zonal l <= 8 at 1e-10; h^2 control fails", 5) as c:
        quad = spherical.CircleQuadrature(64)
        worst = 0.0
        for l in range(9):
            rep = spherical.functional_equation_residual(spherical.zonal(l), quad=quad, tol=1e-10,
                                                         n_pairs=200, seed=42)
            _passed(rep, 1e-10)
            worst = max(worst, rep.max_error)
        control = spherical.HeightFunction(lambda u: u ** 2, label="h^2")
        rep = spherical.functional_equation_residual(control, quad=quad, tol=1e-10, n_pairs=200, seed=42)
        assert rep.status == "fail" and rep.max_error > 1e-2
        w = rep.witness
        assert abs(w["average"] - w["product"]) > 1e-2
        c.note(f"zonal {worst:.1e}, control {rep.max_error:.2f}")


def test_08_gelfand_homomorphism(criterion):
    with criterion(8, "transform of a convolution is the product at 32^3 nodes; convolution commutes", 60) as c:
        rep = spherical.gelfand_homomorphism_check(lmax=8, quads=[spherical.EulerQuadrature(32, 32, 32)],
                                                   tol=1e-6, comm_tol=1e-8, comm_points=20, seed=42)
        _passed(rep, 1e-6)
        assert rep.params["commutator_max"] <= 1e-8
        c.note(f"rel {rep.max_error:.1e}, commutator {rep.params['commutator_max']:.1e}")


def test_09_spherical_conditions(criterion):
    with criterion(9, "zonal(l, e) = 1, bi-invariance 1e-12, Casimir ratios l(l+1)/2 within 1e-3", 30) as c:
        _passed(spherical.normalization_check(8), 0)
        for l in range(9):
            _passed(spherical.bi_invariance_check(spherical.zonal(l), seed=42), 1e-12)
        for l in range(1, 7):
            rep = spherical.casimir_eigen_ratio(l, n_points=20, tol=1e-3, seed=42)
            _passed(rep, 1e-3)
            assert abs(rep.params["ratio"] - l * (l + 1) / 2) <= 1e-3
            assert rep.params["stddev"] <= 1e-3 * abs(rep.params["eigenvalue"])
        c.note("l = 1..6")


def test_10_vector_field_bracket(criterion):
    with criterion(10, "commutator of invariant fields is the bracket field within 1e-4; parallel case exact", 10) as c:
        g_su2 = SU2Model.exp([0.3, -0.7, 1.1])
        g_heis = HeisenbergModel.exp([0.3, 0.2, -0.4])
        rep = enveloping.vector_field_bracket_check("su2", (1, 0, 0), (0, 1, 0), lambda q: q.w, g_su2,
                                                    step=1e-4, tol=1e-4)
        _passed(rep, 1e-4)
        rep = enveloping.vector_field_bracket_check("heisenberg", (1, 0, 0), (0, 1, 0),
                                                    lambda e: float(e.c), g_heis, step=1e-4, tol=1e-4)
        _passed(rep, 1e-4)
        for model, g, f in (("su2", g_su2, lambda q: q.w), ("heisenberg", g_heis, lambda e: float(e.a * e.b))):
            rep = enveloping.vector_field_bracket_check(model, (1, 2, 0), (2, 4, 0), f, g, step=1e-4, tol=1e-4)
            _passed(rep, 1e-4)
            assert rep.params["parallel_exact_zero"] is True
        c.note("both models, Y = 2X exact zero")


def test_11_gate_and_tcuts(criterion):
    with criterion(11, "gate branches on three fixtures; t-cuts nested on 1e4 samples", 5) as c:
        rep = spherical.gate_check(n_samples=10000, seed=42)
        _passed(rep)
        branches = {f["fixture"]: f["branch"] for f in rep.params["fixtures"]}
        assert branches == {"constant": "product", "affine": "zero", "step": "product"}
        affine = spherical.HeightFunction(lambda u: (1 + u) / 2, label="(1+h)/2")
        rep = spherical.tcut_nesting_check(affine, (0.25, 0.5, 0.75), n=10000, seed=42)
        _passed(rep, 0)
        sizes = rep.params["sizes"]
        assert sizes[0] >= sizes[1] >= sizes[2]
        c.note(f"sizes {sizes}")


def test_12_fuzzy_topology(criterion):
    with criterion(12, "indiscrete family is a topology; missing union caught; Z/3 compatible", 5) as c:
        pts = ("a", "b", "c")
        gamma = FiniteFuzzySet.whole(pts)
        space = topology.FuzzyTopSpace(gamma, topology.indiscrete_family(gamma, 4), 4)
        _passed(topology.is_fuzzy_topology(space))
        a, b = FiniteFuzzySet.crisp(pts, ["a"]), FiniteFuzzySet.crisp(pts, ["b"])
        broken = topology.FuzzyTopSpace(gamma, [FiniteFuzzySet.empty(pts), gamma, a, b], 1)
        rep = topology.is_fuzzy_topology(broken)
        assert rep.status == "fail"
        assert rep.witness["axiom"] == "ii"
        assert set(rep.witness["pair"]) == {a, b}
        assert rep.witness["missing"] == FiniteFuzzySet.crisp(pts, ["a", "b"])
        z3 = FiniteFuzzySet.whole([0, 1, 2])
        space3 = topology.FuzzyTopSpace(z3, topology.indiscrete_family(z3, 4), 4)
        _passed(topology.is_compatible_group_topology(topology.cyclic_group_table(3), space3))
        c.note("witness axiom ii, missing {a, b}")
