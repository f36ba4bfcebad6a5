from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzylie import groups, lie
from fuzzylie.errors import DomainError

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
vec3 = st.tuples(rationals, rationals, rationals)

SL2 = {
    "H": np.array([[1, 0], [0, -1]]),
    "E": np.array([[0, 1], [0, 0]]),
    "F": np.array([[0, 0], [1, 0]]),
}
HEIS = {
    "X": np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]]),
    "Y": np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]]),
    "Z": np.array([[0, 0, 1], [0, 0, 0], [0, 0, 0]]),
}


def matrix_coords(M, basis):
    # least squares on the flattened realization; basis matrices are independent
    A = np.stack([b.ravel() for b in basis], axis=1).astype(float)
    coef, *_ = np.linalg.lstsq(A, M.ravel().astype(float), rcond=None)
    return coef


@pytest.mark.parametrize("name, realization", [("sl2", SL2), ("heisenberg", HEIS)])
def test_structure_constants_match_matrix_commutators(name, realization):
    L = lie.builtin(name)
    mats = [realization[lab] for lab in L.labels]
    for i in range(3):
        for j in range(3):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            got = lie.bracket(L, lie.basis_vector(L, i), lie.basis_vector(L, j))
            assert np.allclose([float(v) for v in got], matrix_coords(comm, mats))


@settings(max_examples=50)
@given(vec3, vec3)
def test_so3_bracket_is_cross_product(x, y):
    got = lie.bracket(lie.builtin("so3_cross"), x, y)
    want = (x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])
    assert got == want


@settings(max_examples=50)
@given(st.sampled_from(sorted(lie.BUILTINS)), vec3, vec3, vec3, rationals)
def test_bracket_laws(name, x, y, z, a):
    L = lie.builtin(name)
    br = lambda u, v: lie.bracket(L, u, v)
    add = lambda u, v: tuple(p + q for p, q in zip(u, v))
    assert br(x, y) == tuple(-v for v in br(y, x))
    jac = add(add(br(x, br(y, z)), br(y, br(z, x))), br(z, br(x, y)))
    assert all(v == 0 for v in jac)
    assert br(add(x, tuple(a * v for v in z)), y) == add(br(x, y), tuple(a * v for v in br(z, y)))


def test_bracket_keeps_exactness():
    L = lie.builtin("so3_cross")
    out = lie.bracket(L, (1, 0, 0), (1, 1, 1))
    assert all(isinstance(v, Fraction) for v in out)
    assert out == (0, -1, 1)
    assert all(isinstance(v, float) for v in lie.bracket(L, (1.0, 0, 0), (0, 1, 0)))


def test_jacobi_checker_and_serialization():
    for name in lie.BUILTINS:
        L = lie.builtin(name)
        assert lie.jacobi_check(L).passed
        assert lie.LieAlgebraSpec.from_dict(L.to_dict()) == L
    bad = lie.LieAlgebraSpec.from_brackets("bad", ("p", "q", "r"),
                                           {(0, 1): {1: 1}, (1, 2): {0: 1}})
    rep = lie.jacobi_check(bad)
    assert not rep.passed and rep.witness["axiom"] == "jacobi"
    with pytest.raises(DomainError):
        lie.builtin("so5")


def test_ad_matrix_columns():
    L = lie.builtin("heisenberg")
    M = lie.ad_matrix(L, (1, 0, 0))
    # ad X sends Y to Z and kills X, Z
    assert M.tolist() == [[0, 0, 0], [0, 0, 0], [0, 1, 0]]
    assert M.dtype == object


def _su2_matrix(q):
    w, x, y, z = q
    # quaternion w + x i + y j + z k as a 2x2 complex matrix
    return np.array([[w + 1j * z, y + 1j * x], [-y + 1j * x, w - 1j * z]])


def test_su2_exp_matches_matrix_series():
    rng = np.random.default_rng(3)
    pauli = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
    for _ in range(10):
        X = rng.normal(size=3)
        A = sum(-0.5j * x * s for x, s in zip(X, pauli))
        term, total = np.eye(2, dtype=complex), np.eye(2, dtype=complex)
        for m in range(1, 40):
            term = term @ A / m
            total = total + term
        q = groups.su2_exp(X).as_array()
        got = _su2_matrix(q)
        # the quaternion-to-matrix embedding is fixed up to conjugation; compare invariants
        assert np.isclose(np.trace(got), np.trace(total))
        assert np.isclose(q @ q, 1.0)
        # one-parameter subgroup: exp(sX) exp(tX) = exp((s + t) X)
        prod = groups.su2_mul(groups.su2_exp(0.3 * X), groups.su2_exp(0.7 * X)).as_array()
        assert np.allclose(prod, q)


def test_su2_Ad_is_conjugation():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = groups.su2_exp(rng.normal(size=3))
        q = g.as_array()
        R = groups.su2_Ad(g)
        for k in range(3):
            e = np.zeros(4)
            e[k + 1] = 0.5
            conj = groups.qmul(groups.qmul(q, e), groups.qconj(q))
            assert np.allclose(conj[1:] * 2, R[:, k])
        assert np.allclose(R @ R.T, np.eye(3))


def test_heisenberg_exp_and_Ad_exact():
    X = (Fraction(1, 3), Fraction(-2), Fraction(5, 7))
    N = [[0, X[0], X[2]], [0, 0, X[1]], [0, 0, 0]]
    N2 = [[sum(N[i][k] * N[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    want = [[int(i == j) + N[i][j] + N2[i][j] / 2 for j in range(3)] for i in range(3)]
    assert groups.heis_exp(X).matrix() == want
    g = groups.HeisenbergElement(Fraction(2), Fraction(-1, 2), Fraction(3))
    gi = groups.heis_inv(g)
    assert groups.heis_mul(g, gi) == groups.HEIS_IDENTITY
    Ad = groups.heis_Ad(g)
    for j, lab in enumerate("XYZ"):
        Gm = np.array(g.matrix(), dtype=object)
        C = Gm.dot(HEIS[lab].astype(object)).dot(np.array(gi.matrix(), dtype=object))
        coords = (C[0][1], C[1][2], C[0][2])
        assert coords == tuple(Ad[k][j] for k in range(3))


def test_exp_series_exact_and_remainder_bound():
    M = np.array([[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]], dtype=object)
    assert lie.exp_series(M, 5).tolist() == [[1, 1], [0, 1]]
    assert lie.series_remainder_bound(0, 5) == 0
    assert lie.series_remainder_bound(1.0, 20) < 1e-17
    with pytest.raises(DomainError):
        lie.exp_series(M, 0)


def test_exp_ad_checks():
    so3 = lie.builtin("so3_cross")
    rep = lie.exp_ad_check(so3, (0.3, -0.2, 0.8))
    assert rep.passed and rep.max_error <= 1e-10
    rep = lie.exp_ad_sweep_check(so3, samples=30)
    assert rep.passed and rep.max_error <= 1e-10
    rep = lie.exp_ad_sweep_check(lie.builtin("heisenberg"), samples=30, trunc=3, tol=0)
    assert rep.passed and rep.max_error == 0
    # a too-short series on a rotation is a genuine failure
    assert not lie.exp_ad_check(so3, (0.9, 0.1, 0.2), trunc=3).passed


def test_group_model_lookup():
    assert lie.group_model(lie.builtin("so3_cross")) is groups.SU2Model
    with pytest.raises(DomainError):
        lie.group_model(lie.builtin("sl2"))
    with pytest.raises(DomainError):
        groups.get_model("so5")
