import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzylie import spherical as S
from fuzzylie.errors import DomainError
from fuzzylie.groups import height, qmul

rng_seeds = st.integers(0, 2**32 - 1)


def test_legendre_matches_numpy():
    u = np.linspace(-1, 1, 41)
    for l in range(12):
        coeffs = np.zeros(l + 1)
        coeffs[l] = 1
        assert np.allclose(S.legendre(l, u), np.polynomial.legendre.legval(u, coeffs))
    with pytest.raises(DomainError):
        S.legendre(-1, u)


def test_zonal_normalization_and_cap():
    for l in range(S.LMAX_CAP + 1):
        assert S.zonal(l, np.array([1.0, 0, 0, 0])) == 1.0
    with pytest.raises(DomainError):
        S.zonal(S.LMAX_CAP + 1)


def test_height_is_last_coordinate_of_the_coset_point():
    rng = np.random.default_rng(0)
    q = S.haar_samples(50, rng)
    p = S.coset_project(q)
    assert np.allclose(np.linalg.norm(p, axis=-1), 1)
    assert np.allclose(p[:, 2], height(q))


def test_haar_samples_moments():
    q = S.haar_samples(200_000, np.random.default_rng(1))
    # uniform on the 3-sphere: E[w^2] = 1/4; height uniform on [-1, 1]: E[h^2] = 1/3
    assert np.mean(q[:, 0] ** 2) == pytest.approx(0.25, abs=5e-3)
    assert np.mean(height(q) ** 2) == pytest.approx(1 / 3, abs=5e-3)


def test_quadrature_integrates_polynomials_exactly():
    quad = S.EulerQuadrature(8, 8, 8)
    assert np.sum(quad.weights) == pytest.approx(1.0, abs=1e-14)
    assert S.haar_integral(lambda q: q[..., 0] ** 2, quad) == pytest.approx(0.25, abs=1e-13)
    assert S.haar_integral(lambda q: q[..., 1] * q[..., 2], quad) == pytest.approx(0.0, abs=1e-13)
    for l in range(5):
        for m in range(5):
            want = 1 / (2 * l + 1) if l == m else 0.0
            prod = S.HeightFunction(lambda u, l=l, m=m: S.legendre(l, u) * S.legendre(m, u))
            assert S.haar_integral(prod, quad) == pytest.approx(want, abs=1e-13)
            # the generic path agrees with the polar shortcut
            assert S.haar_integral(lambda q, p=prod: p(q), quad) == pytest.approx(want, abs=1e-13)


def test_circle_quadrature_integrates_trig():
    quad = S.CircleQuadrature(16)
    assert np.sum(quad.weights) == pytest.approx(1.0)
    assert np.dot(quad.weights, np.cos(3 * quad.angles) ** 2) == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 8), rng_seeds)
def test_zonals_are_bi_invariant(l, seed):
    rng = np.random.default_rng(seed)
    g = S.haar_samples(5, rng)
    k1, k2 = S.circle_element(rng.uniform(0, 4 * np.pi, size=(2, 5)))
    moved = qmul(qmul(k1, g), k2)
    assert np.allclose(S.zonal(l)(moved), S.zonal(l)(g), atol=1e-12)


def test_functional_equation():
    quad = S.CircleQuadrature(64)
    for l in range(9):
        rep = S.functional_equation_residual(S.zonal(l), quad=quad, n_pairs=50)
        assert rep.passed and rep.max_error <= 1e-10
    rep = S.functional_equation_residual(S.HeightFunction(lambda u: u ** 2, "h^2"), quad=quad, n_pairs=50)
    assert not rep.passed and rep.max_error > 1e-2
    assert set(rep.witness) == {"x", "y", "average", "product"}


def test_convolution_of_zonals_is_orthogonal_projection():
    quad = S.EulerQuadrature(16, 16, 16)
    g = S.haar_samples(6, np.random.default_rng(4))
    for l in range(4):
        for m in range(4):
            want = S.legendre(l, height(g)) / (2 * l + 1) if l == m else np.zeros(6)
            fast = S.haar_convolve(S.zonal(l), S.zonal(m), quad)
            assert np.allclose(fast(g), want, atol=1e-10)
            # general path: f given as a plain callable
            slow = S.Convolution(lambda q, l=l: S.zonal(l)(q), S.zonal(m), quad)
            assert np.allclose(slow(g), want, atol=1e-10)


def test_spherical_transform_of_zonals():
    quad = S.EulerQuadrature(8, 8, 8)
    assert S.spherical_transform(S.zonal(3), 3, quad) == pytest.approx(1 / 7, abs=1e-13)
    assert S.spherical_transform(S.zonal(3), 2, quad) == pytest.approx(0, abs=1e-13)


def test_gelfand_check_resolution_improves():
    errs = []
    for n in (8, 16, 32):
        rep = S.gelfand_homomorphism_check(lmax=4, quads=[S.EulerQuadrature(n, n, n)], comm_points=5)
        errs.append(rep.max_error)
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-6


def test_casimir_ratios():
    for l in (1, 2, 5):
        rep = S.casimir_eigen_ratio(l, n_points=8)
        assert rep.passed
        assert rep.params["ratio"] == pytest.approx(l * (l + 1) / 2, abs=1e-3)
    with pytest.raises(DomainError):
        S.casimir_eigen_ratio(7)


def test_gate_branches_and_domain():
    for label, f, t1, t2, expected in S.gate_fixtures():
        x, y = S.haar_samples(2, np.random.default_rng(9))
        res = S.spherical_gate(f, x, y, t1, t2, n_samples=2000)
        assert res.branch == expected, label
        if expected == "product":
            assert res.value == pytest.approx(float(f(x)) * float(f(y)))
        else:
            assert res.value == 0.0 and res.gate_witness is not None
    x, y = S.haar_samples(2, np.random.default_rng(9))
    with pytest.raises(DomainError):
        S.spherical_gate(S.HeightFunction(lambda u: 2 + u), x, y, 0.2, 0.8, n_samples=100)
    with pytest.raises(DomainError):
        S.spherical_gate(S.zonal(0), x, y, 0.8, 0.2, n_samples=100)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.01, 0.99), min_size=2, max_size=4, unique=True))
def test_tcuts_nested(thresholds):
    f = S.HeightFunction(lambda u: (1 + u) / 2)
    rep = S.tcut_nesting_check(f, tuple(sorted(thresholds)), n=2000)
    assert rep.passed
    sizes = rep.params["sizes"]
    assert sizes == sorted(sizes, reverse=True)
