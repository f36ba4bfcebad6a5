"""Harmonic analysis on SU(2) with the diagonal circle subgroup.

Group points are unit quaternions ``(w, x, y, z)``; in the 2x2 picture
``a = w + iz`` and ``b = y + ix``. The circle subgroup is
``k(theta) = (cos theta, 0, 0, sin theta)`` and the coset space is the
sphere, reached by rotating the north pole. The invariant of a coset
pair is the height ``h(g) = w^2 + z^2 - x^2 - y^2 = |a|^2 - |b|^2``.

Functions on the group are vectorized: they take an array of shape
``(m, 4)`` and return shape ``(m,)``. ``SU2Element`` inputs are accepted
wherever a single point is expected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import enveloping
from .errors import DomainError
from .fuzzy_core import SampledFuzzySet, t_cut
from .groups import (SU2_IDENTITY, SU2Element, height, normalize, qconj, qexp, qmul, rotation_matrix,
                     su2_exp, su2_inv, su2_mul)
from .lie import builtin
from .report import CheckReport, checker, report

__all__ = [
    "SU2Element", "SU2_IDENTITY", "su2_mul", "su2_inv", "su2_exp", "coset_project", "coset_translate",
    "height", "legendre", "zonal", "HeightFunction", "CircleQuadrature", "EulerQuadrature",
    "k_average", "functional_equation_residual", "bi_invariance_check", "haar_convolve",
    "haar_integral", "spherical_transform", "gelfand_homomorphism_check", "casimir_eigen_ratio",
    "GateResult", "spherical_gate", "gate_check", "tcut_nesting_check", "normalization_check",
    "haar_samples", "circle_element",
]

DEFAULT_SEED = 42
LMAX_CAP = 32


def _quats(g) -> np.ndarray:
    q = np.asarray(g, dtype=float)
    return q[None, :] if q.ndim == 1 else q


def coset_project(g) -> np.ndarray:
    """Image of the north pole under ``g``; its last coordinate is the height."""
    return rotation_matrix(np.asarray(g, dtype=float))[..., :, 2]


def coset_translate(g: SU2Element, x: SU2Element) -> SU2Element:
    """Left translation ``x K -> g x K`` on coset representatives."""
    return su2_mul(g, x)


def haar_samples(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random unit quaternions (uniform on the 3-sphere)."""
    return normalize(rng.normal(size=(n, 4)))


def circle_element(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    zero = np.zeros_like(theta)
    return np.stack([np.cos(theta), zero, zero, np.sin(theta)], axis=-1)


# -- zonal functions -----------------------------------------------------

def legendre(l: int, u) -> np.ndarray:
    """``P_l(u)`` by the three-term recurrence."""
    u = np.asarray(u, dtype=float)
    if l < 0:
        raise DomainError("degree must be non-negative")
    p0, p1 = np.ones_like(u), u
    if l == 0:
        return p0
    for n in range(1, l):
        p0, p1 = p1, ((2 * n + 1) * u * p1 - n * p0) / (n + 1)
    return p1


class HeightFunction:
    """A bi-invariant function ``g -> profile(h(g))``.

    The profile is vectorized over heights in ``[-1, 1]``. Knowing the
    function only depends on the height lets convolutions and Haar
    integrals collapse onto the polar angle.
    """

    def __init__(self, profile: Callable[[np.ndarray], np.ndarray], label: str = "f"):
        self.profile = profile
        self.label = label

    def __call__(self, g):
        q = np.asarray(g, dtype=float)
        return self.profile(np.clip(height(q), -1.0, 1.0))

    def __repr__(self):
        return f"HeightFunction({self.label})"


def zonal(l: int, g=None):
    """``P_l(h(g))``; without ``g`` returns the function itself."""
    if not 0 <= l <= LMAX_CAP:
        raise DomainError(f"zonal degree must lie in [0, {LMAX_CAP}]")
    f = HeightFunction(lambda u: legendre(l, u), label=f"zonal({l})")
    if g is None:
        return f
    val = f(g)
    return float(val) if np.ndim(val) == 0 else val


def _scalar(f: Callable, g) -> float:
    return float(np.asarray(f(_quats(g))).reshape(-1)[0])


# -- quadrature rules ----------------------------------------------------

class CircleQuadrature:
    """Equal weights on ``theta_j = 2 pi j / N``; exact for trig polynomials of degree < N."""

    def __init__(self, node_count: int = 64):
        if node_count < 1:
            raise DomainError("a circle rule needs at least one node")
        self.node_count = node_count
        self.angles = 2 * np.pi * np.arange(node_count) / node_count
        self.weights = np.full(node_count, 1.0 / node_count)
        self.nodes = circle_element(self.angles)

    def __repr__(self):
        return f"CircleQuadrature({self.node_count})"


class EulerQuadrature:
    """Normalized Haar measure as a product rule in Euler angles.

    ``g = exp(alpha e3) exp(beta e2) exp(gamma e3)`` (quaternion half-angle
    convention) with ``alpha`` in ``[0, 2 pi)``, ``gamma`` in ``[0, 4 pi)``,
    both uniform, and ``cos beta`` on Gauss-Legendre nodes.
    """

    def __init__(self, n_alpha: int = 32, n_beta: int = 32, n_gamma: int = 32):
        if min(n_alpha, n_beta, n_gamma) < 1:
            raise DomainError("node counts must be positive")
        self.counts = (n_alpha, n_beta, n_gamma)
        u, wu = np.polynomial.legendre.leggauss(n_beta)
        self.beta = np.arccos(u)
        self.beta_weights = wu / 2
        self.alpha = 2 * np.pi * np.arange(n_alpha) / n_alpha
        self.gamma = 4 * np.pi * np.arange(n_gamma) / n_gamma
        A, B, G = np.meshgrid(self.alpha, self.beta, self.gamma, indexing="ij")
        W = np.broadcast_to(self.beta_weights[None, :, None], A.shape) / (n_alpha * n_gamma)
        self.nodes = euler_to_quat(A.ravel(), B.ravel(), G.ravel())
        self.weights = W.ravel().copy()
        # alpha = gamma = 0 representatives, for integrands that only see beta
        self.polar_nodes = euler_to_quat(np.zeros(n_beta), self.beta, np.zeros(n_beta))

    def __len__(self):
        return len(self.weights)

    def halved(self) -> "EulerQuadrature":
        return EulerQuadrature(*(max(1, n // 2) for n in self.counts))

    def __repr__(self):
        return f"EulerQuadrature{self.counts}"


def euler_to_quat(alpha, beta, gamma) -> np.ndarray:
    alpha, beta, gamma = (np.asarray(v, dtype=float) for v in (alpha, beta, gamma))
    e2 = np.array([0.0, 1.0, 0.0])
    e3 = np.array([0.0, 0.0, 1.0])
    return qmul(qmul(qexp(alpha[..., None] * e3), qexp(beta[..., None] * e2)), qexp(gamma[..., None] * e3))


def haar_integral(f: Callable, quad: EulerQuadrature) -> float:
    """``int f(g) dg``; height functions use the polar nodes only (same value)."""
    if isinstance(f, HeightFunction):
        return float(np.dot(quad.beta_weights, f(quad.polar_nodes)))
    return float(np.dot(quad.weights, f(quad.nodes)))


# -- spherical-function checks -------------------------------------------

def k_average(f: Callable, x, y, quad: CircleQuadrature) -> float | np.ndarray:
    """``sum_j w_j f(x k(theta_j) y)``; vectorized over stacked ``x``, ``y``."""
    xq, yq = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    single = xq.ndim == 1 and yq.ndim == 1
    xq, yq = _quats(xq), _quats(yq)
    pts = qmul(qmul(xq[:, None, :], quad.nodes[None, :, :]), yq[:, None, :])
    vals = np.asarray(f(pts.reshape(-1, 4)), dtype=float).reshape(pts.shape[:2])
    out = vals @ quad.weights
    return float(out[0]) if single else out


def _pairs(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    return haar_samples(n, rng), haar_samples(n, rng)


@checker
def functional_equation_residual(f: Callable, sample_pairs=None, quad: CircleQuadrature | None = None,
                                 tol: float = 1e-10, n_pairs: int = 200, seed: int = DEFAULT_SEED,
                                 label: str | None = None) -> CheckReport:
    """Max over pairs of ``|int_K f(x k y) dk - f(x) f(y)|``."""
    quad = quad or CircleQuadrature(64)
    if sample_pairs is None:
        xs, ys = _pairs(n_pairs, seed)
    else:
        xs = np.array([np.asarray(p[0], dtype=float) for p in sample_pairs])
        ys = np.array([np.asarray(p[1], dtype=float) for p in sample_pairs])
    if len(xs) == 0:
        raise DomainError("need at least one sample pair")
    avg = k_average(f, xs, ys, quad)
    prod = np.asarray(f(xs)) * np.asarray(f(ys))
    res = np.abs(avg - prod)
    i = int(np.argmax(res))
    worst = float(res[i])
    ok = worst <= tol
    name = f"spherical.functional_equation[{label or getattr(f, 'label', 'f')}]"
    # the worst pair is reported either way; on a fail it is the counterexample
    return report(name, ok, max_error=worst,
                  witness={"x": xs[i], "y": ys[i], "average": float(avg[i]), "product": float(prod[i])},
                  tol=tol, pairs=len(xs), circle_nodes=quad.node_count,
                  seed=seed if sample_pairs is None else None)


@checker
def bi_invariance_check(f: Callable, samples=None, tol: float = 1e-12, n: int = 200,
                        seed: int = DEFAULT_SEED, label: str | None = None) -> CheckReport:
    """Max of ``|f(k1 g k2) - f(g)|`` over random circle elements and group points."""
    rng = np.random.default_rng(seed)
    g = haar_samples(n, rng) if samples is None else _quats(np.asarray(samples, dtype=float))
    k1 = circle_element(rng.uniform(0, 2 * np.pi, len(g)))
    k2 = circle_element(rng.uniform(0, 2 * np.pi, len(g)))
    moved = qmul(qmul(k1, g), k2)
    res = np.abs(np.asarray(f(moved)) - np.asarray(f(g)))
    i = int(np.argmax(res))
    worst = float(res[i])
    ok = worst <= tol
    return report(f"spherical.bi_invariance[{label or getattr(f, 'label', 'f')}]", ok, max_error=worst,
                  witness=None if ok else {"k1": k1[i], "g": g[i], "k2": k2[i], "difference": worst},
                  tol=tol, samples=len(g))


class Convolution:
    """``(f * h)(g) = int f(g u^-1) h(u) du`` evaluated by Haar quadrature."""

    def __init__(self, f: Callable, h: Callable, quad: EulerQuadrature, chunk: int = 64):
        self.f, self.h, self.quad, self.chunk = f, h, quad, chunk
        self._hu = np.asarray(h(quad.nodes), dtype=float) * quad.weights
        self._fast = isinstance(f, HeightFunction)
        if self._fast:
            # h(g u^-1) = row3(R(g)) . row3(R(u))
            self._rows = rotation_matrix(quad.nodes)[:, 2, :]
        self.label = f"{getattr(f, 'label', 'f')}*{getattr(h, 'label', 'h')}"

    def __call__(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        flat = _quats(g)
        out = np.empty(len(flat))
        for s in range(0, len(flat), self.chunk):
            block = flat[s:s + self.chunk]
            if self._fast:
                hts = np.clip(rotation_matrix(block)[:, 2, :] @ self._rows.T, -1.0, 1.0)
                vals = self.f.profile(hts)
            else:
                pts = qmul(block[:, None, :], qconj(self.quad.nodes)[None, :, :])
                vals = np.asarray(self.f(pts.reshape(-1, 4))).reshape(len(block), -1)
            out[s:s + self.chunk] = vals @ self._hu
        return out.reshape(g.shape[:-1])


def haar_convolve(f: Callable, h: Callable, quad: EulerQuadrature) -> Callable:
    """Convolution of two functions on SU(2).

    When both factors are height functions the result is again one, and
    it is returned as a :class:`HeightFunction` whose profile is evaluated
    at polar representatives.
    """
    conv = Convolution(f, h, quad)
    if isinstance(f, HeightFunction) and isinstance(h, HeightFunction):
        def profile(u):
            u = np.asarray(u, dtype=float)
            beta = np.arccos(np.clip(u, -1.0, 1.0))
            reps = euler_to_quat(np.zeros_like(beta), beta, np.zeros_like(beta))
            return conv(reps.reshape(-1, 4)).reshape(u.shape)
        return HeightFunction(profile, label=conv.label)
    return conv


def spherical_transform(f: Callable, l: int, quad: EulerQuadrature) -> float:
    """``L_l(f) = int f(x) zonal(l, x) dx``."""
    z = zonal(l)
    if isinstance(f, HeightFunction):
        prod = HeightFunction(lambda u: f.profile(u) * z.profile(u))
    else:
        def prod(q):
            return np.asarray(f(q)) * z(q)
    return haar_integral(prod, quad)


def _abs(f: Callable) -> Callable:
    if isinstance(f, HeightFunction):
        return HeightFunction(lambda u: np.abs(f.profile(u)))
    return lambda q: np.abs(np.asarray(f(q)))


def fixture_pair() -> tuple[HeightFunction, HeightFunction]:
    """Two smooth bi-invariant functions used by the convolution checks."""
    f = HeightFunction(lambda u: np.exp(u + legendre(2, u)), label="exp(h+P2)")
    h = HeightFunction(lambda u: (1 + u) ** 2 / 4 + legendre(2, u) / 2, label="(1+h)^2/4+P2/2")
    return f, h


def _multiplicativity(f, h, ls, quad):
    fh = haar_convolve(f, h, quad)
    # |L_l(f)| <= L_0(|f|), so the total-mass product sets the natural scale
    scale = abs(haar_integral(_abs(f), quad) * haar_integral(_abs(h), quad))
    rows = []
    for l in ls:
        a = spherical_transform(fh, l, quad)
        b = spherical_transform(f, l, quad) * spherical_transform(h, l, quad)
        rows.append((l, a, b, abs(a - b) / max(abs(a), abs(b), scale)))
    return rows


@checker
def gelfand_homomorphism_check(lmax: int = 8, f: Callable | None = None, h: Callable | None = None,
                               quads: Sequence[EulerQuadrature] | None = None, tol: float = 1e-6,
                               comm_tol: float = 1e-8, comm_points: int = 20,
                               seed: int = DEFAULT_SEED) -> CheckReport:
    """``L_l(f * h) = L_l(f) L_l(h)`` for ``l <= lmax``, and ``f * h = h * f`` at sample points.

    Errors are relative to ``max(|L_l(f*h)|, |L_l(f) L_l(h)|, L_0(|f|) L_0(|h|))``;
    the last term bounds every transform and keeps those that vanish by
    orthogonality from dividing rounding noise by rounding noise. ``quads`` lists the rules in
    decreasing resolution; the first one decides, the others are reported
    as resolution data.
    """
    if f is None or h is None:
        f, h = fixture_pair()
    quads = list(quads) if quads is not None else [EulerQuadrature(32, 32, 32)]
    ls = list(range(lmax + 1))
    per_quad = []
    for q in quads:
        rows = _multiplicativity(f, h, ls, q)
        per_quad.append({"nodes": q.counts, "max_rel_error": max(r[3] for r in rows)})
        if q is quads[0]:
            main = rows
    worst = max(main, key=lambda r: r[3])
    rng = np.random.default_rng(seed)
    pts = haar_samples(comm_points, rng)
    fh = Convolution(f, h, quads[0])(pts)
    hf = Convolution(h, f, quads[0])(pts)
    comm = np.abs(fh - hf)
    ci = int(np.argmax(comm))
    ok_mult = worst[3] <= tol
    ok_comm = float(comm[ci]) <= comm_tol
    witness = None
    if not ok_mult:
        witness = {"l": worst[0], "L(f*h)": worst[1], "L(f)L(h)": worst[2]}
    elif not ok_comm:
        witness = {"g": pts[ci], "f*h": float(fh[ci]), "h*f": float(hf[ci])}
    return report("spherical.gelfand_homomorphism", ok_mult and ok_comm, max_error=worst[3],
                  witness=witness, lmax=lmax, tol=tol, comm_tol=comm_tol,
                  commutator_max=float(comm[ci]), resolutions=per_quad,
                  transforms=[{"l": l, "L(f*h)": a, "L(f)L(h)": b} for l, a, b, _ in main])


def _casimir():
    L = builtin("so3_cross")
    p = enveloping.SymPoly(L, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
    return enveloping.symmetrize(p)


def _rayleigh(l: int, points: np.ndarray, step: float) -> np.ndarray:
    C = _casimir()
    z = zonal(l)
    out = []
    for q in points:
        g = SU2Element.from_array(q)
        f = lambda e: _scalar(z, e)  # noqa: E731
        out.append(enveloping.apply_operator("su2", C, f, g, step) / f(g))
    return np.array(out)


def _points_where(l: int, n: int, rng, threshold: float = 0.2) -> np.ndarray:
    z = zonal(l)
    pts = []
    while len(pts) < n:
        cand = haar_samples(4 * n, rng)
        pts.extend(cand[np.abs(z(cand)) >= threshold])
    return np.array(pts[:n])


@checker
def casimir_eigen_ratio(l: int, step: float = 1e-4, n_points: int = 20, tol: float = 1e-3,
                        seed: int = DEFAULT_SEED) -> CheckReport:
    """Rayleigh quotient of the Casimir ``X1^2 + X2^2 + X3^2`` on ``zonal(l)``.

    Passes when the quotient is point-independent (stddev within
    ``tol * |mean|``) and its ratio to the ``l = 1`` value is
    ``l(l+1)/2`` within ``tol``.
    """
    if not 1 <= l <= 6:
        raise DomainError("casimir_eigen_ratio supports 1 <= l <= 6")
    rng = np.random.default_rng(seed)
    q_l = _rayleigh(l, _points_where(l, n_points, rng), step)
    q_1 = q_l if l == 1 else _rayleigh(1, _points_where(1, n_points, rng), step)
    mean_l, mean_1 = float(q_l.mean()), float(q_1.mean())
    spread = float(q_l.std())
    ratio = mean_l / mean_1
    expected = l * (l + 1) / 2
    err = abs(ratio - expected)
    ok = err <= tol and spread <= tol * abs(mean_l)
    return report(f"spherical.casimir[{l}]", ok, max_error=err,
                  witness=None if ok else {"ratio": ratio, "expected": expected, "stddev": spread,
                                           "mean": mean_l},
                  eigenvalue=mean_l, eigenvalue_1=mean_1, ratio=ratio, stddev=spread,
                  points=n_points, step=step, tol=tol)


# -- the t-cut gate ------------------------------------------------------

@dataclass
class GateResult:
    branch: str
    value: float
    gate_witness: dict | None = None
    consistency: float | None = None
    samples: int = 0

    def __post_init__(self):
        if self.branch not in ("product", "zero"):
            raise ValueError(f"bad branch {self.branch!r}")
        if self.branch == "zero" and self.gate_witness is None:
            raise ValueError("the zero branch needs a witness")

    def to_dict(self) -> dict[str, Any]:
        return {"branch": self.branch, "value": self.value, "gate_witness": self.gate_witness,
                "consistency": self.consistency, "samples": self.samples}


def spherical_gate(f: Callable, x, y, t1: float, t2: float, quad: CircleQuadrature | None = None,
                   gate_samples=None, n_samples: int = 10_000, seed: int = DEFAULT_SEED) -> GateResult:
    """``f(x) f(y)`` unless some sampled product ``uv`` has ``t1 < f(uv) < t2``.

    ``gate_samples`` is a pair of arrays ``(u, v)``; by default ``n_samples``
    seeded Haar pairs. ``f`` must map the samples into ``[0, 1]``.
    """
    if t1 > t2:
        raise DomainError("need t1 <= t2")
    quad = quad or CircleQuadrature(64)
    if gate_samples is None:
        u, v = _pairs(n_samples, seed)
    else:
        u, v = (_quats(np.asarray(a, dtype=float)) for a in gate_samples)
    uv = qmul(u, v)
    fuv = np.asarray(f(uv), dtype=float)
    fx, fy = _scalar(f, x), _scalar(f, y)
    for arr in (np.asarray(f(u)), np.asarray(f(v)), fuv, np.array([fx, fy])):
        if np.any(arr < 0) or np.any(arr > 1) or not np.all(np.isfinite(arr)):
            raise DomainError("the gate needs f valued in [0, 1]")
    hit = np.nonzero((fuv > t1) & (fuv < t2))[0]
    if len(hit):
        i = int(hit[0])
        return GateResult("zero", 0.0, {"x": u[i].tolist(), "y": v[i].tolist(), "f(xy)": float(fuv[i])},
                          samples=len(u))
    value = fx * fy
    cons = abs(k_average(f, np.asarray(x, dtype=float), np.asarray(y, dtype=float), quad) - value)
    return GateResult("product", value, None, float(cons), samples=len(u))


def gate_fixtures() -> list[tuple[str, HeightFunction, float, float, str]]:
    """``(label, f, t1, t2, expected_branch)`` for the three documented cases."""
    one = HeightFunction(lambda u: np.ones_like(u), label="1")
    affine = HeightFunction(lambda u: (1 + u) / 2, label="(1+h)/2")
    step = HeightFunction(lambda u: (u >= 0).astype(float), label="step(h>=0)")
    return [("constant", one, 0.25, 0.75, "product"),
            ("affine", affine, 0.2, 0.8, "zero"),
            ("step", step, 0.25, 0.75, "product")]


@checker
def gate_check(n_samples: int = 10_000, seed: int = DEFAULT_SEED) -> CheckReport:
    """Run the gate on each fixture and compare with the documented branch."""
    rng = np.random.default_rng(seed + 1)
    x, y = haar_samples(2, rng)
    rows = []
    bad = None
    for label, f, t1, t2, expected in gate_fixtures():
        res = spherical_gate(f, x, y, t1, t2, n_samples=n_samples, seed=seed)
        rows.append({"fixture": label, "expected": expected, **res.to_dict()})
        if res.branch != expected and bad is None:
            bad = rows[-1]
    return report("spherical.gate", bad is None, witness=bad, fixtures=rows, samples=n_samples)


@checker
def tcut_nesting_check(f: Callable, thresholds: Sequence[float] = (0.25, 0.5, 0.75), samples=None,
                       n: int = 10_000, seed: int = DEFAULT_SEED, label: str | None = None) -> CheckReport:
    """Cuts at higher thresholds are contained in cuts at lower ones, on samples."""
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds):
        raise DomainError("thresholds must be sorted")
    pts = haar_samples(n, np.random.default_rng(seed)) if samples is None else _quats(samples)
    vals = np.asarray(f(pts), dtype=float)
    grid = [tuple(p) for p in pts.tolist()]
    table = dict(zip(grid, vals.tolist()))
    U = SampledFuzzySet(4, lambda s: table[s] if s in table else _scalar(f, s), grid)
    cuts = [t_cut(U, t) for t in thresholds]
    sizes = [len(c) for c in cuts]
    for i in range(len(thresholds)):
        for j in range(i + 1, len(thresholds)):
            if not cuts[j] <= cuts[i]:
                extra = next(iter(cuts[j] - cuts[i]))
                return report(f"spherical.tcut_nesting[{label or getattr(f, 'label', 'f')}]", False,
                              witness={"t_low": thresholds[i], "t_high": thresholds[j], "point": extra},
                              thresholds=thresholds, sizes=sizes, samples=len(grid))
    strict = all(a > b for a, b in zip(sizes, sizes[1:])) and sizes[-1] > 0
    return report(f"spherical.tcut_nesting[{label or getattr(f, 'label', 'f')}]", True, max_error=0,
                  thresholds=thresholds, sizes=sizes, strictly_nested=strict, samples=len(grid))


@checker
def normalization_check(lmax: int = 8) -> CheckReport:
    """``zonal(l, e) == 1`` exactly for ``l <= lmax``."""
    bad = next((l for l in range(lmax + 1) if zonal(l, SU2_IDENTITY) != 1.0), None)
    if bad is not None:
        return report("spherical.normalization", False, witness={"l": bad, "value": zonal(bad, SU2_IDENTITY)},
                      lmax=lmax)
    return report("spherical.normalization", True, max_error=0, lmax=lmax)
