"""Finite-dimensional Lie algebras given by structure constants.

``c[i][j][k]`` is the coefficient of ``X_k`` in ``[X_i, X_j]``. Constants
are exact ``Fraction``; brackets stay exact for rational coordinates and
fall back to floats otherwise.

The built-in ``so3_cross`` is the cross-product bracket ``[x, y] = x * y``
on coordinates ``(a, b, c)``. That is the bracket used for the fuzzy
subalgebra example on sl(2, R) coordinates; mathematically it is so(3),
not the standard sl(2) bracket, which is available separately as ``sl2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError
from .groups import get_model, model_for_algebra
from .report import CheckReport, checker, report


@dataclass(frozen=True)
class LieAlgebraSpec:
    name: str
    labels: tuple[str, ...]
    c: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        if n < 1:
            raise DomainError("a Lie algebra needs at least one basis element")
        if len(self.c) != n or any(len(row) != n or any(len(v) != n for v in row) for row in self.c):
            raise DomainError(f"structure constants must have shape ({n}, {n}, {n})")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __repr__(self):
        return f"LieAlgebraSpec({self.name!r}, labels={list(self.labels)})"

    @classmethod
    def from_brackets(cls, name: str, labels: Sequence[str],
                      brackets: Mapping[tuple[int, int], Mapping[int, object]],
                      antisymmetrize: bool = True) -> "LieAlgebraSpec":
        """Build from ``{(i, j): {k: coeff}}``; ``[X_j, X_i]`` is filled in by antisymmetry."""
        n = len(labels)
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), terms in brackets.items():
            for k, v in terms.items():
                c[i][j][k] = Fraction(v)
                if antisymmetrize:
                    c[j][i][k] = -Fraction(v)
        return cls(name, tuple(labels), _freeze(c))

    def to_dict(self) -> dict:
        n = self.dim
        sparse = [[[[k, str(self.c[i][j][k])] for k in range(n) if self.c[i][j][k] != 0]
                   for j in range(n)] for i in range(n)]
        return {"dim": n, "labels": list(self.labels), "c": sparse, "name": self.name}

    @classmethod
    def from_dict(cls, data: Mapping) -> "LieAlgebraSpec":
        """Load ``{"dim": n, "labels": [...], "c": [[[ [k, "p/q"], ... ], ...], ...]}``.

        ``c[i][j]`` lists the nonzero ``(k, c[i][j][k])`` entries.
        """
        unknown = set(data) - {"dim", "labels", "c", "name"}
        if unknown:
            raise DomainError(f"unknown key(s) in algebra description: {sorted(unknown)}")
        try:
            n = int(data["dim"])
            sparse = data["c"]
        except KeyError as exc:
            raise DomainError(f"algebra description is missing {exc.args[0]!r}") from None
        labels = tuple(data.get("labels") or [f"X{i + 1}" for i in range(n)])
        if len(labels) != n or len(sparse) != n or any(len(row) != n for row in sparse):
            raise DomainError("algebra description has inconsistent dimensions")
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for k, v in sparse[i][j]:
                    if not 0 <= int(k) < n:
                        raise DomainError(f"structure-constant index {k} out of range")
                    c[i][j][int(k)] = Fraction(v)
        return cls(str(data.get("name", "custom")), labels, _freeze(c))


def _freeze(c) -> tuple:
    return tuple(tuple(tuple(v) for v in row) for row in c)


def _so3_cross() -> LieAlgebraSpec:
    return LieAlgebraSpec.from_brackets("so3_cross", ("a", "b", "c"),
                                        {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})


def _sl2() -> LieAlgebraSpec:
    # basis order H < E < F
    return LieAlgebraSpec.from_brackets("sl2", ("H", "E", "F"),
                                        {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}})


def _heisenberg() -> LieAlgebraSpec:
    return LieAlgebraSpec.from_brackets("heisenberg", ("X", "Y", "Z"), {(0, 1): {2: 1}})


BUILTINS: dict[str, LieAlgebraSpec] = {
    "so3_cross": _so3_cross(),
    "sl2": _sl2(),
    "heisenberg": _heisenberg(),
}


def builtin(name: str) -> LieAlgebraSpec:
    try:
        return BUILTINS[name]
    except KeyError:
        raise DomainError(f"unknown built-in algebra {name!r}; choose from {sorted(BUILTINS)}") from None


def resolve_algebra(spec) -> LieAlgebraSpec:
    """Accept a spec, a built-in name, or a JSON-style dict."""
    if isinstance(spec, LieAlgebraSpec):
        return spec
    if isinstance(spec, str):
        return builtin(spec)
    if isinstance(spec, Mapping):
        return LieAlgebraSpec.from_dict(spec)
    raise DomainError(f"cannot interpret {spec!r} as a Lie algebra")


def basis_vector(L: LieAlgebraSpec, i: int) -> tuple[int, ...]:
    return tuple(int(k == i) for k in range(L.dim))


def _check_len(L: LieAlgebraSpec, *vecs):
    for v in vecs:
        if len(v) != L.dim:
            raise DomainError(f"vector of length {len(v)} in a {L.dim}-dimensional algebra")


def bracket(L: LieAlgebraSpec, x: Sequence, y: Sequence) -> tuple:
    """``[x, y] = sum_{ijk} x_i y_j c[i][j][k] X_k``."""
    _check_len(L, x, y)
    n = L.dim
    zero = Fraction(0) if all(_is_exact(v) for v in (*x, *y)) else 0.0
    out = [zero] * n
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            if yj == 0:
                continue
            cij = L.c[i][j]
            for k in range(n):
                if cij[k]:
                    out[k] += xi * yj * cij[k]
    return tuple(out)


@checker
def jacobi_check(L: LieAlgebraSpec) -> CheckReport:
    """Exact antisymmetry and Jacobi verification with an index witness."""
    name = f"lie.jacobi[{L.name}]"
    n = L.dim
    c = L.c
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if c[i][j][k] + c[j][i][k] != 0:
                    return report(name, False, witness={"axiom": "antisymmetry", "indices": (i, j, k),
                                                        "c_ijk": c[i][j][k], "c_jik": c[j][i][k]})
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    total = sum(c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l]
                                + c[k][i][m] * c[m][j][l] for m in range(n))
                    if total != 0:
                        return report(name, False, witness={"axiom": "jacobi",
                                                            "indices": (i, j, k, l), "value": total})
    return report(name, True, max_error=0, dim=n)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def ad_matrix(L: LieAlgebraSpec, X: Sequence) -> np.ndarray:
    """Matrix of ``Y -> [X, Y]``: column ``j`` holds ``[X, X_j]``.

    Rational input gives an object array of Fractions (exact), otherwise
    a float array.
    """
    _check_len(L, X)
    n = L.dim
    cols = [bracket(L, X, basis_vector(L, j)) for j in range(n)]
    exact = all(_is_exact(v) for v in X)
    M = np.array([[Fraction(cols[j][k]) if exact else float(cols[j][k]) for j in range(n)]
                  for k in range(n)], dtype=object if exact else float)
    return M


def group_model(L: LieAlgebraSpec, model=None):
    """The matrix-group model attached to a built-in algebra."""
    if model is not None:
        m = get_model(model)
        if m.algebra_name != L.name:
            raise DomainError(f"model {m.name!r} does not realize {L.name!r}")
        return m
    return model_for_algebra(L.name)


def Ad_matrix(g, L: LieAlgebraSpec, model=None) -> np.ndarray:
    """``Ad(g)`` in basis coordinates, from conjugation in the group model."""
    m = group_model(L, model)
    A = m.Ad(g)
    if isinstance(A, np.ndarray):
        return A
    exact = all(_is_exact(v) for row in A for v in row)
    return np.array([[Fraction(v) if exact else float(v) for v in row] for row in A],
                    dtype=object if exact else float)


def exp_series(M: np.ndarray, trunc: int) -> np.ndarray:
    """``sum_{m < trunc} M^m / m!``; exact for object arrays of Fractions."""
    if trunc < 1:
        raise DomainError("trunc must be at least 1")
    n = M.shape[0]
    exact = M.dtype == object
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    term = np.array([[one if i == j else zero for j in range(n)] for i in range(n)],
                    dtype=object if exact else float)
    total = term.copy()
    for m in range(1, trunc):
        term = term.dot(M)
        term = term * (Fraction(1, m) if exact else 1.0 / m)
        total = total + term
    return total


def series_remainder_bound(norm: float, trunc: int) -> float:
    """Bound on ``sum_{m >= trunc} norm^m / m!`` (Lagrange form)."""
    if norm == 0:
        return 0.0
    log_term = trunc * math.log(norm) - math.lgamma(trunc + 1)
    return math.exp(log_term + norm)


@checker
def exp_ad_check(L: LieAlgebraSpec, X: Sequence, trunc: int = 20, tol: float = 1e-10,
                 model=None) -> CheckReport:
    """Compare ``Ad(exp X)`` with the truncated series of ``e^{ad X}``."""
    name = f"lie.exp_ad[{L.name}]"
    m = group_model(L, model)
    ad = ad_matrix(L, X)
    series = exp_series(ad, trunc)
    Ad = Ad_matrix(m.exp(X), L, model)
    diff = Ad - series
    exact = diff.dtype == object
    dev = max((abs(v) for v in diff.ravel()), default=0)
    norm = float(np.linalg.norm(ad.astype(float), 2))
    bound = series_remainder_bound(norm, trunc)
    if exact and all(v == 0 for v in np.linalg.matrix_power(ad, trunc).ravel()):
        bound = 0.0  # nilpotent: the series terminates before trunc
    ok = dev == 0 if exact and tol == 0 else float(dev) <= tol
    return report(name, ok, max_error=dev if exact else float(dev),
                  witness=None if ok else {"X": tuple(X), "deviation": dev},
                  trunc=trunc, tol=tol, remainder_bound=bound, exact=exact)


def random_ball_vector(rng: np.random.Generator, dim: int, radius: float = 1.0) -> list[float]:
    v = rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return list(v * radius * rng.uniform() ** (1.0 / dim))


def random_rational_vector(rng: np.random.Generator, dim: int, den: int = 4) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(rng.integers(-2 * den, 2 * den + 1)), den) for _ in range(dim))


@checker
def exp_ad_sweep_check(L: LieAlgebraSpec, samples: int = 100, trunc: int = 20, tol: float = 1e-10,
                       seed: int = 42) -> CheckReport:
    """``exp_ad_check`` over random ``X``: unit ball for floats, rationals when exact.

    For nilpotent algebras (e.g. heisenberg) rational ``X`` and ``tol=0``
    demand exact agreement.
    """
    rng = np.random.default_rng(seed)
    worst, bound = 0, 0.0
    exact = tol == 0
    for _ in range(samples):
        X = random_rational_vector(rng, L.dim) if exact else random_ball_vector(rng, L.dim)
        r = exp_ad_check(L, X, trunc=trunc, tol=tol)
        bound = max(bound, r.params["remainder_bound"])
        if not r.passed:
            return report(f"lie.exp_ad_sweep[{L.name}]", False, max_error=r.max_error, witness=r.witness,
                          samples=samples, trunc=trunc, tol=tol, seed=seed)
        worst = max(worst, r.max_error)
    return report(f"lie.exp_ad_sweep[{L.name}]", True, max_error=worst, samples=samples, trunc=trunc,
                  tol=tol, seed=seed, remainder_bound=bound, exact=exact)
