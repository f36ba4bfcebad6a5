"""Symmetric algebra, PBW normal forms and the symmetrization map.

Words are tuples of basis indices. The PBW order is the basis order of
the algebra, and the only rewrite is

    X_j X_i -> X_i X_j + sum_k c[j][i][k] X_k      (j > i)

which strictly lowers (degree, inversions), so normalization terminates.
Coefficients are exact ``Fraction`` unless a float enters from outside
(group-model Ad matrices, irrational exp_ad parameters).

The second half evaluates elements of the enveloping algebra as
left-invariant differential operators on a group model by nested
central differences.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DomainError, NumericError
from .groups import SU2_IDENTITY, HeisenbergElement, SU2Element, get_model
from .lie import (LieAlgebraSpec, Ad_matrix, ad_matrix, bracket, builtin, random_ball_vector,
                  random_rational_vector, resolve_algebra, series_remainder_bound)
from .report import CheckReport, checker, report

SYM_DEGREE_CAP = 6
DEFAULT_STEP = 1e-4
STRATEGIES = ("left", "right")


def _clean(terms: Mapping) -> dict:
    return {k: v for k, v in terms.items() if v != 0}


def _coeff_json(v):
    return str(v) if isinstance(v, (int, Fraction)) else float(v)


def _coeff_from_json(v):
    return Fraction(v) if isinstance(v, (str, int)) else float(v)


class _Terms:
    """Shared linear-combination behaviour for SymPoly and EnvElement."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms: Mapping | None = None):
        self.algebra: LieAlgebraSpec = resolve_algebra(algebra)
        self.terms: dict = _clean(dict(terms or {}))

    def _same(self, other):
        if not isinstance(other, type(self)):
            raise DomainError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.algebra != self.algebra:
            raise DomainError(f"algebras {self.algebra.name!r} and {other.algebra.name!r} differ")

    def __add__(self, other):
        self._same(other)
        out = defaultdict(int, self.terms)
        for k, v in other.terms.items():
            out[k] += v
        return type(self)(self.algebra, out)

    def __neg__(self):
        return type(self)(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        return type(self)(self.algebra, {k: a * v for k, v in self.terms.items()})

    def __rmul__(self, a):
        return self.scale(a)

    def __eq__(self, other):
        return (isinstance(other, type(self)) and other.algebra == self.algebra
                and other.terms == self.terms)

    def __hash__(self):
        return hash((self.algebra, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.terms.values())

    def max_abs_diff(self, other) -> float:
        """Largest coefficient-wise deviation."""
        d = self - other
        return max((abs(float(v)) for v in d.terms.values()), default=0.0)

    def __len__(self):
        return len(self.terms)


class SymPoly(_Terms):
    """Polynomial in the symmetric algebra: exponent tuple -> coefficient."""

    __slots__ = ()

    def __init__(self, algebra, terms: Mapping | None = None):
        super().__init__(algebra, terms)
        n = self.algebra.dim
        for e in self.terms:
            if len(e) != n or any(k < 0 for k in e):
                raise DomainError(f"bad exponent sequence {e} for a {n}-dimensional algebra")

    @classmethod
    def monomial(cls, algebra, exponents: Sequence[int], coeff=1) -> "SymPoly":
        return cls(algebra, {tuple(exponents): Fraction(coeff) if isinstance(coeff, int) else coeff})

    @classmethod
    def from_word(cls, algebra, word: Sequence[int], coeff=1) -> "SymPoly":
        L = resolve_algebra(algebra)
        e = [0] * L.dim
        for i in word:
            e[i] += 1
        return cls.monomial(L, e, coeff)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def top_degree(self) -> "SymPoly":
        d = self.degree()
        return SymPoly(self.algebra, {e: v for e, v in self.terms.items() if sum(e) == d})

    def __mul__(self, other):
        if not isinstance(other, SymPoly):
            return self.scale(other)
        self._same(other)
        out = defaultdict(int)
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                out[tuple(a + b for a, b in zip(e1, e2))] += v1 * v2
        return SymPoly(self.algebra, out)

    def to_dict(self) -> dict:
        terms = [{"word": [i for i, k in enumerate(e) for _ in range(k)], "coeff": _coeff_json(v)}
                 for e, v in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))]
        return {"algebra": self.algebra.name, "terms": terms}

    @classmethod
    def from_dict(cls, data: Mapping, algebra=None) -> "SymPoly":
        L = resolve_algebra(algebra if algebra is not None else data["algebra"])
        out = SymPoly(L)
        for t in data["terms"]:
            out = out + SymPoly.from_word(L, t["word"], _coeff_from_json(t["coeff"]))
        return out

    def __repr__(self):
        return f"SymPoly({self.algebra.name}, {self.terms})"


class EnvElement(_Terms):
    """Element of the enveloping algebra in PBW normal form: word -> coefficient."""

    __slots__ = ()

    def __init__(self, algebra, terms: Mapping | None = None):
        super().__init__(algebra, terms)
        n = self.algebra.dim
        for w in self.terms:
            if any(not 0 <= i < n for i in w):
                raise DomainError(f"word {w} has an index outside the basis")
            if any(a > b for a, b in zip(w, w[1:])):
                raise DomainError(f"word {w} is not in PBW order; use normal_form")

    @classmethod
    def one(cls, algebra) -> "EnvElement":
        return cls(algebra, {(): Fraction(1)})

    @classmethod
    def generator(cls, algebra, i: int) -> "EnvElement":
        return cls(algebra, {(i,): Fraction(1)})

    @classmethod
    def from_vector(cls, algebra, X: Sequence) -> "EnvElement":
        return cls(algebra, {(i,): v for i, v in enumerate(X)})

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __mul__(self, other):
        if isinstance(other, EnvElement):
            return env_mul(self, other)
        return self.scale(other)

    def to_dict(self) -> dict:
        terms = [{"word": list(w), "coeff": _coeff_json(v)}
                 for w, v in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))]
        return {"algebra": self.algebra.name, "terms": terms}

    @classmethod
    def from_dict(cls, data: Mapping, algebra=None) -> "EnvElement":
        unknown = set(data) - {"algebra", "terms"}
        if unknown:
            raise DomainError(f"unknown key(s) in element: {sorted(unknown)}")
        L = resolve_algebra(algebra if algebra is not None else data["algebra"])
        out = EnvElement(L)
        for t in data["terms"]:
            out = out + normal_form(L, tuple(t["word"]), _coeff_from_json(t["coeff"]))
        return out

    def __repr__(self):
        return f"EnvElement({self.algebra.name}, {self.terms})"


# -- normal form ---------------------------------------------------------

@lru_cache(maxsize=None)
def _nf(L: LieAlgebraSpec, word: tuple, strategy: str) -> tuple:
    inversions = [i for i in range(len(word) - 1) if word[i] > word[i + 1]]
    if not inversions:
        return ((word, Fraction(1)),)
    i = inversions[0] if strategy == "left" else inversions[-1]
    j, k = word[i], word[i + 1]
    out = defaultdict(Fraction)
    for w, v in _nf(L, word[:i] + (k, j) + word[i + 2:], strategy):
        out[w] += v
    for m, c in enumerate(L.c[j][k]):
        if c:
            for w, v in _nf(L, word[:i] + (m,) + word[i + 2:], strategy):
                out[w] += c * v
    return tuple((w, v) for w, v in sorted(out.items()) if v != 0)


def normal_form(L, word: Sequence[int], coeff=1, strategy: str = "left") -> EnvElement:
    """PBW normal form of ``coeff * X_{w0} X_{w1} ...``.

    ``strategy`` picks the leftmost or rightmost inversion to rewrite
    first; the result does not depend on it.
    """
    L = resolve_algebra(L)
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    word = tuple(int(i) for i in word)
    if any(not 0 <= i < L.dim for i in word):
        raise DomainError(f"word {word} has an index outside the basis")
    return EnvElement(L, {w: coeff * v for w, v in _nf(L, word, strategy)})


def env_mul(A: EnvElement, B: EnvElement) -> EnvElement:
    A._same(B)
    L = A.algebra
    out = defaultdict(int)
    for wa, ca in A.terms.items():
        for wb, cb in B.terms.items():
            c = ca * cb
            for w, v in _nf(L, wa + wb, "left"):
                out[w] += c * v
    return EnvElement(L, out)


@checker
def pbw_confluence_check(L, trials: int = 1000, max_degree: int = 5, seed: int = 42) -> CheckReport:
    """Leftmost-first and rightmost-first rewriting agree on random words."""
    L = resolve_algebra(L)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        d = int(rng.integers(0, max_degree + 1))
        word = tuple(int(i) for i in rng.integers(0, L.dim, size=d))
        a = normal_form(L, word, strategy="left")
        b = normal_form(L, word, strategy="right")
        if a != b:
            return report(f"enveloping.pbw_confluence[{L.name}]", False,
                          witness={"word": word, "left": a, "right": b},
                          trials=trials, max_degree=max_degree, seed=seed)
    return report(f"enveloping.pbw_confluence[{L.name}]", True, max_error=0,
                  trials=trials, max_degree=max_degree, seed=seed)


# -- symmetrization ------------------------------------------------------

def symmetrize(p: SymPoly, cap: int = SYM_DEGREE_CAP) -> EnvElement:
    """The symmetrization map: each monomial becomes the average of its orderings."""
    L = p.algebra
    if p.degree() > cap:
        raise CapacityError(f"degree {p.degree()} exceeds the symmetrization cap {cap}")
    out = EnvElement(L)
    for e, coeff in p.terms.items():
        word = tuple(i for i, k in enumerate(e) for _ in range(k))
        perms = set(itertools.permutations(word))
        acc = defaultdict(int)
        for w in perms:
            for u, v in _nf(L, w, "left"):
                acc[u] += v
        # every distinct ordering occurs equally often among all p! of them
        weight = coeff * Fraction(1, len(perms)) if isinstance(coeff, (int, Fraction)) else coeff / len(perms)
        out = out + EnvElement(L, {u: weight * v for u, v in acc.items()})
    return out


def graded_symbol(A: EnvElement) -> SymPoly:
    """Top filtration-degree part of ``A``, read commutatively."""
    d = A.degree()
    out = SymPoly(A.algebra)
    for w, v in A.terms.items():
        if len(w) == d:
            out = out + SymPoly.from_word(A.algebra, w, v)
    return out


def monomial_basis(n: int, max_degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples ordered by degree, then lexicographically on the PBW word."""
    out = []
    for d in range(max_degree + 1):
        for word in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in word:
                e[i] += 1
            out.append(tuple(e))
    return out


@checker
def bijectivity_check(L, max_degree: int = 4) -> CheckReport:
    """Matrix of symmetrization from ``S_{<=d}`` to the PBW basis of ``U_{<=d}``.

    Passes when every column has a 1 on its own PBW word, nothing else in
    its degree and nothing above it (block unitriangular, so invertible),
    and when powers of generators are fixed.
    """
    L = resolve_algebra(L)
    name = f"enveloping.bijectivity[{L.name}]"
    if max_degree > SYM_DEGREE_CAP:
        raise CapacityError(f"max_degree {max_degree} exceeds the cap {SYM_DEGREE_CAP}")
    basis = monomial_basis(L.dim, max_degree)
    words = [tuple(i for i, k in enumerate(e) for _ in range(k)) for e in basis]
    index = {w: r for r, w in enumerate(words)}
    M = [[Fraction(0)] * len(basis) for _ in basis]
    for col, e in enumerate(basis):
        image = symmetrize(SymPoly.monomial(L, e))
        for w, v in image.terms.items():
            M[index[w]][col] = v
    for col, w in enumerate(words):
        for row, u in enumerate(words):
            want = Fraction(int(row == col)) if len(u) >= len(w) else None
            if want is not None and M[row][col] != want:
                return report(name, False, witness={"monomial": w, "pbw_word": u, "entry": M[row][col]},
                              max_degree=max_degree, basis_size=len(basis))
    for i in range(L.dim):
        for m in range(max_degree + 1):
            got = symmetrize(SymPoly.monomial(L, [m if k == i else 0 for k in range(L.dim)]))
            if got != EnvElement(L, {(i,) * m: Fraction(1)}):
                return report(name, False, witness={"generator": i, "power": m, "image": got},
                              max_degree=max_degree, basis_size=len(basis))
    return report(name, True, max_error=0, max_degree=max_degree, basis_size=len(basis),
                  determinant=1)


# -- adjoint action on the enveloping algebra ----------------------------

def _vector_element(L: LieAlgebraSpec, X: Sequence) -> EnvElement:
    if len(X) != L.dim:
        raise DomainError(f"vector of length {len(X)} in a {L.dim}-dimensional algebra")
    return EnvElement.from_vector(L, X)


def ad_operator(X: Sequence, D: EnvElement) -> EnvElement:
    """``ad X (D) = X D - D X``."""
    Xe = _vector_element(D.algebra, X)
    return env_mul(Xe, D) - env_mul(D, Xe)


def auto_trunc(L: LieAlgebraSpec, X: Sequence, degree: int, target: float = 1e-14,
               limit: int = 400) -> int:
    """Smallest series length whose remainder bound on degree ``degree`` is below ``target``.

    ``ad X`` acts on the degree-``d`` part as a derivation, so its norm
    there is at most ``d * ||ad X||``.
    """
    norm = max(degree, 1) * float(np.linalg.norm(ad_matrix(L, X).astype(float), 2))
    if norm == 0:
        return 1
    for n in range(1, limit + 1):
        if series_remainder_bound(norm, n) < target:
            return n
    raise CapacityError(f"no truncation up to {limit} reaches {target}")


@lru_cache(maxsize=None)
def _generator_ad_matrices(L: LieAlgebraSpec, degree: int):
    # ad X_i preserves the filtration, so it acts on the PBW words of degree <= d
    words = [w for d in range(degree + 1)
             for w in itertools.combinations_with_replacement(range(L.dim), d)]
    index = {w: r for r, w in enumerate(words)}
    mats = []
    for i in range(L.dim):
        M = np.zeros((len(words), len(words)))
        for col, w in enumerate(words):
            for u, v in ad_operator(basis_coords(L, i), EnvElement(L, {w: Fraction(1)})).terms.items():
                M[index[u], col] = float(v)
        mats.append(M)
    return words, index, mats


def basis_coords(L: LieAlgebraSpec, i: int) -> tuple:
    return tuple(Fraction(int(k == i)) for k in range(L.dim))


def exp_ad_operator(X: Sequence, D: EnvElement, trunc: int | None = 20) -> EnvElement:
    """``sum_{m < trunc} (ad X)^m (D) / m!``; ``trunc=None`` picks it from the remainder bound.

    Stays exact (and stops once a term vanishes) for rational ``X`` and
    exact ``D``; otherwise the series runs on the float matrix of ``ad X``
    over the PBW words of degree ``<= deg D``.
    """
    L = D.algebra
    if trunc is None:
        trunc = auto_trunc(L, X, D.degree())
    if trunc < 1:
        raise DomainError("trunc must be at least 1")
    if all(isinstance(v, (int, Fraction)) for v in X) and D.is_exact():
        total = D
        term = D
        for m in range(1, trunc):
            term = ad_operator(X, term)
            if term.is_zero():
                break
            total = total + term.scale(Fraction(1, math.factorial(m)))
        return total
    words, index, mats = _generator_ad_matrices(L, D.degree())
    M = sum(float(x) * A for x, A in zip(X, mats))
    term = np.zeros(len(words))
    for w, v in D.terms.items():
        term[index[w]] = float(v)
    total = term.copy()
    for m in range(1, trunc):
        term = M @ term / m
        total += term
    return EnvElement(L, {w: float(total[r]) for r, w in enumerate(words)})


def Ad_group_operator(model, g, D: EnvElement) -> EnvElement:
    """Substitute ``X_i -> Ad(g) X_i`` in every word of ``D`` and renormalize."""
    L = D.algebra
    A = Ad_matrix(g, L, model)
    images = [_vector_element(L, [A[k][i] for k in range(L.dim)]) for i in range(L.dim)]
    out = EnvElement(L)
    for w, v in D.terms.items():
        acc = EnvElement.one(L)
        for i in w:
            acc = env_mul(acc, images[i])
        out = out + acc.scale(v)
    return out


# -- left-invariant differential operators -------------------------------

def _check_step(step: float):
    if not 1e-5 <= step <= 1e-2:
        raise DomainError(f"step {step} outside [1e-5, 1e-2]")


def _finite(v) -> float:
    v = float(v)
    if not math.isfinite(v):
        raise NumericError(f"function value {v} is not finite")
    return v


def _nested_derivative(model, vectors: Sequence[Sequence], f: Callable, g, step: float) -> float:
    # leftmost vector is the outermost derivative: translate by it first
    if not vectors:
        return _finite(f(g))
    X = vectors[0]
    plus = model.mul(g, model.exp([step * v for v in X]))
    minus = model.mul(g, model.exp([-step * v for v in X]))
    rest = vectors[1:]
    return (_nested_derivative(model, rest, f, plus, step)
            - _nested_derivative(model, rest, f, minus, step)) / (2 * step)


def left_invariant_derivative(model, X: Sequence, f: Callable, g, step: float = DEFAULT_STEP) -> float:
    """Central difference of ``t -> f(g exp(tX))`` at 0."""
    _check_step(step)
    return _nested_derivative(get_model(model), [X], f, g, step)


def _basis(n: int, i: int) -> tuple:
    return tuple(float(k == i) for k in range(n))


def apply_word(model, L: LieAlgebraSpec, word: Sequence[int], f: Callable, g,
               step: float = DEFAULT_STEP) -> float:
    """Apply the raw product of generators in ``word`` (no reordering)."""
    _check_step(step)
    return _nested_derivative(get_model(model), [_basis(L.dim, i) for i in word], f, g, step)


def apply_operator(model, A: EnvElement, f: Callable, g, step: float = DEFAULT_STEP) -> float:
    """``(A f)(g)`` with each PBW word applied as nested derivatives."""
    _check_step(step)
    m = get_model(model)
    total = 0.0
    for w, v in A.terms.items():
        total += float(v) * _nested_derivative(m, [_basis(A.algebra.dim, i) for i in w], f, g, step)
    return total


def eval_eq3(model, p: SymPoly, f: Callable, g, step: float = DEFAULT_STEP) -> float:
    """``p(d/dt_1, ..., d/dt_n) f(g exp(sum t_i X_i))`` at ``t = 0``."""
    _check_step(step)
    m = get_model(model)
    n = p.algebra.dim

    def F(t):
        return _finite(f(m.mul(g, m.exp(list(t)))))

    def partial(coords, t):
        if not coords:
            return F(t)
        i = coords[0]
        tp = list(t)
        tm = list(t)
        tp[i] += step
        tm[i] -= step
        return (partial(coords[1:], tp) - partial(coords[1:], tm)) / (2 * step)

    total = 0.0
    for e, v in p.terms.items():
        coords = [i for i, k in enumerate(e) for _ in range(k)]
        total += float(v) * partial(coords, [0.0] * n)
    return total


def _parallel(X: Sequence, Y: Sequence) -> bool:
    # Y = kX (or X = 0): every 2x2 minor of [X Y] vanishes
    return all(X[i] * Y[j] == X[j] * Y[i] for i in range(len(X)) for j in range(i + 1, len(X)))


@checker
def vector_field_bracket_check(model, X: Sequence, Y: Sequence, f: Callable, g,
                               step: float = DEFAULT_STEP, tol: float = 1e-4,
                               algebra=None) -> CheckReport:
    """``(XY - YX) f`` by nested differences against ``[X, Y] f``.

    When ``Y`` is a multiple of ``X`` the commutator is also computed in
    the enveloping algebra, where it must vanish exactly.
    """
    m = get_model(model)
    L = resolve_algebra(algebra) if algebra is not None else builtin(m.algebra_name)
    _check_step(step)
    fx = [float(v) for v in X]
    fy = [float(v) for v in Y]
    lhs = (_nested_derivative(m, [fx, fy], f, g, step) - _nested_derivative(m, [fy, fx], f, g, step))
    b = bracket(L, X, Y)
    rhs = _nested_derivative(m, [[float(v) for v in b]], f, g, step)
    err = abs(lhs - rhs)
    params = {"model": m.name, "step": step, "tol": tol, "lhs": lhs, "rhs": rhs}
    name = f"enveloping.vector_field_bracket[{m.name}]"
    if _parallel(X, Y):
        Xe, Ye = _vector_element(L, X), _vector_element(L, Y)
        comm = env_mul(Xe, Ye) - env_mul(Ye, Xe)
        params["parallel_exact_zero"] = comm.is_zero() and all(v == 0 for v in b)
        if not params["parallel_exact_zero"]:
            return report(name, False, max_error=err, witness={"X": X, "Y": Y, "commutator": comm},
                          **params)
    ok = err <= tol
    return report(name, ok, max_error=err, witness=None if ok else {"X": X, "Y": Y, "lhs": lhs, "rhs": rhs},
                  **params)


def random_sympoly(L, rng: np.random.Generator, max_degree: int, n_terms: int = 3,
                   denominators: int = 4) -> SymPoly:
    """Random polynomial with small rational coefficients (used by checks and tests)."""
    L = resolve_algebra(L)
    out = SymPoly(L)
    for _ in range(n_terms):
        d = int(rng.integers(0, max_degree + 1))
        word = [int(i) for i in rng.integers(0, L.dim, size=d)]
        c = Fraction(int(rng.integers(-denominators, denominators + 1)), int(rng.integers(1, denominators + 1)))
        out = out + SymPoly.from_word(L, word, c)
    return out


def random_env(L, rng: np.random.Generator, max_degree: int, n_terms: int = 3) -> EnvElement:
    L = resolve_algebra(L)
    out = EnvElement(L)
    for _ in range(n_terms):
        d = int(rng.integers(0, max_degree + 1))
        word = [int(i) for i in rng.integers(0, L.dim, size=d)]
        c = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        out = out + normal_form(L, word, c)
    return out


# -- sweeps used by the CLI suites ---------------------------------------

def _test_function(model_name: str, rng: np.random.Generator) -> Callable:
    """Random degree <= 2 polynomial in the matrix entries of the model."""
    c = rng.uniform(-1, 1, size=5)
    if model_name == "su2":
        def f(q):
            h = q.w * q.w + q.z * q.z - q.x * q.x - q.y * q.y
            return c[0] * q.w + c[1] * q.x + c[2] * q.y + c[3] * q.z + c[4] * h
    else:
        def f(e):
            return float(e.c) + c[0] * float(e.a) + c[1] * float(e.b) + c[2] * float(e.a) * float(e.b)
    return f


def _random_point(model_name: str, rng: np.random.Generator):
    if model_name == "su2":
        return SU2Element.from_array(rng.normal(size=4))
    return HeisenbergElement(*(float(v) for v in rng.uniform(-1, 1, size=3)))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


@checker
def eq3_consistency_check(model, trials: int = 50, max_degree: int = 2, tol: float = 1e-5,
                          step: float = DEFAULT_STEP, seed: int = 42) -> CheckReport:
    """``eval_eq3(p)`` against ``apply_operator(symmetrize(p))`` on random ``p``, ``f`` and ``g``.

    The error of each trial is ``|a - b| / max(1, |a|, |b|)``.
    """
    m = get_model(model)
    L = builtin(m.algebra_name)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        p = random_sympoly(L, rng, max_degree)
        f = _test_function(m.name, rng)
        g = _random_point(m.name, rng)
        a = eval_eq3(m, p, f, g, step)
        b = apply_operator(m, symmetrize(p), f, g, step)
        err = _rel(a, b)
        if err > tol:
            return report(f"enveloping.eq3_consistency[{m.name}]", False, max_error=err,
                          witness={"p": p, "eq3": a, "symmetrized": b},
                          trials=trials, max_degree=max_degree, tol=tol, step=step, seed=seed)
        worst = max(worst, err)
    return report(f"enveloping.eq3_consistency[{m.name}]", True, max_error=worst, trials=trials,
                  max_degree=max_degree, tol=tol, step=step, seed=seed)


@checker
def pinned_value_check(tol: float = 1e-5, step: float = DEFAULT_STEP) -> CheckReport:
    """The operator from ``X1^2`` on the quaternion real part at ``e`` is ``-1/4`` on both paths."""
    L = builtin("so3_cross")
    p = SymPoly.monomial(L, (2, 0, 0))
    f = lambda q: q.w  # noqa: E731
    a = eval_eq3("su2", p, f, SU2_IDENTITY, step)
    b = apply_operator("su2", symmetrize(p), f, SU2_IDENTITY, step)
    err = max(abs(a + 0.25), abs(b + 0.25))
    ok = err <= tol
    return report("enveloping.pinned_value", ok, max_error=err,
                  witness=None if ok else {"eq3": a, "symmetrized": b, "expected": -0.25},
                  eq3=a, symmetrized=b, expected=-0.25, tol=tol, step=step)


@checker
def operator_ad_check(model, samples: int = 100, max_degree: int = 3, tol: float = 1e-9,
                      trunc: int | None = None, seed: int = 42) -> CheckReport:
    """``Ad(exp X) D`` by substitution against the ``exp(ad X)`` series.

    su2 samples ``X`` in the unit ball; heisenberg samples rational ``X``
    and requires exact equality (``tol`` is ignored there). ``trunc=None``
    chooses the series length from the remainder bound.
    """
    m = get_model(model)
    L = builtin(m.algebra_name)
    rng = np.random.default_rng(seed)
    exact = m.name == "heisenberg"
    worst = 0.0
    used = 0
    for _ in range(samples):
        X = random_rational_vector(rng, L.dim) if exact else random_ball_vector(rng, L.dim)
        D = random_env(L, rng, max_degree)
        n = trunc if trunc is not None else (max_degree + 2 if exact else auto_trunc(L, X, D.degree()))
        used = max(used, n)
        a = Ad_group_operator(m, m.exp(X), D)
        b = exp_ad_operator(X, D, n)
        err = a.max_abs_diff(b)
        if (a != b) if exact else err > tol:
            return report(f"enveloping.operator_ad[{m.name}]", False, max_error=err,
                          witness={"X": X, "D": D, "Ad": a, "exp_ad": b},
                          samples=samples, max_degree=max_degree, tol=tol, trunc=n, seed=seed)
        worst = max(worst, err)
    return report(f"enveloping.operator_ad[{m.name}]", True, max_error=worst, samples=samples,
                  max_degree=max_degree, tol=0 if exact else tol, trunc=trunc or "auto", max_trunc=used,
                  exact=exact, seed=seed)


@checker
def automorphism_check(algebra, samples: int = 20, max_degree: int = 3, tol: float = 1e-8,
                       trunc: int | None = None, seed: int = 42) -> CheckReport:
    """``exp(ad X)(D1 D2) = exp(ad X)(D1) exp(ad X)(D2)``.

    Rational ``X`` on a nilpotent algebra gives a terminating exact
    series and exact equality is required; otherwise ``X`` is in the unit
    ball and ``tol`` bounds the coefficient deviation.
    """
    L = resolve_algebra(algebra)
    rng = np.random.default_rng(seed)
    exact = L.name == "heisenberg"
    worst = 0.0
    for _ in range(samples):
        X = random_rational_vector(rng, L.dim) if exact else random_ball_vector(rng, L.dim)
        D1, D2 = random_env(L, rng, max_degree), random_env(L, rng, max_degree)
        n = trunc if trunc is not None else (2 * max_degree + 2 if exact else None)
        lhs = exp_ad_operator(X, env_mul(D1, D2), n)
        rhs = env_mul(exp_ad_operator(X, D1, n), exp_ad_operator(X, D2, n))
        err = lhs.max_abs_diff(rhs)
        if (lhs != rhs) if exact else err > tol:
            return report(f"enveloping.automorphism[{L.name}]", False, max_error=err,
                          witness={"X": X, "D1": D1, "D2": D2},
                          samples=samples, max_degree=max_degree, tol=tol, seed=seed)
        worst = max(worst, err)
    return report(f"enveloping.automorphism[{L.name}]", True, max_error=worst, samples=samples,
                  max_degree=max_degree, tol=0 if exact else tol, trunc=trunc or "auto", exact=exact,
                  seed=seed)


@checker
def derivation_check(algebra, samples: int = 50, max_degree: int = 3, seed: int = 42) -> CheckReport:
    """``ad X (D1 D2) = ad X (D1) D2 + D1 ad X (D2)``, exactly."""
    L = resolve_algebra(algebra)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        X = random_rational_vector(rng, L.dim)
        D1, D2 = random_env(L, rng, max_degree), random_env(L, rng, max_degree)
        lhs = ad_operator(X, env_mul(D1, D2))
        rhs = env_mul(ad_operator(X, D1), D2) + env_mul(D1, ad_operator(X, D2))
        if lhs != rhs:
            return report(f"enveloping.derivation[{L.name}]", False,
                          witness={"X": X, "D1": D1, "D2": D2, "difference": lhs - rhs},
                          samples=samples, max_degree=max_degree, seed=seed)
    return report(f"enveloping.derivation[{L.name}]", True, max_error=0, samples=samples,
                  max_degree=max_degree, seed=seed)
