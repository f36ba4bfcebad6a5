"""Exact fuzzy-set algebra.

Memberships built from rational literals (ints, ``Fraction``, ``"p/q"``
strings) are stored as ``Fraction`` so the lattice operations are exact.
Real-valued rules (e.g. functions on SU(2)) may return floats; those are
range-checked but kept as floats.

Two carriers are supported:

* :class:`FiniteFuzzySet` -- an explicit universe of hashable elements;
* :class:`SampledFuzzySet` -- a total rule on coordinates in R^n together
  with a finite sample grid on which cuts and images are taken.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from numbers import Rational, Real
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .report import CheckReport, checker, report

PRODUCT_CAP = 10**6


def unit_value(value) -> Fraction | float:
    """Validate a membership value, returning it as ``Fraction`` when exact."""
    if isinstance(value, bool):
        raise DomainError(f"membership must be a number, got {value!r}")
    if isinstance(value, str):
        try:
            value = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"bad rational literal {value!r}") from exc
    elif isinstance(value, Rational):
        value = Fraction(value)
    elif isinstance(value, Real):
        value = float(value)
        if not math.isfinite(value):
            raise DomainError(f"membership {value!r} is not finite")
    else:
        raise DomainError(f"membership must be a real number, got {value!r}")
    if not 0 <= value <= 1:
        raise DomainError(f"membership {value} outside [0, 1]")
    return value


class FiniteFuzzySet:
    """A fuzzy subset of a finite universe.

    >>> A = FiniteFuzzySet({"a": "7/10", "b": "2/5", "c": 0})
    >>> sorted(t_cut(A, Fraction(1, 2)))
    ['a']
    """

    __slots__ = ("universe", "_mu")

    def __init__(self, membership: Mapping[Hashable, Any] | Iterable[tuple[Hashable, Any]],
                 universe: Sequence[Hashable] | None = None):
        pairs = membership.items() if isinstance(membership, Mapping) else membership
        mu: dict[Hashable, Fraction | float] = {}
        for s, v in pairs:
            if s in mu:
                raise DomainError(f"element {s!r} listed twice")
            mu[s] = unit_value(v)
        if universe is None:
            universe = tuple(mu)
        else:
            universe = tuple(universe)
            if len(set(universe)) != len(universe):
                raise DomainError("universe elements must be distinct")
            missing = [s for s in universe if s not in mu]
            extra = [s for s in mu if s not in set(universe)]
            if missing or extra:
                raise DomainError(f"membership not total on universe (missing={missing}, extra={extra})")
        self.universe: tuple[Hashable, ...] = universe
        self._mu = mu

    @classmethod
    def constant(cls, universe: Iterable[Hashable], value) -> "FiniteFuzzySet":
        universe = tuple(universe)
        value = unit_value(value)
        return cls({s: value for s in universe}, universe)

    @classmethod
    def empty(cls, universe: Iterable[Hashable]) -> "FiniteFuzzySet":
        """The fuzzy empty set, identically 0."""
        return cls.constant(universe, 0)

    @classmethod
    def whole(cls, universe: Iterable[Hashable]) -> "FiniteFuzzySet":
        """The entire set, identically 1."""
        return cls.constant(universe, 1)

    @classmethod
    def crisp(cls, universe: Iterable[Hashable], members: Iterable[Hashable]) -> "FiniteFuzzySet":
        universe = tuple(universe)
        members = set(members)
        unknown = members - set(universe)
        if unknown:
            raise DomainError(f"crisp members {sorted(map(repr, unknown))} not in universe")
        return cls({s: int(s in members) for s in universe}, universe)

    def __call__(self, s):
        try:
            return self._mu[s]
        except (KeyError, TypeError):
            raise DomainError(f"{s!r} is not in the universe") from None

    def items(self):
        return ((s, self._mu[s]) for s in self.universe)

    def values(self):
        return [self._mu[s] for s in self.universe]

    def height(self):
        """Largest membership value (0 on an empty universe)."""
        return max(self._mu.values(), default=Fraction(0))

    def support(self) -> frozenset:
        return frozenset(s for s, v in self._mu.items() if v > 0)

    def _check_same(self, other: "FiniteFuzzySet"):
        if not isinstance(other, FiniteFuzzySet) or set(self.universe) != set(other.universe):
            raise DomainError("fuzzy sets live on different universes")

    def __eq__(self, other):
        if not isinstance(other, FiniteFuzzySet):
            return NotImplemented
        return set(self.universe) == set(other.universe) and all(
            self._mu[s] == other._mu[s] for s in self.universe)

    def __hash__(self):
        return hash(frozenset(self._mu.items()))

    def __le__(self, other: "FiniteFuzzySet") -> bool:
        self._check_same(other)
        return all(self._mu[s] <= other._mu[s] for s in self.universe)

    def __ge__(self, other: "FiniteFuzzySet") -> bool:
        return other <= self

    def __or__(self, other):
        return fuzzy_union(self, other)

    def __and__(self, other):
        return fuzzy_intersection(self, other)

    def __repr__(self):
        body = ", ".join(f"{s!r}: {v}" for s, v in self.items())
        return f"FiniteFuzzySet({{{body}}})"

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "universe": [_elem_to_json(s) for s in self.universe],
            "membership": {_elem_key(s): _value_to_json(v) for s, v in self.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "FiniteFuzzySet":
        unknown = set(data) - {"universe", "membership"}
        if unknown:
            raise DomainError(f"unknown key(s) in fuzzy set: {sorted(unknown)}")
        try:
            universe = [_elem_from_json(s) for s in data["universe"]]
            raw = data["membership"]
        except KeyError as exc:
            raise DomainError(f"fuzzy set is missing key {exc.args[0]!r}") from None
        mu = {}
        for s in universe:
            key = _elem_key(s)
            if key not in raw:
                raise DomainError(f"no membership for element {key!r}")
            mu[s] = raw[key]
        if len(raw) != len(universe):
            extra = set(raw) - {_elem_key(s) for s in universe}
            raise DomainError(f"membership keys not in universe: {sorted(extra)}")
        return cls(mu, universe)

    @classmethod
    def from_json(cls, text: str) -> "FiniteFuzzySet":
        return cls.from_dict(json.loads(text))


def _elem_to_json(s):
    if isinstance(s, tuple):
        return [_elem_to_json(v) for v in s]
    if isinstance(s, Fraction):
        return str(s)
    return s


def _elem_from_json(s):
    if isinstance(s, list):
        return tuple(_elem_from_json(v) for v in s)
    return s


def _elem_key(s) -> str:
    return s if isinstance(s, str) else json.dumps(_elem_to_json(s))


def _value_to_json(v) -> str | float:
    return str(v) if isinstance(v, Fraction) else v


class SampledFuzzySet:
    """A fuzzy set on R^n given by a total rule, plus a finite sample grid.

    The rule is evaluated directly for any point (including off-grid sums
    and multiples); the grid is only where cuts, images and axiom sweeps
    are taken.
    """

    __slots__ = ("carrier_dim", "rule", "sample_grid")

    def __init__(self, carrier_dim: int, rule: Callable[[tuple], Any],
                 sample_grid: Iterable[Sequence]):
        if carrier_dim < 0:
            raise DomainError("carrier_dim must be non-negative")
        grid = tuple(dict.fromkeys(tuple(p) for p in sample_grid))
        if not grid:
            raise DomainError("sample_grid must be nonempty")
        for p in grid:
            if len(p) != carrier_dim:
                raise DomainError(f"grid point {p} has wrong dimension")
        self.carrier_dim = carrier_dim
        self.rule = rule
        self.sample_grid: tuple[tuple, ...] = grid

    def __call__(self, s):
        s = tuple(s)
        if len(s) != self.carrier_dim:
            raise DomainError(f"point {s} is not in R^{self.carrier_dim}")
        return unit_value(self.rule(s))

    def items(self):
        return ((s, self(s)) for s in self.sample_grid)

    def values(self):
        return [self(s) for s in self.sample_grid]

    def height(self):
        return max(self.values())

    def with_grid(self, grid: Iterable[Sequence]) -> "SampledFuzzySet":
        return SampledFuzzySet(self.carrier_dim, self.rule, grid)

    def __repr__(self):
        return f"SampledFuzzySet(dim={self.carrier_dim}, grid={len(self.sample_grid)} points)"


FuzzySet = FiniteFuzzySet | SampledFuzzySet


def membership(A: FuzzySet, s):
    """Membership degree of ``s`` in ``A``."""
    return A(s)


def t_cut(A: FuzzySet, t) -> frozenset:
    """Crisp set ``{s : A(s) >= t}``; for sampled sets, taken over the grid."""
    t = unit_value(t)
    return frozenset(s for s, v in A.items() if v >= t)


def _binary(A: FuzzySet, B: FuzzySet, op, name: str) -> FuzzySet:
    if isinstance(A, FiniteFuzzySet) and isinstance(B, FiniteFuzzySet):
        A._check_same(B)
        return FiniteFuzzySet({s: op(A(s), B(s)) for s in A.universe}, A.universe)
    if isinstance(A, SampledFuzzySet) and isinstance(B, SampledFuzzySet):
        if A.carrier_dim != B.carrier_dim:
            raise DomainError(f"{name}: carriers R^{A.carrier_dim} and R^{B.carrier_dim} differ")
        return SampledFuzzySet(A.carrier_dim, lambda s: op(A(s), B(s)),
                               A.sample_grid + B.sample_grid)
    raise DomainError(f"{name}: cannot mix finite and sampled fuzzy sets")


def fuzzy_union(A: FuzzySet, B: FuzzySet) -> FuzzySet:
    """Pointwise max."""
    return _binary(A, B, max, "union")


def fuzzy_intersection(A: FuzzySet, B: FuzzySet) -> FuzzySet:
    """Pointwise min."""
    return _binary(A, B, min, "intersection")


def fuzzy_complement(A: FuzzySet) -> FuzzySet:
    """Pointwise ``1 - mu``."""
    if isinstance(A, FiniteFuzzySet):
        return FiniteFuzzySet({s: 1 - v for s, v in A.items()}, A.universe)
    return SampledFuzzySet(A.carrier_dim, lambda s: 1 - A(s), A.sample_grid)


def min_product(*sets: FuzzySet, cap: int = PRODUCT_CAP) -> FuzzySet:
    """Cartesian product with membership ``min`` over components.

    Finite factors give a set over tuples ``(s_1, ..., s_n)``; sampled
    factors give a sampled set on the concatenated coordinates. A single
    factor is returned unchanged.
    """
    if not sets:
        raise DomainError("min_product needs at least one factor")
    if len(sets) == 1:
        return sets[0]
    if all(isinstance(A, FiniteFuzzySet) for A in sets):
        size = math.prod(len(A.universe) for A in sets)
        if size > cap:
            raise CapacityError(f"product universe has {size} elements (cap {cap})")
        universe = list(itertools.product(*(A.universe for A in sets)))
        return FiniteFuzzySet({p: min(A(s) for A, s in zip(sets, p)) for p in universe}, universe)
    if all(isinstance(A, SampledFuzzySet) for A in sets):
        size = math.prod(len(A.sample_grid) for A in sets)
        if size > cap:
            raise CapacityError(f"product grid has {size} points (cap {cap})")
        dims = [A.carrier_dim for A in sets]
        offsets = list(itertools.accumulate(dims, initial=0))

        def rule(p):
            return min(A(p[lo:hi]) for A, lo, hi in zip(sets, offsets, offsets[1:]))

        grid = [sum(parts, ()) for parts in itertools.product(*(A.sample_grid for A in sets))]
        return SampledFuzzySet(sum(dims), rule, grid)
    raise DomainError("min_product: cannot mix finite and sampled fuzzy sets")


def zadeh_image(h: Callable, A: FuzzySet, codomain: Sequence[Hashable] | None = None) -> FiniteFuzzySet:
    """Push ``A`` forward along the point map ``h``: ``(hA)(y) = sup{A(x) : h(x) = y}``.

    Empty fibres get membership 0. The result lives on ``codomain`` when
    given, otherwise on the set of attained images (in first-seen order).
    For a sampled ``A`` the supremum runs over the sample grid.
    """
    image: dict[Hashable, Fraction | float] = {}
    if codomain is not None:
        image = {y: Fraction(0) for y in codomain}
    for x, v in A.items():
        y = h(x)
        if codomain is not None and y not in image:
            raise DomainError(f"image {y!r} of {x!r} is outside the codomain")
        image[y] = max(image.get(y, Fraction(0)), v)
    return FiniteFuzzySet(image, list(image))


def vadd(u, v):
    if isinstance(u, tuple):
        if len(u) != len(v):
            raise DomainError("vector lengths differ")
        return tuple(a + b for a, b in zip(u, v))
    return u + v


def vscale(lam, u):
    if isinstance(u, tuple):
        return tuple(lam * a for a in u)
    return lam * u


def fuzzy_sum(*sets: FuzzySet, cap: int = PRODUCT_CAP) -> FiniteFuzzySet:
    """``A_1 + ... + A_n``: image of the min-product under vector addition."""
    if not sets:
        raise DomainError("fuzzy_sum needs at least one summand")
    finite = all(isinstance(A, FiniteFuzzySet) for A in sets)
    prod = min_product(*sets, cap=cap)
    if len(sets) == 1:
        return zadeh_image(lambda s: s, prod)
    if finite:
        def add(p):
            total = p[0]
            for s in p[1:]:
                total = vadd(total, s)
            return total
    else:
        dims = [A.carrier_dim for A in sets]
        if len(set(dims)) != 1:
            raise DomainError("summands live in spaces of different dimension")
        n = dims[0]

        def add(p):
            return tuple(sum(p[i + k * n] for k in range(len(sets))) for i in range(n))
    return zadeh_image(add, prod)


def scalar_mul(lam, D: FuzzySet) -> FiniteFuzzySet:
    """``lam * D``: image of ``D`` under ``s -> lam * s``."""
    return zadeh_image(lambda s: vscale(lam, s), D)


def preimage(phi: Callable, U: FuzzySet, domain: Sequence[Hashable]) -> FuzzySet:
    """``phi^{-1}(U)(s) = U(phi(s))`` on ``domain``.

    A finite ``U`` gives a finite set on ``domain``; a sampled ``U`` gives a
    sampled set whose grid is ``domain`` (points of R^k).
    """
    if isinstance(U, FiniteFuzzySet):
        return FiniteFuzzySet({s: U(phi(s)) for s in domain}, domain)
    domain = [tuple(p) for p in domain]
    if not domain:
        raise DomainError("preimage needs a nonempty domain grid")
    return SampledFuzzySet(len(domain[0]), lambda s: U(phi(s)), domain)


# -- direct sums ---------------------------------------------------------

def _solve_exact(columns: Sequence[Sequence[Fraction]], rhs: Sequence) -> list[Fraction] | None:
    """Solve ``sum_j x_j columns[j] = rhs`` exactly; None if inconsistent."""
    n = len(rhs)
    m = len(columns)
    rows = [[Fraction(columns[j][i]) for j in range(m)] + [Fraction(rhs[i])] for i in range(n)]
    pivots = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][m] != 0 for i in range(r, n)):
        return None
    x = [Fraction(0)] * m
    for i, c in enumerate(pivots):
        x[c] = rows[i][m]
    return x


class Decomposition:
    """Splitting of R^n as ``span(basis0) (+) span(basis1)``.

    Calling it on ``x`` returns the coordinates ``(x0, x1)`` of the unique
    decomposition, each expressed in its own basis. Construction fails
    when the two bases do not form a basis of R^n (decomposition would be
    non-unique or not exist).
    """

    def __init__(self, dim: int, basis0: Sequence[Sequence], basis1: Sequence[Sequence]):
        cols = [tuple(Fraction(v) for v in b) for b in (*basis0, *basis1)]
        if any(len(b) != dim for b in cols):
            raise DomainError("basis vectors have the wrong dimension")
        if len(cols) != dim or _rank(cols) != dim:
            raise DomainError("subspaces are not complementary: decomposition is not unique")
        self.dim = dim
        self.k = len(basis0)
        self._cols = cols

    def __call__(self, x: Sequence) -> tuple[tuple, tuple]:
        if len(x) != self.dim:
            raise DomainError(f"point {tuple(x)} is not in R^{self.dim}")
        coords = _solve_exact(self._cols, x)
        return tuple(coords[: self.k]), tuple(coords[self.k:])


def _rank(cols) -> int:
    basis: list[tuple] = []
    for c in cols:
        if _solve_exact(basis, c) is None:
            basis.append(c)
    return len(basis)


def direct_sum(U0: FuzzySet, U1: FuzzySet, decompose: Callable[[Sequence], tuple],
               grid: Iterable[Sequence] | None = None, dim: int | None = None) -> FuzzySet:
    """``(U0 (+) U1)(x) = min(U0(x0), U1(x1))`` with ``x = x0 + x1`` unique.

    ``decompose`` maps a point to its component coordinates, typically a
    :class:`Decomposition`. For sampled summands the result is a sampled
    set on ``grid`` (default: the grid of ``U0`` when the ambient space is
    the first summand); for finite summands ``grid`` lists the universe.
    """
    if dim is None:
        dim = getattr(decompose, "dim", None)

    def rule(x):
        parts = decompose(x)
        if len(parts) != 2:
            raise DomainError("decomposition must return exactly two components")
        return min(U0(parts[0]), U1(parts[1]))

    if isinstance(U0, SampledFuzzySet) and isinstance(U1, SampledFuzzySet):
        if grid is None:
            grid = U0.sample_grid
        grid = [tuple(p) for p in grid]
        return SampledFuzzySet(dim if dim is not None else len(grid[0]), rule, grid)
    if grid is None:
        raise DomainError("direct_sum over finite summands needs the ambient universe")
    grid = list(grid)
    return FiniteFuzzySet({x: rule(x) for x in grid}, grid)


def random_fuzzy_set(universe: Sequence[Hashable], rng, q: int = 10) -> FiniteFuzzySet:
    """Memberships drawn uniformly from the grid ``{0, 1/q, ..., 1}``."""
    return FiniteFuzzySet({s: Fraction(int(rng.integers(0, q + 1)), q) for s in universe}, universe)


@checker
def lattice_laws_check(trials: int = 200, size: int = 5, q: int = 10, seed: int = 42) -> CheckReport:
    """Exact max/min lattice laws, De Morgan, involution and t-cut antitonicity on random sets."""
    rng = np.random.default_rng(seed)
    universe = list(range(size))
    U, I, C = fuzzy_union, fuzzy_intersection, fuzzy_complement
    laws = {
        "union-commutative": lambda A, B, D: U(A, B) == U(B, A),
        "intersection-commutative": lambda A, B, D: I(A, B) == I(B, A),
        "union-associative": lambda A, B, D: U(U(A, B), D) == U(A, U(B, D)),
        "intersection-associative": lambda A, B, D: I(I(A, B), D) == I(A, I(B, D)),
        "idempotence": lambda A, B, D: U(A, A) == A and I(A, A) == A,
        "absorption": lambda A, B, D: U(A, I(A, B)) == A and I(A, U(A, B)) == A,
        "de-morgan": lambda A, B, D: C(U(A, B)) == I(C(A), C(B)) and C(I(A, B)) == U(C(A), C(B)),
        "involution": lambda A, B, D: C(C(A)) == A,
        "tcut-antitone": lambda A, B, D: all(t_cut(A, Fraction(j, q)) <= t_cut(A, Fraction(i, q))
                                             for i in range(q + 1) for j in range(i, q + 1)),
    }
    for trial in range(trials):
        A, B, D = (random_fuzzy_set(universe, rng, q) for _ in range(3))
        for law, holds in laws.items():
            if not holds(A, B, D):
                return report("fuzzy_core.lattice_laws", False, witness={"law": law, "A": A, "B": B, "D": D},
                              trials=trials, size=size, q=q, seed=seed)
    return report("fuzzy_core.lattice_laws", True, max_error=0, trials=trials, size=size, q=q, seed=seed,
                  laws=sorted(laws))
