"""Decidable fuzzy-topology predicates on finite carriers.

A space is a carrier fuzzy set ``gamma`` plus a finite family of fuzzy
subsets of ``gamma``. Memberships are exact rationals; internally every
member is scaled by a common denominator to an integer row so the closure
sweeps are exact and vectorized.

Conventions fixed here (the definitions leave them open):

* constants ``kappa`` in the first axiom range over the grid ``{k/q}``;
* a fuzzy point ``x_p`` lies in ``U`` iff ``p <= U(x)``;
* ``U & V = empty`` means the intersection is the zero fuzzy set;
* closed sets are complements relative to ``gamma``: ``gamma - U``;
* a separation ``U = v | d`` must use two nonzero open sets.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .fuzzy_core import FiniteFuzzySet, fuzzy_intersection, preimage, zadeh_image
from .report import CheckReport, checker, report

EXHAUSTIVE_COVER_LIMIT = 12


def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class FuzzyTopSpace:
    """Carrier ``gamma`` with a candidate family ``sigma`` of fuzzy subsets.

    The family is stored in a canonical order (lexicographic in the
    membership vector), so checks and their witnesses do not depend on the
    order in which members were supplied.
    """

    def __init__(self, carrier: FiniteFuzzySet, family: Iterable[FiniteFuzzySet], grid_q: int = 10):
        if grid_q < 1:
            raise DomainError("grid_q must be a positive integer")
        family = list(family)
        pts = carrier.universe
        for U in family:
            if not isinstance(U, FiniteFuzzySet) or set(U.universe) != set(pts):
                raise DomainError("family member is not a fuzzy set on the carrier universe")
            if not U <= carrier:
                raise DomainError(f"family member {U!r} is not a fuzzy subset of the carrier")
        if len(set(family)) != len(family):
            raise DomainError("family contains duplicate members")
        self.carrier = carrier
        self.grid_q = grid_q
        self.points: tuple[Hashable, ...] = pts
        family.sort(key=lambda U: tuple(_as_fraction(U(s)) for s in pts))
        self.family: tuple[FiniteFuzzySet, ...] = tuple(family)

        denoms = [grid_q] + [_as_fraction(v).denominator for v in carrier.values()]
        denoms += [_as_fraction(U(s)).denominator for U in family for s in pts]
        self.denom = math.lcm(*denoms)
        self._gamma = self.encode(carrier)
        self._rows = (np.array([self.encode(U) for U in family], dtype=np.int64)
                      .reshape(len(family), len(pts)))
        self._codes = self._row_codes(self._rows)
        self._code_set = set(self._codes.tolist()) if self._codes.dtype != object else set(self._codes)

    # -- encoding --------------------------------------------------------
    def encode(self, U: FiniteFuzzySet) -> np.ndarray:
        out = []
        for s in self.points:
            v = _as_fraction(U(s)) * self.denom
            if v.denominator != 1:
                raise DomainError(f"membership {U(s)} is not on the 1/{self.denom} lattice")
            out.append(int(v))
        return np.array(out, dtype=np.int64)

    def decode(self, row: Sequence[int]) -> FiniteFuzzySet:
        return FiniteFuzzySet({s: Fraction(int(v), self.denom) for s, v in zip(self.points, row)},
                              self.points)

    def _row_codes(self, rows: np.ndarray) -> np.ndarray:
        base = self.denom + 1
        n = rows.shape[-1]
        if n == 0:
            return np.zeros(rows.shape[:-1], dtype=np.int64)
        if base ** n < 2**62:
            weights = base ** np.arange(n, dtype=np.int64)
            return rows @ weights
        flat = rows.reshape(-1, n)
        return np.array([r.tobytes() for r in flat], dtype=object).reshape(rows.shape[:-1])

    def _contains_rows(self, rows: np.ndarray) -> np.ndarray:
        codes = self._row_codes(rows)
        if codes.dtype == object:
            return np.array([c in self._code_set for c in codes.ravel()], dtype=bool).reshape(codes.shape)
        return np.isin(codes, self._codes)

    def __contains__(self, U: FiniteFuzzySet) -> bool:
        return bool(self._contains_rows(self.encode(U)[None, :])[0])

    def index(self, U: FiniteFuzzySet) -> int:
        return self.family.index(U)

    def kappa(self, k: int) -> FiniteFuzzySet:
        """``kappa & gamma`` for the grid constant ``kappa = k/q``."""
        c = Fraction(k, self.grid_q)
        return FiniteFuzzySet({s: min(c, _as_fraction(v)) for s, v in self.carrier.items()},
                              self.points)

    def closed_sets(self) -> list[FiniteFuzzySet]:
        """Complements relative to the carrier, in family order."""
        return [FiniteFuzzySet({s: max(_as_fraction(self.carrier(s)) - _as_fraction(U(s)), Fraction(0))
                                for s in self.points}, self.points) for U in self.family]

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {"carrier": self.carrier.to_dict(), "family": [U.to_dict() for U in self.family],
                "grid_q": self.grid_q}

    @classmethod
    def from_dict(cls, data: Mapping) -> "FuzzyTopSpace":
        unknown = set(data) - {"carrier", "family", "grid_q"}
        if unknown:
            raise DomainError(f"unknown key(s) in space description: {sorted(unknown)}")
        if "carrier" not in data or "family" not in data:
            raise DomainError("space description needs 'carrier' and 'family'")
        carrier = FiniteFuzzySet.from_dict(data["carrier"])
        family = [FiniteFuzzySet.from_dict(U) for U in data["family"]]
        return cls(carrier, family, int(data.get("grid_q", 10)))

    def __repr__(self):
        return f"FuzzyTopSpace(points={len(self.points)}, family={len(self.family)}, q={self.grid_q})"


# -- family builders -----------------------------------------------------

def constant_family(carrier: FiniteFuzzySet, q: int = 10) -> list[FiniteFuzzySet]:
    """``{kappa & gamma}`` over the grid constants, deduplicated."""
    members = [FiniteFuzzySet({s: min(Fraction(k, q), _as_fraction(v)) for s, v in carrier.items()},
                              carrier.universe) for k in range(q + 1)]
    return list(dict.fromkeys(members))


def indiscrete_family(carrier: FiniteFuzzySet, q: int = 10) -> list[FiniteFuzzySet]:
    """Empty set, carrier, and all grid constants cut down to the carrier."""
    members = [FiniteFuzzySet.empty(carrier.universe), carrier, *constant_family(carrier, q)]
    return list(dict.fromkeys(members))


def power_family(carrier: FiniteFuzzySet, q: int = 10, cap: int = 20000) -> list[FiniteFuzzySet]:
    """Every fuzzy subset of the carrier with values in ``{k/q} | {gamma(x)}``."""
    levels = []
    for s, v in carrier.items():
        v = _as_fraction(v)
        vals = sorted({Fraction(k, q) for k in range(q + 1) if Fraction(k, q) <= v} | {v})
        levels.append(vals)
    size = math.prod(len(v) for v in levels)
    if size > cap:
        raise CapacityError(f"power family has {size} members (cap {cap})")
    pts = carrier.universe
    return [FiniteFuzzySet(dict(zip(pts, combo)), pts) for combo in itertools.product(*levels)]


# -- axioms --------------------------------------------------------------

def _first_pair_violation(rows: np.ndarray, op, contains) -> tuple[int, int, np.ndarray] | None:
    m = rows.shape[0]
    for i in range(m - 1):
        combined = op(rows[i][None, :], rows[i + 1:])
        ok = contains(combined)
        if not ok.all():
            j = int(np.argmin(ok))
            return i, i + 1 + j, combined[j]
    return None


@checker
def is_fuzzy_topology(space: FuzzyTopSpace) -> CheckReport:
    """Check the three fuzzy-topology axioms on a finite family.

    Closure under arbitrary unions of a finite family reduces to pairwise
    unions plus the empty union, and the empty union is the ``kappa = 0``
    constant covered by the first axiom.
    """
    name = "topology.is_fuzzy_topology"
    sizes = dict(family_size=len(space.family), grid_q=space.grid_q)
    for k in range(space.grid_q + 1):
        K = space.kappa(k)
        if K not in space:
            return report(name, False, witness={"axiom": "i", "kappa": Fraction(k, space.grid_q),
                                                "missing": K}, **sizes)
    rows = space._rows
    for axiom, op in (("ii", np.maximum), ("iii", np.minimum)):
        hit = _first_pair_violation(rows, op, space._contains_rows)
        if hit is not None:
            i, j, row = hit
            return report(name, False, witness={
                "axiom": axiom, "pair": [space.family[i], space.family[j]],
                "missing": space.decode(row)}, **sizes)
    return report(name, True, max_error=0, **sizes)


def _union_rows(rows: np.ndarray, n: int) -> np.ndarray:
    if rows.shape[0] == 0:
        return np.zeros(n, dtype=np.int64)
    return rows.max(axis=0)


@checker
def is_open_base(B: Iterable[FiniteFuzzySet], space: FuzzyTopSpace, strict: bool = False) -> CheckReport:
    """Every member of the family must be the union of members of ``B``.

    The representing subfamily is taken to be the maximal one (all members
    of ``B`` below the target), which is unique by construction. With
    ``strict=True`` the representation must also be irredundant, i.e. no
    proper subfamily yields the same union; that is the only way two
    different subfamilies could generate the same member.
    """
    name = "topology.is_open_base"
    B = list(dict.fromkeys(B))
    for b in B:
        if b not in space:
            raise DomainError(f"base member {b!r} is not in the family")
    brows = np.array([space.encode(b) for b in B], dtype=np.int64).reshape(len(B), len(space.points))
    n = len(space.points)
    for V, vrow in zip(space.family, space._rows):
        below = np.all(brows <= vrow[None, :], axis=1)
        gen = brows[below]
        if not np.array_equal(_union_rows(gen, n), vrow):
            return report(name, False, witness={"reason": "not representable", "member": V,
                                                "best_union": space.decode(_union_rows(gen, n))},
                          base_size=len(B))
        if strict:
            for k in range(gen.shape[0]):
                rest = np.delete(gen, k, axis=0)
                if np.array_equal(_union_rows(rest, n), vrow):
                    used = [b for b, keep in zip(B, below) if keep]
                    return report(name, False, witness={"reason": "not unique", "member": V,
                                                        "redundant": used[k]}, base_size=len(B))
    return report(name, True, max_error=0, base_size=len(B), strict=strict)


def _heights(space: FuzzyTopSpace, col: int) -> list[int]:
    g = int(space._gamma[col])
    step = space.denom // space.grid_q
    hs = {k * step for k in range(1, space.grid_q + 1) if k * step <= g}
    if g > 0:
        hs.add(g)
    return sorted(hs)


@checker
def is_hausdorff(space: FuzzyTopSpace) -> CheckReport:
    """Fuzzy points with distinct supports must have disjoint open neighbourhoods.

    Heights range over the grid (and the carrier value itself) up to the
    carrier value at each support; the two heights vary independently.
    """
    name = "topology.is_hausdorff"
    A = space._rows
    disjoint = np.all(np.minimum(A[:, None, :], A[None, :, :]) == 0, axis=2)
    n = len(space.points)
    for x, y in itertools.combinations(range(n), 2):
        for p in _heights(space, x):
            rows = A[:, x] >= p
            for r in _heights(space, y):
                cols = A[:, y] >= r
                if not disjoint[np.ix_(rows, cols)].any():
                    return report(name, False, witness={
                        "x": space.points[x], "p": Fraction(p, space.denom),
                        "y": space.points[y], "r": Fraction(r, space.denom)},
                        family_size=len(space.family))
    return report(name, True, max_error=0, family_size=len(space.family), pairs=n * (n - 1) // 2)


def _minimal_subcover(rows: np.ndarray, target: np.ndarray) -> tuple[int, ...]:
    idx = range(rows.shape[0])
    n = rows.shape[1]
    for k in range(rows.shape[0] + 1):
        for combo in itertools.combinations(idx, k):
            if np.all(_union_rows(rows[list(combo)], n) >= target):
                return combo
    raise AssertionError("a cover always covers its own shrinkage")


@checker
def is_compact(space: FuzzyTopSpace, eps, covers: Sequence[Sequence[FiniteFuzzySet]] | None = None) -> CheckReport:
    """Every open cover of ``gamma`` has a finite subfamily covering ``gamma_eps``.

    ``gamma_eps(x) = gamma(x) - eps`` where positive, else 0. Without
    explicit ``covers`` the search runs over all subfamilies, which is only
    allowed for at most 12 members. The report records, for the cover that
    needs the largest sub-cover, the minimal ``beta_0`` found.
    """
    name = "topology.is_compact"
    eps = _as_fraction(eps)
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    scaled = eps * space.denom
    g = space._gamma
    # integer rows: union >= gamma_eps  <=>  union >= ceil(gamma_eps * denom)
    target = np.array([math.ceil(max(int(v) - scaled, 0)) for v in g], dtype=np.int64)
    A = space._rows
    m, n = A.shape

    if covers is None:
        if m > EXHAUSTIVE_COVER_LIMIT:
            raise CapacityError(f"{m} members: exhaustive cover search is limited to "
                                f"{EXHAUSTIVE_COVER_LIMIT}; pass explicit covers")
        unions = np.zeros((1 << m, n), dtype=np.int64)
        for mask in range(1, 1 << m):
            low = (mask & -mask).bit_length() - 1
            unions[mask] = np.maximum(unions[mask & (mask - 1)], A[low])
        good = np.all(unions >= target[None, :], axis=1)
        cover_masks = [mask for mask in range(1 << m) if np.array_equal(unions[mask], g)]
        worst: tuple[int, ...] | None = None
        for mask in cover_masks:
            bits = [i for i in range(m) if mask >> i & 1]
            found = None
            for k in range(len(bits) + 1):
                for combo in itertools.combinations(bits, k):
                    if good[sum(1 << i for i in combo)]:
                        found = combo
                        break
                if found is not None:
                    break
            if worst is None or len(found) > len(worst):
                worst = found
        beta0 = [space.family[i] for i in (worst or ())]
        return report(name, True, max_error=0, covers_checked=len(cover_masks), eps=eps,
                      beta0=beta0, beta0_size=len(beta0), exhaustive=True)

    worst_sets: list[FiniteFuzzySet] | None = None
    for cover in covers:
        cover = list(cover)
        for U in cover:
            if U not in space:
                raise DomainError(f"cover member {U!r} is not open")
        rows = np.array([space.encode(U) for U in cover], dtype=np.int64).reshape(len(cover), n)
        if not np.array_equal(_union_rows(rows, n), g):
            raise DomainError("supplied family does not cover the carrier")
        combo = _minimal_subcover(rows, target)
        if worst_sets is None or len(combo) > len(worst_sets):
            worst_sets = [cover[i] for i in combo]
    worst_sets = worst_sets or []
    return report(name, True, max_error=0, covers_checked=len(covers), eps=eps,
                  beta0=worst_sets, beta0_size=len(worst_sets), exhaustive=False)


def _separation(space: FuzzyTopSpace, urow: np.ndarray) -> tuple[int, int] | None:
    A = space._rows
    nonzero = np.flatnonzero(A.any(axis=1))
    for a, i in enumerate(nonzero):
        rest = nonzero[a + 1:]
        if rest.size == 0:
            break
        union_ok = np.all(np.maximum(A[i][None, :], A[rest]) == urow[None, :], axis=1)
        disjoint = np.all(np.minimum(A[i][None, :], A[rest]) == 0, axis=1)
        hits = np.flatnonzero(union_ok & disjoint)
        if hits.size:
            return int(i), int(rest[hits[0]])
    return None


@checker
def is_separated(U: FiniteFuzzySet, space: FuzzyTopSpace) -> CheckReport:
    """Search open ``v != d``, both nonzero, with ``U = v | d`` and ``v & d = 0``.

    A passing report's witness is the separating pair.
    """
    name = "topology.is_separated"
    hit = _separation(space, space.encode(U))
    if hit is None:
        m = len(space.family)
        return report(name, False, witness={"reason": "no separating pair", "subset": U,
                                            "pairs_searched": m * (m - 1) // 2})
    i, j = hit
    return report(name, True, max_error=0, witness={"v": space.family[i], "delta": space.family[j]})


@checker
def is_connected(space: FuzzyTopSpace) -> CheckReport:
    """Connected iff no closed subset admits a nontrivial fuzzy separation."""
    name = "topology.is_connected"
    for closed in dict.fromkeys(space.closed_sets()):
        hit = _separation(space, space.encode(closed))
        if hit is not None:
            i, j = hit
            return report(name, False, witness={"closed_set": closed, "v": space.family[i],
                                                "delta": space.family[j]})
    return report(name, True, max_error=0, closed_sets=len(space.family))


# -- maps ----------------------------------------------------------------

class ProperFunction:
    """The fuzzy proper function induced by a point map.

    ``F(x, y) = lambda(x)`` if ``y = point_map(x)`` and 0 otherwise, where
    ``lambda`` is the source carrier. Construction checks that this
    relation stays below ``min(lambda(x), gamma_Y(y))``.
    """

    def __init__(self, source: FuzzyTopSpace, target: FuzzyTopSpace, point_map: Callable | Mapping):
        phi = point_map.__getitem__ if isinstance(point_map, Mapping) else point_map
        ys = set(target.points)
        for x in source.points:
            try:
                y = phi(x)
            except (KeyError, TypeError):
                raise DomainError(f"point map is not defined at {x!r}") from None
            if y not in ys:
                raise DomainError(f"point map sends {x!r} outside the target carrier")
            if source.carrier(x) > target.carrier(y):
                raise DomainError(f"F({x!r}, {y!r}) = {source.carrier(x)} exceeds the target carrier")
        self.source = source
        self.target = target
        self.point_map = phi

    def relation(self) -> FiniteFuzzySet:
        """``F`` as a fuzzy subset of ``X x Y``."""
        lam = self.source.carrier
        pairs = [(x, y) for x in self.source.points for y in self.target.points]
        return FiniteFuzzySet({(x, y): lam(x) if self.point_map(x) == y else 0 for x, y in pairs}, pairs)

    def preimage(self, U: FiniteFuzzySet) -> FiniteFuzzySet:
        """``F^{-1}(U)(x) = sup_y min(F(x, y), U(y)) = min(lambda(x), U(phi(x)))``."""
        pulled = preimage(self.point_map, U, self.source.points)
        return fuzzy_intersection(pulled, self.source.carrier)

    def image(self, D: FiniteFuzzySet) -> FiniteFuzzySet:
        """``F(D)(y) = sup_x min(D(x), F(x, y))``, the Zadeh image for ``D <= lambda``."""
        clipped = fuzzy_intersection(D, self.source.carrier)
        return zadeh_image(self.point_map, clipped, self.target.points)

    def is_bijective(self) -> bool:
        images = [self.point_map(x) for x in self.source.points]
        return len(set(images)) == len(images) == len(self.target.points)


@checker
def is_fuzzy_continuous(F: ProperFunction) -> CheckReport:
    name = "topology.is_fuzzy_continuous"
    for U in F.target.family:
        P = F.preimage(U)
        if P not in F.source:
            return report(name, False, witness={"open_set": U, "preimage": P})
    return report(name, True, max_error=0, checked=len(F.target.family))


@checker
def is_fuzzy_open(F: ProperFunction) -> CheckReport:
    name = "topology.is_fuzzy_open"
    for D in F.source.family:
        img = F.image(D)
        if img not in F.target:
            return report(name, False, witness={"open_set": D, "image": img})
    return report(name, True, max_error=0, checked=len(F.source.family))


@checker
def is_fuzzy_homeomorphism(F: ProperFunction) -> CheckReport:
    name = "topology.is_fuzzy_homeomorphism"
    if not F.is_bijective():
        return report(name, False, witness={"reason": "point map is not bijective",
                                            "images": [F.point_map(x) for x in F.source.points]})
    for sub in (is_fuzzy_continuous(F), is_fuzzy_open(F)):
        if not sub.passed:
            return report(name, False, witness={"reason": sub.name, **sub.witness})
    return report(name, True, max_error=0)


def _table_lookup(group_table) -> Callable:
    if callable(group_table):
        return group_table
    sample = next(iter(group_table))
    if isinstance(sample, tuple):
        return lambda a, b: group_table[(a, b)]
    return lambda a, b: group_table[a][b]


def validate_group(elements: Sequence[Hashable], group_table) -> tuple[Callable, Hashable, dict]:
    """Check the group axioms; return ``(mul, identity, inverse_map)``."""
    mul = _table_lookup(group_table)
    els = list(elements)
    eset = set(els)
    try:
        for a, b in itertools.product(els, repeat=2):
            if mul(a, b) not in eset:
                raise DomainError(f"group table not closed: {a!r}*{b!r} = {mul(a, b)!r}")
    except (KeyError, IndexError, TypeError):
        raise DomainError("group table is not total on the carrier") from None
    for a, b, c in itertools.product(els, repeat=3):
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            raise DomainError(f"group table not associative at ({a!r}, {b!r}, {c!r})")
    ident = next((e for e in els if all(mul(e, a) == a == mul(a, e) for a in els)), None)
    if ident is None:
        raise DomainError("group table has no identity")
    inverse = {}
    for a in els:
        inv = next((b for b in els if mul(a, b) == ident == mul(b, a)), None)
        if inv is None:
            raise DomainError(f"{a!r} has no inverse")
        inverse[a] = inv
    return mul, ident, inverse


def cyclic_group_table(n: int) -> dict:
    """Addition table of Z/n on the elements 0..n-1."""
    return {(a, b): (a + b) % n for a in range(n) for b in range(n)}


@checker
def is_compatible_group_topology(group_table, space: FuzzyTopSpace) -> CheckReport:
    """Multiplication and inversion must be fuzzy continuous.

    ``G x G`` carries the product topology generated by the min-products
    ``U x V`` of open sets; a preimage is open there iff it equals the union
    of the basic open sets below it.
    """
    name = "topology.is_compatible_group_topology"
    pts = space.points
    mul, _, inverse = validate_group(pts, group_table)
    A = space._rows
    m, n = A.shape
    g = space._gamma
    index = {s: k for k, s in enumerate(pts)}
    prod_idx = np.array([[index[mul(a, b)] for b in pts] for a in pts])
    inv_idx = np.array([index[inverse[a]] for a in pts])
    boxes = np.minimum(A[:, None, :, None], A[None, :, None, :]).reshape(m * m, n, n)
    gamma2 = np.minimum(g[:, None], g[None, :])

    for W, wrow in zip(space.family, A):
        P = np.minimum(gamma2, wrow[prod_idx])
        below = np.all(boxes <= P[None, :, :], axis=(1, 2))
        union = boxes[below].max(axis=0) if below.any() else np.zeros_like(P)
        if not np.array_equal(union, P):
            pre = FiniteFuzzySet({(a, b): Fraction(int(P[i, j]), space.denom)
                                  for i, a in enumerate(pts) for j, b in enumerate(pts)},
                                 [(a, b) for a in pts for b in pts])
            return report(name, False, witness={"map": "multiplication", "open_set": W,
                                                "preimage": pre})
    for W, wrow in zip(space.family, A):
        P = np.minimum(g, wrow[inv_idx])
        if not space._contains_rows(P[None, :])[0]:
            return report(name, False, witness={"map": "inversion", "open_set": W,
                                                "preimage": space.decode(P)})
    return report(name, True, max_error=0, family_size=m, group_order=n)
