"""Fuzzy subspaces, fuzzy Lie subalgebras and fuzzy Lie ideals.

All quantifiers run over a finite sample grid and a finite set of
scalars, so a pass is grid-relative while a fail is a genuine
counterexample. Sums, multiples and brackets of grid points are
evaluated through the membership rule directly, even when they fall
off the grid.

The bracket clause of a subalgebra uses ``min(U(s), U(t))``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .errors import DomainError
from .fuzzy_core import Decomposition, SampledFuzzySet, direct_sum, t_cut, unit_value, vadd, vscale
from .lie import LieAlgebraSpec, bracket, resolve_algebra
from .report import CheckReport, checker, report


class PiecewiseRule:
    """Membership rule chosen by the zero/nonzero pattern of the coordinates.

    ``cases`` is an ordered list of ``(pattern, value)``. Pattern characters
    are ``0`` (coordinate is zero), ``n`` (nonzero) and ``*`` (anything);
    the first matching case wins and a point no case matches gets 0.
    """

    def __init__(self, cases: Iterable[tuple[str, Any]]):
        self.cases = []
        for pattern, value in cases:
            if any(ch not in "0n*" for ch in pattern):
                raise DomainError(f"bad pattern {pattern!r}: use the characters 0, n, *")
            self.cases.append((pattern, unit_value(value)))
        lengths = {len(p) for p, _ in self.cases}
        if len(lengths) > 1:
            raise DomainError("all patterns of a rule must have the same length")
        self.dim = lengths.pop() if lengths else None

    def __call__(self, x: Sequence):
        if self.dim is not None and len(x) != self.dim:
            raise DomainError(f"point {tuple(x)} does not match pattern length {self.dim}")
        for pattern, value in self.cases:
            if all(ch == "*" or (ch == "0") == (v == 0) for ch, v in zip(pattern, x)):
                return value
        return Fraction(0)

    def to_list(self) -> list[dict]:
        return [{"pattern": p, "value": str(v) if isinstance(v, Fraction) else v}
                for p, v in self.cases]

    @classmethod
    def from_list(cls, data: Sequence[Mapping]) -> "PiecewiseRule":
        cases = []
        for entry in data:
            unknown = set(entry) - {"pattern", "value"}
            if unknown:
                raise DomainError(f"unknown key(s) in rule case: {sorted(unknown)}")
            cases.append((entry["pattern"], entry["value"]))
        return cls(cases)

    def __repr__(self):
        return f"PiecewiseRule({self.to_list()})"


def _exact(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return v


def _closed_under_negation(grid: Iterable[Sequence]) -> list[tuple]:
    pts = list(dict.fromkeys(tuple(_exact(v) for v in p) for p in grid))
    seen = set(pts)
    for p in list(pts):
        q = tuple(-v for v in p)
        if q not in seen:
            seen.add(q)
            pts.append(q)
    return pts


class FuzzyLieSet:
    """A sampled fuzzy set on the coordinates of a Lie algebra.

    The grid is closed under negation (missing negatives are appended in
    order) and the scalar samples always contain 0, 1 and -1.
    """

    def __init__(self, algebra, U: SampledFuzzySet, scalars: Iterable = (0, 1, -1)):
        self.algebra: LieAlgebraSpec = resolve_algebra(algebra)
        if U.carrier_dim != self.algebra.dim:
            raise DomainError(f"fuzzy set lives on R^{U.carrier_dim}, algebra has dimension {self.algebra.dim}")
        scal = list(dict.fromkeys(_exact(a) for a in scalars))
        for a in (0, 1, -1):
            if a not in scal:
                scal.append(Fraction(a))
        self.scalars: tuple = tuple(scal)
        self.U = U.with_grid(_closed_under_negation(U.sample_grid))

    @property
    def grid(self) -> tuple[tuple, ...]:
        return self.U.sample_grid

    def __call__(self, s):
        return self.U(s)

    def with_grid(self, grid) -> "FuzzyLieSet":
        return FuzzyLieSet(self.algebra, self.U.with_grid(grid), self.scalars)

    def __repr__(self):
        return f"FuzzyLieSet({self.algebra.name}, grid={len(self.grid)}, scalars={len(self.scalars)})"


@dataclass
class ViolationWitness:
    """The offending points and the two membership values compared (lhs < rhs)."""

    kind: str
    points: dict[str, Any]
    lhs: Any
    rhs: Any
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "points": self.points, "lhs": self.lhs, "rhs": self.rhs}
        out.update(self.extra)
        return out


def _params(F: FuzzyLieSet) -> dict:
    return {"algebra": F.algebra.name, "grid_size": len(F.grid), "scalars": len(F.scalars)}


def _subspace_violation(F: FuzzyLieSet) -> ViolationWitness | None:
    U = F.U
    for s in F.grid:
        us = U(s)
        for t in F.grid:
            rhs = min(us, U(t))
            st = vadd(s, t)
            lhs = U(st)
            if lhs < rhs:
                return ViolationWitness("sum", {"s": s, "t": t, "s+t": st}, lhs, rhs)
    for a in F.scalars:
        for s in F.grid:
            AS = vscale(a, s)
            lhs, rhs = U(AS), U(s)
            if lhs < rhs:
                return ViolationWitness("scalar", {"alpha": a, "s": s, "alpha*s": AS}, lhs, rhs)
    return None


def _cut_violation(F: FuzzyLieSet) -> ViolationWitness | None:
    # each nonempty t-cut must be closed under sums and scalar multiples
    U = F.U
    levels = sorted({v for v in U.values() if v > 0})
    for lev in levels:
        members = t_cut(U, lev)
        cut = [s for s in F.grid if s in members]
        for s in cut:
            for t in cut:
                st = vadd(s, t)
                if U(st) < lev:
                    return ViolationWitness("cut-sum", {"s": s, "t": t, "s+t": st}, U(st), lev,
                                            {"level": lev})
            for a in F.scalars:
                AS = vscale(a, s)
                if U(AS) < lev:
                    return ViolationWitness("cut-scalar", {"alpha": a, "s": s, "alpha*s": AS},
                                            U(AS), lev, {"level": lev})
    return None


def _bracket_violation(F: FuzzyLieSet, one_sided: bool) -> ViolationWitness | None:
    U = F.U
    for s in F.grid:
        us = U(s)
        for t in F.grid:
            b = bracket(F.algebra, s, t)
            lhs = U(b)
            ut = U(t)
            rhs = us if one_sided else min(us, ut)
            if lhs < rhs:
                extra = {"U(s)": us, "U(t)": ut}
                if one_sided:
                    extra["max(U(s),U(t))"] = max(us, ut)
                return ViolationWitness("ideal-bracket" if one_sided else "bracket",
                                        {"s": s, "t": t, "[s,t]": b}, lhs, rhs, extra)
    return None


@checker
def is_fuzzy_subspace(F: FuzzyLieSet) -> CheckReport:
    """``U(s+t) >= min(U(s), U(t))`` and ``U(a s) >= U(s)`` on the grid."""
    w = _subspace_violation(F)
    return report("fuzzy_lie.subspace", w is None, witness=w, **_params(F))


@checker
def is_fuzzy_subalgebra(F: FuzzyLieSet) -> CheckReport:
    """Subspace, t-cut closure, then ``U([s,t]) >= min(U(s), U(t))``."""
    w = _subspace_violation(F) or _cut_violation(F) or _bracket_violation(F, one_sided=False)
    return report("fuzzy_lie.subalgebra", w is None, witness=w, **_params(F))


@checker
def is_fuzzy_ideal(F: FuzzyLieSet) -> CheckReport:
    """Subspace clauses, then ``U([s,t]) >= U(s)`` on the grid."""
    w = _subspace_violation(F) or _bracket_violation(F, one_sided=True)
    return report("fuzzy_lie.ideal", w is None, witness=w, **_params(F))


EXAMPLE_RULE = PiecewiseRule([("000", 1), ("n00", Fraction(1, 2))])

EXAMPLE_GRID = [(0, 0, 0), (1, 0, 0), (-1, 0, 0), (2, 0, 0), (1, 1, 1), (0, -1, 1), (0, 1, 0), (0, 0, 1)]

EXAMPLE_SCALARS = (0, 1, -1, 2)


def example_2_2(grid: Sequence[Sequence] | None = None) -> FuzzyLieSet:
    """The cross-product fixture on ``(a, b, c)`` coordinates.

    ``U0`` is 1 at the origin, 1/2 on the nonzero ``a`` axis and 0
    elsewhere; ``U1`` is 1 on the zero summand, and the fixture is their
    direct sum.
    """
    pts = [tuple(Fraction(v) for v in p) for p in (grid or EXAMPLE_GRID)]
    U0 = SampledFuzzySet(3, EXAMPLE_RULE, pts)
    U1 = SampledFuzzySet(0, lambda _: 1, [()])
    split = Decomposition(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [])
    U = direct_sum(U0, U1, split, grid=pts)
    return FuzzyLieSet("so3_cross", U, EXAMPLE_SCALARS)


def from_dict(data: Mapping) -> FuzzyLieSet:
    """Load ``{"algebra", "rule", "grid", "scalars"}``; the rule is a piecewise list."""
    unknown = set(data) - {"algebra", "rule", "grid", "scalars"}
    if unknown:
        raise DomainError(f"unknown key(s) in fuzzy Lie set: {sorted(unknown)}")
    try:
        algebra = resolve_algebra(data["algebra"])
        rule = PiecewiseRule.from_list(data["rule"])
        grid = [tuple(_exact(v) for v in p) for p in data["grid"]]
    except KeyError as exc:
        raise DomainError(f"fuzzy Lie set is missing {exc.args[0]!r}") from None
    scalars = [_exact(a) for a in data.get("scalars", ["0", "1", "-1"])]
    return FuzzyLieSet(algebra, SampledFuzzySet(algebra.dim, rule, grid), scalars)


def from_json(text: str) -> FuzzyLieSet:
    return from_dict(json.loads(text))
