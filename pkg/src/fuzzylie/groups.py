"""Concrete matrix-group models realizing the built-in Lie algebras.

* ``su2``: unit quaternions ``(w, x, y, z)``. The basis ``X_k = -(i/2) sigma_k``
  corresponds to the pure quaternions ``e_k / 2``, so ``[X_1, X_2] = X_3``
  (the cross-product algebra) and ``exp(t X_k)`` rotates by angle ``t``.
* ``heisenberg``: unipotent matrices ``[[1, a, c], [0, 1, b], [0, 0, 1]]``
  with ``X = E12``, ``Y = E23``, ``Z = E13``.

Both models work with exact ``Fraction`` inputs where the formulas allow
(Heisenberg throughout; SU(2) only for products).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError


# -- quaternion arrays ---------------------------------------------------

def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternion arrays of shape ``(..., 4)``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ], axis=-1)


def qconj(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qexp(v: np.ndarray) -> np.ndarray:
    """``exp`` of su(2) coordinates ``(..., 3)``: ``(cos(|v|/2), sin(|v|/2) v/|v|)``."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)
    half = 0.5 * theta
    # sin(t/2)/t -> 1/2 as t -> 0
    scale = np.where(theta > 1e-8, np.sin(half) / np.where(theta > 0, theta, 1.0),
                     0.5 - theta**2 / 48.0)
    return np.concatenate([np.cos(half)[..., None], v * scale[..., None]], axis=-1)


def height(q: np.ndarray) -> np.ndarray:
    """Coset invariant ``w^2 + z^2 - x^2 - y^2`` (``|a|^2 - |b|^2``)."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return w * w + z * z - x * x - y * y


def rotation_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrices of (unit) quaternions, shape ``(..., 3, 3)``."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.stack([
        np.stack([w*w + x*x - y*y - z*z, 2 * (x*y - w*z), 2 * (x*z + w*y)], axis=-1),
        np.stack([2 * (x*y + w*z), w*w - x*x + y*y - z*z, 2 * (y*z - w*x)], axis=-1),
        np.stack([2 * (x*z - w*y), 2 * (y*z + w*x), w*w - x*x - y*y + z*z], axis=-1),
    ], axis=-2)


def normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


@dataclass(frozen=True)
class SU2Element:
    """A point of SU(2) as a unit quaternion; renormalized on construction."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        vals = [float(v) for v in (self.w, self.x, self.y, self.z)]
        norm = math.sqrt(sum(v * v for v in vals))
        if not norm > 0 or not math.isfinite(norm):
            raise DomainError("quaternion must be nonzero and finite")
        for name, v in zip("wxyz", vals):
            object.__setattr__(self, name, v / norm)

    @classmethod
    def from_array(cls, q: Sequence[float]) -> "SU2Element":
        return cls(*(float(v) for v in q))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.w, self.x, self.y, self.z], dtype=dtype or float)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __matmul__(self, other: "SU2Element") -> "SU2Element":
        return su2_mul(self, other)


SU2_IDENTITY = SU2Element(1.0, 0.0, 0.0, 0.0)


def su2_mul(g: SU2Element, h: SU2Element) -> SU2Element:
    return SU2Element.from_array(qmul(g.as_array(), h.as_array()))


def su2_inv(g: SU2Element) -> SU2Element:
    return SU2Element(g.w, -g.x, -g.y, -g.z)


def su2_exp(X: Sequence[float]) -> SU2Element:
    if len(X) != 3:
        raise DomainError("su(2) vectors have three coordinates")
    return SU2Element.from_array(qexp(np.array([float(v) for v in X])))


def su2_Ad(g: SU2Element) -> np.ndarray:
    """``Ad(g)`` on su(2) coordinates: the rotation matrix of ``g``."""
    return rotation_matrix(g.as_array())


# -- Heisenberg ----------------------------------------------------------

@dataclass(frozen=True)
class HeisenbergElement:
    """Unipotent ``[[1, a, c], [0, 1, b], [0, 0, 1]]``."""

    a: object
    b: object
    c: object

    def matrix(self) -> list[list]:
        return [[1, self.a, self.c], [0, 1, self.b], [0, 0, 1]]


HEIS_IDENTITY = HeisenbergElement(0, 0, 0)


def heis_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(g.a + h.a, g.b + h.b, g.c + h.c + g.a * h.b)


def heis_inv(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(-g.a, -g.b, g.a * g.b - g.c)


def heis_exp(X: Sequence) -> HeisenbergElement:
    """``exp(xX + yY + zZ) = I + N + N^2/2``; exact for rational input."""
    if len(X) != 3:
        raise DomainError("Heisenberg vectors have three coordinates")
    x, y, z = X
    return HeisenbergElement(x, y, z + x * y * Fraction(1, 2))


def heis_Ad(g: HeisenbergElement) -> list[list]:
    """Columns are ``g X_j g^{-1}``: ``(x, y, z) -> (x, y, z + a y - b x)``."""
    return [[1, 0, 0], [0, 1, 0], [-g.b, g.a, 1]]


# -- models --------------------------------------------------------------

class SU2Model:
    name = "su2"
    algebra_name = "so3_cross"
    identity = SU2_IDENTITY

    @staticmethod
    def mul(g, h):
        return su2_mul(g, h)

    @staticmethod
    def inv(g):
        return su2_inv(g)

    @staticmethod
    def exp(X):
        return su2_exp(X)

    @staticmethod
    def Ad(g) -> np.ndarray:
        return su2_Ad(g)


class HeisenbergModel:
    name = "heisenberg"
    algebra_name = "heisenberg"
    identity = HEIS_IDENTITY

    @staticmethod
    def mul(g, h):
        return heis_mul(g, h)

    @staticmethod
    def inv(g):
        return heis_inv(g)

    @staticmethod
    def exp(X):
        return heis_exp(X)

    @staticmethod
    def Ad(g) -> list[list]:
        return heis_Ad(g)


MODELS = {"su2": SU2Model, "heisenberg": HeisenbergModel}


def get_model(name_or_model):
    """Look a model up by name (``"su2"``, ``"heisenberg"``) or pass one through."""
    if not isinstance(name_or_model, str):
        return name_or_model
    try:
        return MODELS[name_or_model]
    except KeyError:
        raise DomainError(f"unsupported group model {name_or_model!r}") from None


def model_for_algebra(algebra_name: str):
    for model in MODELS.values():
        if model.algebra_name == algebra_name:
            return model
    raise DomainError(f"no group model realizes the algebra {algebra_name!r}")
