"""Group elements, the canonicalization result contract, and basic orbit maps.

Every orbit map in this package returns a :class:`CanonicalResult`: the
selected orbit element together with the group element that produced it,
so the transformation can be undone (see :func:`equivariant_wrap`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Generic, TypeVar

import numpy as np

X = TypeVar("X")
G = TypeVar("G")

TAU = 2.0 * math.pi

# Sums within this distance of a full turn snap to angle 0 so that
# compose(a, invert(a)) is the identity exactly despite rounding.
_FULL_TURN_SNAP = 4.0 * np.finfo(float).eps * TAU


@dataclass(frozen=True)
class Rotation2D:
    """Planar rotation, angle in radians normalized to [0, 2*pi)."""

    angle: float

    def __post_init__(self) -> None:
        a = float(self.angle) % TAU
        if a >= TAU or a < 0.0:  # % can round up to TAU for tiny negatives
            a = 0.0
        object.__setattr__(self, "angle", a)

    def compose(self, other: "Rotation2D") -> "Rotation2D":
        s = self.angle + other.angle
        if abs(s - TAU) <= _FULL_TURN_SNAP:
            s = 0.0
        elif s >= TAU:
            s -= TAU
        return Rotation2D(s)

    def invert(self) -> "Rotation2D":
        if self.angle == 0.0:
            return Rotation2D(0.0)
        return Rotation2D(TAU - self.angle)

    def matrix(self) -> np.ndarray:
        """2x2 matrix [[cos, -sin], [sin, cos]]."""
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    @property
    def degrees(self) -> float:
        return math.degrees(self.angle)


@dataclass(frozen=True)
class RigidSimilarity3D:
    """Scaled rigid motion acting on row-vector points: x -> scale * x @ rotation + translation.

    ``rotation`` is a 3x3 orthogonal matrix (determinant +1 or -1, the
    improper case arises from PCA sign fixing), ``scale`` is strictly
    positive.
    """

    rotation: np.ndarray
    translation: np.ndarray
    scale: float = 1.0

    def __post_init__(self) -> None:
        rot = np.array(self.rotation, dtype=float)
        tr = np.array(self.translation, dtype=float).reshape(3)
        if rot.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if not np.allclose(rot @ rot.T, np.eye(3), atol=1e-12):
            raise ValueError("rotation must be orthogonal")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        rot.setflags(write=False)
        tr.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tr)
        object.__setattr__(self, "scale", float(self.scale))

    def apply(self, points: np.ndarray) -> np.ndarray:
        return self.scale * (np.asarray(points, dtype=float) @ self.rotation) + self.translation

    def compose(self, first: "RigidSimilarity3D") -> "RigidSimilarity3D":
        """Transform equal to applying ``first``, then ``self``."""
        return RigidSimilarity3D(
            rotation=first.rotation @ self.rotation,
            translation=self.scale * (first.translation @ self.rotation) + self.translation,
            scale=self.scale * first.scale,
        )

    def invert(self) -> "RigidSimilarity3D":
        inv_rot = self.rotation.T
        return RigidSimilarity3D(
            rotation=inv_rot,
            translation=-(self.translation @ inv_rot) / self.scale,
            scale=1.0 / self.scale,
        )

    @classmethod
    def identity(cls) -> "RigidSimilarity3D":
        return cls(rotation=np.eye(3), translation=np.zeros(3), scale=1.0)


@dataclass(frozen=True)
class Permutation:
    """Bijection of {0, ..., n-1}; applied to a vector v as v[mapping]."""

    mapping: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.mapping, dtype=np.intp)
        if m.ndim != 1 or m.size == 0:
            raise ValueError("mapping must be a nonempty 1-d index array")
        if not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ValueError("mapping must be a bijection of 0..n-1")
        m.setflags(write=False)
        object.__setattr__(self, "mapping", m)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v)[self.mapping]

    def compose(self, first: "Permutation") -> "Permutation":
        """Permutation equal to applying ``first``, then ``self``."""
        return Permutation(first.mapping[self.mapping])

    def invert(self) -> "Permutation":
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(self.mapping.size)
        return Permutation(inv)


@dataclass(frozen=True)
class CanonicalResult(Generic[X, G]):
    """Selected orbit element plus the group element with element(input) = canonical.

    How an element applies depends on the orbit map that produced it
    (documented per operation): a float offset subtracts, a float scale
    divides, a centroid vector subtracts, while :class:`Permutation` and
    :class:`RigidSimilarity3D` elements carry ``apply``/``invert`` methods.
    """

    canonical: X
    element: G


def mean_subtract(v) -> CanonicalResult[np.ndarray, float]:
    """Select the zero-mean element from the orbit of constant shifts.

    The element is the removed offset ``a``: ``v - a * ones == canonical``.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("empty input")
    offset = float(np.mean(v))
    return CanonicalResult(canonical=v - offset, element=offset)


def sort_orbit_map(v) -> CanonicalResult[np.ndarray, Permutation]:
    """Select the magnitude-sorted element from the orbit of permutations.

    Entries are ordered by ascending absolute value; ties in absolute
    value are broken by signed value ascending, then by original index
    (the index tiebreak fixes the permutation, not the values). The tie
    rule makes the selected vector a function of the multiset alone, so
    every permutation of ``v`` maps to the same canonical output.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("empty input")
    order = np.lexsort((np.arange(v.size), v, np.abs(v)))
    perm = Permutation(order)
    return CanonicalResult(canonical=v[order], element=perm)


def equivariant_wrap(orbit_map: Callable[[X], CanonicalResult], inner_fn: Callable[[X], X], x: X) -> X:
    """Make ``inner_fn`` equivariant by conjugating it with an orbit map.

    Computes element(x), applies ``inner_fn`` in the canonical pose, and
    transforms back with the inverse element. If the orbit map is exact
    on the orbit of ``x``, the composite satisfies
    ``wrap(g(x)) = g(wrap(x))`` for every group element ``g``.
    """
    result = orbit_map(x)
    return result.element.invert().apply(inner_fn(result.canonical))
