"""Rotation-invariance conditions for convolution-kernel pairs.

A pair of kernels can replace the exact x/y derivatives in the canonical
angle formula. For quarter-turn rotations the estimate shifts consistently
only if the pair satisfies a grid-exact compatibility condition; the
parametric families below satisfy it by construction, while e.g. forward
differences do not.

Kernel grids use the same axis convention as images (x along columns,
y along rows); ``rotate_kernel_90(k, q)`` is the grid realization of
composing k with a rotation by ``q * 90`` degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOrientationError
from .groups import Rotation2D
from .image import (
    DEGENERACY_RANGE_FACTOR,
    ContinuousImage,
    RasterImage,
    SampleCircleSet,
)

CONDITION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class KernelPair:
    """Two same-shape square kernels tested/used as a joint direction estimator."""

    k1: np.ndarray
    k2: np.ndarray

    def __post_init__(self) -> None:
        k1 = np.array(self.k1, dtype=float)
        k2 = np.array(self.k2, dtype=float)
        if k1.ndim != 2 or k1.shape[0] != k1.shape[1]:
            raise ValueError("kernels must be square matrices")
        if k1.shape != k2.shape:
            raise ValueError("k1 and k2 must have the same shape")
        k1.setflags(write=False)
        k2.setflags(write=False)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)


def rotate_kernel_90(k: np.ndarray, quarter_turns: int) -> np.ndarray:
    """Exact grid rotation by quarter_turns * 90 degrees (no interpolation)."""
    return np.rot90(np.asarray(k, dtype=float), quarter_turns % 4).copy()


def check_condition(pair: KernelPair, quarter_turns: int) -> tuple[bool, float]:
    """Test the pair's rotation-compatibility condition at a quarter-turn angle.

    At every grid position the rotated-kernel vector must equal the
    rotated value vector: (k1 o r^T, k2 o r^T) = r^T (k1, k2). Returns
    whether the maximum absolute violation is at most 1e-12, and the
    violation itself.
    """
    if quarter_turns not in (1, 2, 3):
        raise ValueError("quarter_turns must be 1, 2, or 3 (grid-exact rotations only)")
    lhs1 = rotate_kernel_90(pair.k1, -quarter_turns)
    lhs2 = rotate_kernel_90(pair.k2, -quarter_turns)
    angle = quarter_turns * math.pi / 2.0
    c, s = round(math.cos(angle)), round(math.sin(angle))
    rhs1 = c * pair.k1 + s * pair.k2
    rhs2 = -s * pair.k1 + c * pair.k2
    violation = float(max(np.abs(lhs1 - rhs1).max(), np.abs(lhs2 - rhs2).max()))
    return violation <= CONDITION_TOLERANCE, violation


def make_family_pair(n: int, params) -> KernelPair:
    """Parametric condition-satisfying pair: N=2 takes (a, b), N=3 takes (a, b, c, d).

    k1 is point-antisymmetric in the given parameters and k2 is its -90
    degree grid rotation, exactly the printed generator families.
    """
    params = tuple(float(p) for p in params)
    if n == 2:
        if len(params) != 2:
            raise ValueError("N=2 family takes 2 parameters (a, b)")
        a, b = params
        k1 = np.array([[a, b], [-b, -a]])
    elif n == 3:
        if len(params) != 4:
            raise ValueError("N=3 family takes 4 parameters (a, b, c, d)")
        a, b, c, d = params
        k1 = np.array([[a, b, c], [d, 0.0, -d], [-c, -b, -a]])
    else:
        raise ValueError("family generators exist for N in {2, 3}")
    return KernelPair(k1=k1, k2=rotate_kernel_90(k1, -1))


def builtin_pair(name: str) -> KernelPair:
    """Named reference pairs.

    ``central``: central-difference estimator of (du/dx, du/dy); satisfies
    the condition (it is the N=3 family at (0, 0, 0, 0.5)).
    ``forward``: forward differences, which violate the condition.
    """
    if name == "central":
        return make_family_pair(3, (0.0, 0.0, 0.0, 0.5))
    if name == "forward":
        k1 = np.array([[-1.0, 0.0], [1.0, 0.0]])
        return KernelPair(k1=k1, k2=rotate_kernel_90(k1, -1))
    raise ValueError(f"unknown builtin pair {name!r}")


def convolve2d(raster: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """True 2-d convolution (kernel flipped) with reflect padding, same size.

    The kernel origin sits at index ((N-1)//2, (N-1)//2).
    """
    k = np.asarray(kernel, dtype=float)
    n = k.shape[0]
    c = (n - 1) // 2
    pad = [(n - 1, n - 1), (n - 1, n - 1)] + [(0, 0)] * (raster.ndim - 2)
    padded = np.pad(raster, pad, mode="reflect")
    h, w = raster.shape[0], raster.shape[1]
    out = np.zeros_like(raster, dtype=float)
    for p in range(n):
        for q in range(n):
            if k[p, q] == 0.0:
                continue
            i0 = (n - 1) + c - p
            j0 = (n - 1) + c - q
            out += k[p, q] * padded[i0 : i0 + h, j0 : j0 + w]
    return out


def kernel_canonical_angle(
    cimg: ContinuousImage,
    pair: KernelPair,
    circles: SampleCircleSet = SampleCircleSet(),
) -> Rotation2D:
    """Canonical angle from kernel responses instead of exact gradients.

    Both kernels are convolved over the blurred raster; the responses are
    bilinearly interpolated at the circle samples, summed with arc-length
    weights and over channels, and normalized into (cos a, sin a). With
    the central-difference pair this is the discrete analogue of
    :func:`orbitmap.image.canonical_angle`.
    """
    blurred = cimg.blurred.pixels
    resp1 = ContinuousImage(RasterImage(convolve2d(blurred, pair.k1)), 0.0)
    resp2 = ContinuousImage(RasterImage(convolve2d(blurred, pair.k2)), 0.0)
    pts, wts = circles.points_and_weights()
    v1 = float((wts[:, None] * resp1.value_at(pts)).sum())
    v2 = float((wts[:, None] * resp2.value_at(pts)).sum())
    magnitude = math.hypot(v1, v2)
    threshold = DEGENERACY_RANGE_FACTOR * cimg.blurred.dynamic_range()
    if magnitude <= threshold:
        raise DegenerateOrientationError(
            f"degenerate orientation: |kernel integral| = {magnitude:.3e} <= {threshold:.3e}"
        )
    return Rotation2D(math.atan2(v2, v1))
