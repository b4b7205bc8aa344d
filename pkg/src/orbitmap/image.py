"""Continuous image model and the gradient-based rotation orbit map.

A raster is lifted to a continuous function on the unit square by Gaussian
blur followed by bilinear interpolation. The canonical rotation is the one
aligning the mean gradient over a set of concentric circles with the +x
reference axis; the mean gradient has a closed form solution, so no orbit
enumeration is needed.

Coordinate convention: the image lives on [0, 1]^2 with the shorter side
mapped to unit length, the image center at (0.5, 0.5), and square pixels.
x runs along columns, y along rows (increasing with row index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateOrientationError
from .groups import CanonicalResult, Rotation2D

DEFAULT_SIGMA = 1.5
DEFAULT_RADII = (0.05, 0.4)
DEFAULT_SAMPLES_PER_CIRCLE = 64

#: degeneracy threshold = this factor times the blurred image's dynamic range
DEGENERACY_RANGE_FACTOR = 1e-6

INTERPOLATION_MODES = ("nearest", "bilinear", "bicubic")


@dataclass(frozen=True)
class RasterImage:
    """H x W x C array of real pixel values, C in {1, 3}."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.array(self.pixels, dtype=float)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError("pixels must be HxW or HxWxC with C in {1, 3}")
        if px.shape[0] < 4 or px.shape[1] < 4:
            raise ValueError("image must be at least 4x4 for the gradient integral")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def dynamic_range(self) -> float:
        return float(self.pixels.max() - self.pixels.min())


def _gaussian_kernel(sigma: float) -> np.ndarray:
    """1-d Gaussian truncated at radius ceil(3*sigma), renormalized to sum 1."""
    radius = math.ceil(3.0 * sigma)
    ks = np.arange(-radius, radius + 1, dtype=float)
    w = np.exp(-0.5 * (ks / sigma) ** 2)
    return w / w.sum()


def _convolve_axis(data: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """Correlate along one axis with reflect padding (edge pixel not repeated)."""
    radius = (kernel.size - 1) // 2
    pad = [(0, 0)] * data.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(data, pad, mode="reflect")
    out = np.zeros_like(data)
    index = [slice(None)] * data.ndim
    n = data.shape[axis]
    for k, w in enumerate(kernel):
        index[axis] = slice(k, k + n)
        out += w * padded[tuple(index)]
    return out


def gaussian_blur(img: RasterImage, sigma: float) -> RasterImage:
    """Separable Gaussian blur, kernel truncated at ceil(3*sigma), reflect padding."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    kernel = _gaussian_kernel(sigma)
    out = _convolve_axis(img.pixels, kernel, axis=0)
    out = _convolve_axis(out, kernel, axis=1)
    return RasterImage(out)


@dataclass(frozen=True)
class ContinuousImage:
    """Blurred raster plus its bilinear interpolant on the unit square.

    Evaluation at pixel centers reproduces the blurred raster exactly.
    Queries outside the convex hull of pixel centers (possible only for
    very small rasters, since circle radii are < 0.5) extrapolate the
    nearest boundary cell's bilinear polynomial, keeping the gradient
    analytic on the whole open square.
    """

    blurred: RasterImage
    blur_sigma: float

    @classmethod
    def from_raster(cls, img: RasterImage, sigma: float = DEFAULT_SIGMA) -> "ContinuousImage":
        return cls(blurred=gaussian_blur(img, sigma), blur_sigma=float(sigma))

    @property
    def _scale(self) -> float:
        """Pixels per unit length: the shorter side spans length 1."""
        return float(min(self.blurred.height, self.blurred.width))

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(x of each column, y of each row) in continuous coordinates."""
        h, w = self.blurred.height, self.blurred.width
        s = self._scale
        xs = 0.5 + (np.arange(w) + 0.5 - w / 2.0) / s
        ys = 0.5 + (np.arange(h) + 0.5 - h / 2.0) / s
        return xs, ys

    @staticmethod
    def _snap_to_nodes(frac: np.ndarray) -> np.ndarray:
        """Round fractional indices within a few ulps of a grid node onto it.

        Keeps evaluation at pixel centers exact despite the unit/pixel
        coordinate roundtrip; general queries move by at most ~1e-14 cells.
        """
        nearest = np.rint(frac)
        tol = 32.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(frac))
        return np.where(np.abs(frac - nearest) <= tol, nearest, frac)

    def _fractional_index(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Cell indices (row, col) and in-cell offsets for an (M, 2) point array."""
        h, w = self.blurred.height, self.blurred.width
        s = self._scale
        jf = self._snap_to_nodes((points[:, 0] - 0.5) * s + (w - 1) / 2.0)
        if_ = self._snap_to_nodes((points[:, 1] - 0.5) * s + (h - 1) / 2.0)
        j0 = np.clip(np.floor(jf), 0, w - 2).astype(np.intp)
        i0 = np.clip(np.floor(if_), 0, h - 2).astype(np.intp)
        return i0, j0, jf - j0, if_ - i0

    def _check_inside(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != 2:
            raise ValueError("points must be (M, 2)")
        if np.any(pts <= 0.0) or np.any(pts >= 1.0):
            raise ValueError("point outside the open image domain (0,1)^2")
        return pts

    def value_at(self, points) -> np.ndarray:
        """Bilinear value at each point; returns (M, C)."""
        pts = self._check_inside(points)
        i0, j0, fx, fy = self._fractional_index(pts)
        px = self.blurred.pixels
        f00 = px[i0, j0]
        f01 = px[i0, j0 + 1]
        f10 = px[i0 + 1, j0]
        f11 = px[i0 + 1, j0 + 1]
        wx, wy = fx[:, None], fy[:, None]
        return (1 - wy) * ((1 - wx) * f00 + wx * f01) + wy * ((1 - wx) * f10 + wx * f11)

    def gradient_at(self, points) -> np.ndarray:
        """Exact gradient of the bilinear interpolant; returns (M, 2, C).

        Within a cell du/dx is constant in x and linear in y, and
        symmetrically for du/dy.
        """
        pts = self._check_inside(points)
        i0, j0, fx, fy = self._fractional_index(pts)
        px = self.blurred.pixels
        f00 = px[i0, j0]
        f01 = px[i0, j0 + 1]
        f10 = px[i0 + 1, j0]
        f11 = px[i0 + 1, j0 + 1]
        s = self._scale
        wx, wy = fx[:, None], fy[:, None]
        gx = ((1 - wy) * (f01 - f00) + wy * (f11 - f10)) * s
        gy = ((1 - wx) * (f10 - f00) + wx * (f11 - f01)) * s
        return np.stack([gx, gy], axis=1)


def grad_bilinear(cimg: ContinuousImage, z) -> np.ndarray:
    """Exact analytic gradient of the bilinear model at one interior point; (2, C)."""
    return cimg.gradient_at(np.asarray(z, dtype=float).reshape(1, 2))[0]


@dataclass(frozen=True)
class SampleCircleSet:
    """Concentric sampling circles around the image center (0.5, 0.5)."""

    radii: tuple[float, ...] = DEFAULT_RADII
    samples_per_circle: int = DEFAULT_SAMPLES_PER_CIRCLE

    def __post_init__(self) -> None:
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(not (0.0 < r < 0.5) for r in radii):
            raise ValueError("radii must lie in (0, 0.5) so circles stay inside the domain")
        if self.samples_per_circle < 1:
            raise ValueError("samples_per_circle must be positive")
        object.__setattr__(self, "radii", radii)

    def points_and_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """All sample points (M, 2) and arc-length weights 2*pi*r/m per sample."""
        m = self.samples_per_circle
        theta = 2.0 * np.pi * np.arange(m) / m
        unit = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        pts = np.concatenate([0.5 + r * unit for r in self.radii])
        wts = np.concatenate([np.full(m, 2.0 * np.pi * r / m) for r in self.radii])
        return pts, wts


@dataclass(frozen=True)
class GradientIntegral:
    """Approximation of the mean-gradient integral; its magnitude gauges stability."""

    vector: np.ndarray
    magnitude: float = field(init=False)

    def __post_init__(self) -> None:
        v = np.array(self.vector, dtype=float).reshape(2)
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "magnitude", float(np.linalg.norm(v)))


def gradient_integral(cimg: ContinuousImage, circles: SampleCircleSet = SampleCircleSet()) -> GradientIntegral:
    """Arc-length-weighted sum of interpolant gradients over the circles.

    Gradients are summed over color channels.
    """
    pts, wts = circles.points_and_weights()
    grads = cimg.gradient_at(pts).sum(axis=2)
    return GradientIntegral(vector=(wts[:, None] * grads).sum(axis=0))


def canonical_angle(
    cimg: ContinuousImage,
    circles: SampleCircleSet = SampleCircleSet(),
    degeneracy_threshold: float | None = None,
) -> tuple[Rotation2D, float]:
    """Rotation aligning the mean gradient with the +x axis, plus the integral magnitude.

    The angle solves the alignment problem in closed form:
    (cos a, sin a) = vector / ||vector||. When the magnitude does not
    exceed the degeneracy threshold (default: 1e-6 times the blurred
    image's dynamic range) every rotation is equally good and a
    :class:`DegenerateOrientationError` is raised.
    """
    integral = gradient_integral(cimg, circles)
    if degeneracy_threshold is None:
        degeneracy_threshold = DEGENERACY_RANGE_FACTOR * cimg.blurred.dynamic_range()
    if integral.magnitude <= degeneracy_threshold:
        raise DegenerateOrientationError(
            f"degenerate orientation: |integral| = {integral.magnitude:.3e} "
            f"<= threshold {degeneracy_threshold:.3e}"
        )
    vx, vy = integral.vector
    return Rotation2D(math.atan2(vy, vx)), integral.magnitude


def _catmull_rom(t: np.ndarray) -> np.ndarray:
    """Bicubic convolution kernel with a = -0.5 (Catmull-Rom)."""
    a = -0.5
    t = np.abs(t)
    out = np.zeros_like(t)
    near = t <= 1.0
    far = (t > 1.0) & (t < 2.0)
    tn = t[near]
    out[near] = (a + 2.0) * tn**3 - (a + 3.0) * tn**2 + 1.0
    tf = t[far]
    out[far] = a * tf**3 - 5.0 * a * tf**2 + 8.0 * a * tf - 4.0 * a
    return out


def _gather_zero_fill(px: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Pixel values at integer index arrays, 0 outside the raster."""
    h, w = px.shape[0], px.shape[1]
    inside = (i >= 0) & (i < h) & (j >= 0) & (j < w)
    vals = px[np.clip(i, 0, h - 1), np.clip(j, 0, w - 1)]
    vals[~inside] = 0.0
    return vals


def rotate_image(img: RasterImage, angle: Rotation2D, mode: str = "bilinear") -> RasterImage:
    """Inverse-warp rotation about the image center; out-of-bounds fills with 0.

    The output raster samples the input at center + r(angle) * (p - center),
    i.e. it realizes the group action u(z) -> u(center + r(angle)(z - center))
    on the pixel grid.
    """
    if mode not in INTERPOLATION_MODES:
        raise ValueError(f"mode must be one of {INTERPOLATION_MODES}")
    h, w = img.height, img.width
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    jj, ii = np.meshgrid(np.arange(w, dtype=float) - cx, np.arange(h, dtype=float) - cy)
    c, s = math.cos(angle.angle), math.sin(angle.angle)
    sj = cx + c * jj - s * ii
    si = cy + s * jj + c * ii
    px = img.pixels

    if mode == "nearest":
        i = np.rint(si).astype(np.intp)
        j = np.rint(sj).astype(np.intp)
        out = _gather_zero_fill(px, i, j)
    elif mode == "bilinear":
        i0 = np.floor(si).astype(np.intp)
        j0 = np.floor(sj).astype(np.intp)
        fy = (si - i0)[:, :, None]
        fx = (sj - j0)[:, :, None]
        out = (
            (1 - fy) * ((1 - fx) * _gather_zero_fill(px, i0, j0) + fx * _gather_zero_fill(px, i0, j0 + 1))
            + fy * ((1 - fx) * _gather_zero_fill(px, i0 + 1, j0) + fx * _gather_zero_fill(px, i0 + 1, j0 + 1))
        )
    else:
        i0 = np.floor(si).astype(np.intp)
        j0 = np.floor(sj).astype(np.intp)
        fy = si - i0
        fx = sj - j0
        out = np.zeros_like(px)
        for di in range(-1, 3):
            wy = _catmull_rom(fy - di)[:, :, None]
            for dj in range(-1, 3):
                wx = _catmull_rom(fx - dj)[:, :, None]
                out += wy * wx * _gather_zero_fill(px, i0 + di, j0 + dj)
    return RasterImage(out)


def orbit_map_image(
    img: RasterImage,
    mode: str = "bilinear",
    circles: SampleCircleSet = SampleCircleSet(),
    sigma: float = DEFAULT_SIGMA,
) -> CanonicalResult[RasterImage, Rotation2D]:
    """Rotate an image so its mean gradient points along the +x reference axis.

    The blur and the gradient integral are used only to estimate the
    angle; the returned canonical image is the unblurred input resampled
    once.
    """
    cimg = ContinuousImage.from_raster(img, sigma)
    rot, _ = canonical_angle(cimg, circles)
    return CanonicalResult(canonical=rotate_image(img, rot, mode), element=rot)


def render_synthetic(scene: Callable[[np.ndarray], np.ndarray], rotation: Rotation2D, height: int, width: int) -> RasterImage:
    """Rasterize scene o r(rotation) at pixel centers: rotate before discretizing.

    ``scene`` maps an (M, 2) array of positions to (M,) values and should
    be defined on (a neighborhood of) the unit square.
    """
    s = float(min(height, width))
    xs = 0.5 + (np.arange(width) + 0.5 - width / 2.0) / s
    ys = 0.5 + (np.arange(height) + 0.5 - height / 2.0) / s
    xx, yy = np.meshgrid(xs, ys)
    pts = np.stack([xx.ravel() - 0.5, yy.ravel() - 0.5], axis=1)
    rotated = pts @ rotation.matrix().T + 0.5
    values = np.asarray(scene(rotated), dtype=float).reshape(height, width)
    return RasterImage(values)
