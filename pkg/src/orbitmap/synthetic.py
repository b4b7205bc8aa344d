"""Seeded synthetic image corpus used by the stability analyses and tests.

Scenes are sums of anisotropic Gaussian bumps: one broad bump centered
outside the image acts as a smooth dominant trend (it keeps the mean
gradient over the sampling circles well away from zero, the regime where
the orientation estimate is provably meaningful), plus a few interior
detail bumps. Everything is band-limited and reproducible from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import Rotation2D
from .image import (
    ContinuousImage,
    RasterImage,
    SampleCircleSet,
    gradient_integral,
    render_synthetic,
)

#: reject scenes whose mean-gradient coherence |sum w*g| / sum w*|g| is below this
MIN_SCENE_COHERENCE = 0.2


@dataclass(frozen=True)
class BumpScene:
    """Sum of rotated anisotropic Gaussian bumps, defined on all of R^2."""

    amplitudes: np.ndarray
    centers: np.ndarray
    widths: np.ndarray
    orientations: np.ndarray

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[0])
        for a, c, w, phi in zip(self.amplitudes, self.centers, self.widths, self.orientations):
            d = pts - c
            co, si = np.cos(phi), np.sin(phi)
            u = co * d[:, 0] + si * d[:, 1]
            v = -si * d[:, 0] + co * d[:, 1]
            out += a * np.exp(-0.5 * ((u / w[0]) ** 2 + (v / w[1]) ** 2))
        return out


def _draw_scene(rng: np.random.Generator) -> BumpScene:
    n_detail = int(rng.integers(2, 7))
    trend_dir = rng.uniform(0.0, 2.0 * np.pi)
    trend_dist = rng.uniform(0.8, 1.2)
    amps = [rng.uniform(1.5, 2.5)]
    cents = [[0.5 + trend_dist * np.cos(trend_dir), 0.5 + trend_dist * np.sin(trend_dir)]]
    widths = [[rng.uniform(0.6, 0.9)] * 2]
    phis = [0.0]
    for _ in range(n_detail):
        amps.append(rng.uniform(0.2, 0.6))
        cents.append(rng.uniform(0.3, 0.7, 2).tolist())
        widths.append(rng.uniform(0.1, 0.25, 2).tolist())
        phis.append(rng.uniform(0.0, 2.0 * np.pi))
    return BumpScene(
        amplitudes=np.asarray(amps),
        centers=np.asarray(cents),
        widths=np.asarray(widths),
        orientations=np.asarray(phis),
    )


def _coherence(scene: BumpScene, size: int, sigma: float, circles: SampleCircleSet) -> float:
    cimg = ContinuousImage.from_raster(render_synthetic(scene, Rotation2D(0.0), size, size), sigma)
    pts, wts = circles.points_and_weights()
    grads = cimg.gradient_at(pts).sum(axis=2)
    total = float((wts * np.linalg.norm(grads, axis=1)).sum())
    if total == 0.0:
        return 0.0
    return gradient_integral(cimg, circles).magnitude / total


def smooth_scene_corpus(
    count: int,
    seed: int,
    check_size: int = 64,
    sigma: float = 1.5,
    circles: SampleCircleSet = SampleCircleSet(),
) -> list[BumpScene]:
    """Draw ``count`` seeded scenes, rejecting near-degenerate orientations."""
    rng = np.random.default_rng(seed)
    scenes: list[BumpScene] = []
    while len(scenes) < count:
        scene = _draw_scene(rng)
        if _coherence(scene, check_size, sigma, circles) >= MIN_SCENE_COHERENCE:
            scenes.append(scene)
    return scenes


def smooth_raster_corpus(count: int, size: int, seed: int) -> list[RasterImage]:
    """Rasterized corpus at rotation 0, each image normalized to peak value 1."""
    images = []
    for scene in smooth_scene_corpus(count, seed, check_size=size):
        raster = render_synthetic(scene, Rotation2D(0.0), size, size)
        images.append(RasterImage(raster.pixels / raster.pixels.max()))
    return images


def add_gaussian_noise(img: RasterImage, variance: float, rng: np.random.Generator) -> RasterImage:
    """Additive Gaussian noise with the given variance (no clipping)."""
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    if variance == 0:
        return img
    return RasterImage(img.pixels + rng.normal(0.0, np.sqrt(variance), img.pixels.shape))
