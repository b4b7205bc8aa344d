"""Orientation-stability analysis and the clean/average/worst-case sweep protocol.

The dispersion study rotates an image through a full turn, re-estimates the
canonical angle of every rotated copy, and measures how far the estimates
stray from perfect consistency. Angle spread is summarized with circular
statistics, since ordinary standard deviations are ill-defined near the
wraparound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .image import (
    DEGENERACY_RANGE_FACTOR,
    ContinuousImage,
    RasterImage,
    Rotation2D,
    SampleCircleSet,
    gaussian_blur,
    rotate_image,
)

ESTIMATORS = ("exact", "central", "forward")

HISTOGRAM_BIN_WIDTH_DEG = 2.0


def _finite_difference_integral(
    blurred: RasterImage, circles: SampleCircleSet, forward: bool
) -> np.ndarray:
    """Gradient integral using finite differences at the pixels closest to the circles."""
    cimg = ContinuousImage(blurred, 0.0)
    pts, wts = circles.points_and_weights()
    i0, j0, fx, fy = cimg._fractional_index(pts)
    i = i0 + np.rint(fy).astype(np.intp)
    j = j0 + np.rint(fx).astype(np.intp)
    h, w = blurred.height, blurred.width
    i = np.clip(i, 1, h - 2)
    j = np.clip(j, 1, w - 2)
    px = blurred.pixels
    s = float(min(h, w))  # pixels per unit length: d/dx = pixel difference * s
    if forward:
        gx = (px[i, j + 1] - px[i, j]) * s
        gy = (px[i + 1, j] - px[i, j]) * s
    else:
        gx = (px[i, j + 1] - px[i, j - 1]) * (s / 2.0)
        gy = (px[i + 1, j] - px[i - 1, j]) * (s / 2.0)
    grads = np.stack([gx.sum(axis=1), gy.sum(axis=1)], axis=1)
    return (wts[:, None] * grads).sum(axis=0)


def _estimate_angle_deg(
    img: RasterImage,
    estimator: str,
    circles: SampleCircleSet,
    sigma: float,
) -> float:
    """Canonical angle in degrees, or NaN when the integral is degenerate."""
    blurred = gaussian_blur(img, sigma)
    if estimator == "exact":
        cimg = ContinuousImage(blurred, sigma)
        pts, wts = circles.points_and_weights()
        grads = cimg.gradient_at(pts).sum(axis=2)
        vector = (wts[:, None] * grads).sum(axis=0)
    elif estimator in ("central", "forward"):
        vector = _finite_difference_integral(blurred, circles, forward=estimator == "forward")
    else:
        raise ValueError(f"estimator must be one of {ESTIMATORS}")
    magnitude = float(np.linalg.norm(vector))
    if magnitude <= DEGENERACY_RANGE_FACTOR * blurred.dynamic_range():
        return math.nan
    return math.degrees(math.atan2(vector[1], vector[0])) % 360.0


def angle_residuals(
    img: RasterImage,
    step_deg: float = 1.0,
    interpolation: str = "bilinear",
    estimator: str = "exact",
    circles: SampleCircleSet = SampleCircleSet(),
    sigma: float = 1.5,
) -> np.ndarray:
    """Residuals (estimated angle + applied rotation) mod 360 over a full sweep.

    A perfectly consistent estimator yields a constant residual. Rotations
    whose orientation estimate is degenerate are recorded as NaN, not zero.
    """
    n_steps = round(360.0 / step_deg)
    if abs(n_steps * step_deg - 360.0) > 1e-9:
        raise ValueError("step_deg must divide 360")
    residuals = np.empty(n_steps)
    for k in range(n_steps):
        gamma = k * step_deg
        rotated = rotate_image(img, Rotation2D(math.radians(gamma)), interpolation)
        alpha = _estimate_angle_deg(rotated, estimator, circles, sigma)
        residuals[k] = (alpha + gamma) % 360.0 if not math.isnan(alpha) else math.nan
    return residuals


def circular_std(residuals_deg) -> float:
    """Circular standard deviation sqrt(-2 ln Rbar) in degrees, capped at 180.

    Rbar is the mean resultant length of the residuals' unit vectors; a
    vanishing resultant (e.g. residuals spread uniformly) reports the cap.
    """
    res = np.asarray(residuals_deg, dtype=float)
    if res.size == 0:
        raise ValueError("empty residual list")
    rad = np.deg2rad(res)
    rbar = float(np.hypot(np.cos(rad).mean(), np.sin(rad).mean()))
    if rbar <= 1e-15:
        return 180.0
    return min(math.degrees(math.sqrt(-2.0 * math.log(min(rbar, 1.0)))), 180.0)


@dataclass(frozen=True)
class StabilityReport:
    """Per-image circular dispersion of the orientation estimate over a rotation sweep."""

    per_item_circular_std: np.ndarray
    mean_std: float
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray
    estimator: str
    interpolation: str

    def to_json_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "interpolation": self.interpolation,
            "mean_std_deg": self.mean_std,
            "histogram": {
                "edges": self.histogram_edges.tolist(),
                "counts": self.histogram_counts.tolist(),
            },
            "per_item": self.per_item_circular_std.tolist(),
        }


def stability_report(
    images: Sequence[RasterImage],
    step_deg: float = 1.0,
    interpolation: str = "bilinear",
    estimator: str = "exact",
    circles: SampleCircleSet = SampleCircleSet(),
    sigma: float = 1.5,
) -> StabilityReport:
    """Aggregate per-image residual dispersion into a corpus report.

    Degenerate rotations are dropped from an image's residuals; an image
    that is degenerate at every rotation is an error rather than a silent
    zero. The histogram uses 2-degree bins spanning [0, 180].
    """
    if len(images) == 0:
        raise ValueError("empty corpus")
    per_item = np.empty(len(images))
    for idx, img in enumerate(images):
        res = angle_residuals(img, step_deg, interpolation, estimator, circles, sigma)
        res = res[~np.isnan(res)]
        if res.size == 0:
            raise ValueError(f"image {idx} has a degenerate orientation at every rotation")
        per_item[idx] = circular_std(res)
    edges = np.arange(0.0, 180.0 + HISTOGRAM_BIN_WIDTH_DEG, HISTOGRAM_BIN_WIDTH_DEG)
    counts, _ = np.histogram(per_item, bins=edges)
    return StabilityReport(
        per_item_circular_std=per_item,
        mean_std=float(per_item.mean()),
        histogram_edges=edges,
        histogram_counts=counts,
        estimator=estimator,
        interpolation=interpolation,
    )


@dataclass(frozen=True)
class OrbitSweepReport:
    """Clean / average / worst-case accuracy over a transform sweep.

    An item counts toward the worst-case accuracy only if it is classified
    correctly under every transform.
    """

    clean_accuracy: float
    average_accuracy: float
    worst_case_accuracy: float
    per_transform_accuracy: dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "clean": self.clean_accuracy,
            "average": self.average_accuracy,
            "worst": self.worst_case_accuracy,
            "per_transform": dict(self.per_transform_accuracy),
        }


def orbit_sweep(
    predict: Callable,
    items: Sequence,
    labels: Sequence,
    transforms: Sequence[tuple[str, Callable]],
) -> OrbitSweepReport:
    """Evaluate a predictor over the orbit spanned by named transforms.

    ``transforms`` must include one named "identity"; its accuracy is the
    clean accuracy. Accuracies are computed from integer correct-counts so
    that an exactly invariant predictor yields clean == average == worst
    to the last bit.
    """
    if not transforms:
        raise ValueError("transforms must be nonempty")
    names = [name for name, _ in transforms]
    if "identity" not in names:
        raise ValueError('transforms must include one named "identity"')
    if len(set(names)) != len(names):
        raise ValueError("transform names must be unique")
    labels = list(labels)
    n_items = len(labels)
    if n_items == 0 or len(items) != n_items:
        raise ValueError("items and labels must be equal-length and nonempty")

    per_transform_correct: dict[str, int] = {}
    all_correct = np.ones(n_items, dtype=bool)
    for name, fn in transforms:
        correct = np.fromiter(
            (predict(fn(item)) == label for item, label in zip(items, labels)),
            dtype=bool,
            count=n_items,
        )
        per_transform_correct[name] = int(correct.sum())
        all_correct &= correct

    total = sum(per_transform_correct.values())
    return OrbitSweepReport(
        clean_accuracy=per_transform_correct["identity"] / n_items,
        average_accuracy=total / (n_items * len(transforms)),
        worst_case_accuracy=int(all_correct.sum()) / n_items,
        per_transform_accuracy={k: v / n_items for k, v in per_transform_correct.items()},
    )
