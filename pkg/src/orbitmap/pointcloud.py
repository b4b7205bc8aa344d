"""Orbit maps for 3D point clouds: translation, scale, and PCA rotation alignment.

The rotation map centers the cloud, takes the thin SVD ``X_c = U S V^T``,
fixes the sign of each principal axis from the first row of U, and applies
``V D`` on the right of the row-major cloud. Off the degenerate set
(repeated singular values, vanishing sign entries) the composite is
provably invariant to the full similarity group; degenerate inputs raise
instead of silently picking a pose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousSignError, DegenerateScaleError, DegenerateSpectrumError
from .groups import CanonicalResult, RigidSimilarity3D

#: evaluation grids used in the similarity-invariance protocol
SCALE_SET = (0.001, 0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 100.0, 1000.0)
TRANSLATION_OFFSETS = (-10.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 10.0)

EPS_GAP = 1e-6
EPS_SIGN = 1e-9
#: sign entries at or below this magnitude count as exact zeros and map to +1
ZERO_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class PointCloud:
    """N x 3 real coordinates, row per point."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise ValueError("points must be an (N, 3) array with N >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("all coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.points, dtype=dtype)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class PCADiagnostics:
    """Spectrum and sign information recorded by :func:`pca_align`."""

    singular_values: np.ndarray
    relative_gaps: np.ndarray
    sign_vector: np.ndarray
    determinant: float


def _as_points(x) -> np.ndarray:
    if isinstance(x, PointCloud):
        return x.points
    return PointCloud(np.asarray(x, dtype=float)).points


def center(x) -> CanonicalResult[PointCloud, np.ndarray]:
    """Subtract the center of mass. The element is the removed centroid."""
    pts = _as_points(x)
    centroid = pts.mean(axis=0)
    return CanonicalResult(canonical=PointCloud(pts - centroid), element=centroid)


def scale_normalize(x) -> CanonicalResult[PointCloud, float]:
    """Divide by the average distance of all points to the origin.

    The element is the divisor; the canonical cloud has average radius 1.
    """
    pts = _as_points(x)
    radius = float(np.linalg.norm(pts, axis=1).mean())
    if radius <= 1e-300:
        raise DegenerateScaleError("degenerate scale: all points at the origin")
    return CanonicalResult(canonical=PointCloud(pts / radius), element=radius)


def _sign_fix(first_row: np.ndarray, sigma1: float) -> np.ndarray:
    signs = np.ones(3)
    threshold = EPS_SIGN * sigma1
    for k, entry in enumerate(first_row):
        mag = abs(entry)
        if mag <= ZERO_SIGN_TOL:
            continue  # exact zero: the axis flip does not move this point; keep +1
        if mag <= threshold:
            raise AmbiguousSignError(
                f"ambiguous sign: |U[0,{k}]| = {mag:.3e} <= {threshold:.3e}"
            )
        signs[k] = np.sign(entry)
    return signs


def pca_align(
    x, proper_rotation: bool = False
) -> tuple[CanonicalResult[PointCloud, RigidSimilarity3D], PCADiagnostics]:
    """Rotate a centered cloud so its principal axes align with the coordinate axes.

    Returns the aligned cloud (covariance diagonal with nonincreasing
    entries) together with the applied similarity and spectral
    diagnostics. The applied orthogonal transform ``V D`` may have
    determinant -1; with ``proper_rotation=True`` the last axis is flipped
    to force determinant +1 (recorded in the diagnostics either way).

    Raises :class:`DegenerateSpectrumError` when a relative singular-value
    gap is at most ``EPS_GAP`` and :class:`AmbiguousSignError` when a
    sign-fixing entry is too small: on those inputs the canonical pose is
    not unique.
    """
    pts = _as_points(x)
    if pts.shape[0] < 4:
        raise ValueError("pca_align requires at least 4 points")
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    u, sv, vt = np.linalg.svd(centered, full_matrices=False)
    if sv[0] <= 1e-300:
        raise DegenerateSpectrumError("degenerate spectrum: all points coincide")
    gaps = (sv[:-1] - sv[1:]) / sv[0]
    if np.min(gaps) <= EPS_GAP:
        raise DegenerateSpectrumError(
            f"degenerate spectrum: relative gaps {gaps.tolist()} (threshold {EPS_GAP})"
        )
    signs = _sign_fix(u[0], sv[0])
    transform = vt.T * signs  # V @ D: principal axes as columns, signs fixed
    if proper_rotation and np.linalg.det(transform) < 0:
        transform = transform.copy()
        transform[:, 2] *= -1.0
        signs = signs * np.array([1.0, 1.0, -1.0])
    determinant = float(np.sign(np.linalg.det(transform)))
    element = RigidSimilarity3D(rotation=transform, translation=-(centroid @ transform), scale=1.0)
    diagnostics = PCADiagnostics(
        singular_values=sv,
        relative_gaps=gaps,
        sign_vector=signs,
        determinant=determinant,
    )
    return CanonicalResult(canonical=PointCloud(centered @ transform), element=element), diagnostics


def orbit_map_similarity(
    x, proper_rotation: bool = False
) -> CanonicalResult[PointCloud, RigidSimilarity3D]:
    """Center, PCA-align, then scale-normalize; invariant to the similarity group.

    The composite transform is returned so the canonicalization can be
    undone. Degeneracy errors from the PCA and scale steps propagate.
    """
    aligned, _ = pca_align(x, proper_rotation=proper_rotation)
    scaled = scale_normalize(aligned.canonical)
    composite = RigidSimilarity3D(
        rotation=aligned.element.rotation,
        translation=aligned.element.translation / scaled.element,
        scale=1.0 / scaled.element,
    )
    return CanonicalResult(canonical=scaled.canonical, element=composite)


def rotation_grid(n_a: int, n_b: int) -> np.ndarray:
    """(n_a * n_b, 3, 3) rotations r_xy(2*pi*i/n_a) @ r_yz(2*pi*j/n_b).

    The two angular degrees of freedom sweep the xy- and yz-plane
    rotations; (16, 16) reproduces the 256-pose evaluation grid.
    """
    if n_a < 1 or n_b < 1:
        raise ValueError("grid sizes must be at least 1")
    alphas = 2.0 * np.pi * np.arange(n_a) / n_a
    betas = 2.0 * np.pi * np.arange(n_b) / n_b
    out = np.empty((n_a * n_b, 3, 3))
    idx = 0
    for a in alphas:
        ca, sa = np.cos(a), np.sin(a)
        r_xy = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
        for b in betas:
            cb, sb = np.cos(b), np.sin(b)
            r_yz = np.array([[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]])
            out[idx] = r_xy @ r_yz
            idx += 1
    return out
