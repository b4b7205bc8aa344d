"""Orbit mappings: canonicalization of rotations, similarities, permutations, and shifts.

Each orbit map sends every element of a group orbit to one fixed
representative and returns the group element that got it there, making any
downstream function provably invariant (or, by conjugation, equivariant).
"""

from .errors import (
    AmbiguousSignError,
    DegenerateInputError,
    DegenerateOrientationError,
    DegenerateScaleError,
    DegenerateSpectrumError,
)
from .groups import (
    CanonicalResult,
    Permutation,
    RigidSimilarity3D,
    Rotation2D,
    equivariant_wrap,
    mean_subtract,
    sort_orbit_map,
)
from .image import (
    ContinuousImage,
    GradientIntegral,
    RasterImage,
    SampleCircleSet,
    canonical_angle,
    gaussian_blur,
    grad_bilinear,
    gradient_integral,
    orbit_map_image,
    render_synthetic,
    rotate_image,
)
from .kernels import (
    KernelPair,
    builtin_pair,
    check_condition,
    kernel_canonical_angle,
    make_family_pair,
    rotate_kernel_90,
)
from .pointcloud import (
    SCALE_SET,
    TRANSLATION_OFFSETS,
    PCADiagnostics,
    PointCloud,
    center,
    orbit_map_similarity,
    pca_align,
    rotation_grid,
    scale_normalize,
)
from .stability import (
    OrbitSweepReport,
    StabilityReport,
    angle_residuals,
    circular_std,
    orbit_sweep,
    stability_report,
)
from .bench import toy_shape_bench

__all__ = [
    "AmbiguousSignError",
    "CanonicalResult",
    "ContinuousImage",
    "DegenerateInputError",
    "DegenerateOrientationError",
    "DegenerateScaleError",
    "DegenerateSpectrumError",
    "GradientIntegral",
    "KernelPair",
    "OrbitSweepReport",
    "PCADiagnostics",
    "Permutation",
    "PointCloud",
    "RasterImage",
    "RigidSimilarity3D",
    "Rotation2D",
    "SCALE_SET",
    "SampleCircleSet",
    "StabilityReport",
    "TRANSLATION_OFFSETS",
    "angle_residuals",
    "builtin_pair",
    "canonical_angle",
    "center",
    "check_condition",
    "circular_std",
    "equivariant_wrap",
    "gaussian_blur",
    "grad_bilinear",
    "gradient_integral",
    "kernel_canonical_angle",
    "make_family_pair",
    "mean_subtract",
    "orbit_map_image",
    "orbit_map_similarity",
    "orbit_sweep",
    "pca_align",
    "render_synthetic",
    "rotate_image",
    "rotate_kernel_90",
    "rotation_grid",
    "scale_normalize",
    "sort_orbit_map",
    "stability_report",
    "toy_shape_bench",
]
