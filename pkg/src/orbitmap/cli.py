"""Command-line surface: canonicalize files, run stability and kernel checks.

Exit codes: 0 success, 2 input/parse error, 3 degenerate input,
4 failed --assert in orbit-bench.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import cloudio, netpbm
from .bench import toy_shape_bench
from .errors import DegenerateInputError
from .image import (
    ContinuousImage,
    RasterImage,
    SampleCircleSet,
    canonical_angle,
    rotate_image,
)
from .kernels import KernelPair, builtin_pair, check_condition
from .pointcloud import center, orbit_map_similarity, pca_align, scale_normalize
from .stability import stability_report
from .synthetic import add_gaussian_noise, smooth_raster_corpus

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_DEGENERATE = 3
EXIT_ASSERT_FAILED = 4


@dataclass(frozen=True)
class RunConfig:
    """Numeric defaults shared by the subcommands (paper-protocol values)."""

    sigma: float = 1.5
    radii: tuple[float, ...] = (0.05, 0.4)
    samples: int = 64
    step_deg: float = 1.0
    grid: tuple[int, int] = (16, 16)
    interpolation: str = "bilinear"
    estimator: str = "exact"
    seed: int = 0

    def circles(self) -> SampleCircleSet:
        return SampleCircleSet(radii=self.radii, samples_per_circle=self.samples)


_DEFAULTS = RunConfig()


def _write_json(path, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.fspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _parse_radii(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(","))


def _cmd_canonicalize_image(args) -> int:
    values, maxval = netpbm.read_netpbm(args.input)
    img = RasterImage(values)
    circles = SampleCircleSet(radii=_parse_radii(args.radii), samples_per_circle=args.samples)
    cimg = ContinuousImage.from_raster(img, args.sigma)
    try:
        rotation, magnitude = canonical_angle(cimg, circles)
    except DegenerateInputError:
        _write_json(args.report, {"angle_deg": None, "integral_magnitude": 0.0, "degenerate": True})
        return EXIT_DEGENERATE
    canonical = rotate_image(img, rotation, args.interp)
    netpbm.write_netpbm(args.output, canonical.pixels, maxval=maxval)
    _write_json(
        args.report,
        {"angle_deg": rotation.degrees, "integral_magnitude": magnitude, "degenerate": False},
    )
    return EXIT_OK


def _cloud_report(translation, scale, rotation, determinant, singular_values, gaps) -> dict:
    return {
        "translation": list(map(float, translation)),
        "scale": float(scale),
        "rotation": [float(v) for v in np.asarray(rotation).ravel()],
        "determinant": float(determinant),
        "singular_values": None if singular_values is None else [float(v) for v in singular_values],
        "gaps": None if gaps is None else [float(v) for v in gaps],
    }


def _cmd_canonicalize_cloud(args) -> int:
    points = cloudio.read_cloud(args.input)
    try:
        if args.mode == "center":
            result = center(points)
            report = _cloud_report(-result.element, 1.0, np.eye(3), 1.0, None, None)
        elif args.mode == "scale":
            result = scale_normalize(points)
            report = _cloud_report(np.zeros(3), 1.0 / result.element, np.eye(3), 1.0, None, None)
        elif args.mode == "pca":
            result, diag = pca_align(points, proper_rotation=args.proper_rotation)
            element = result.element
            report = _cloud_report(
                element.translation, element.scale, element.rotation,
                diag.determinant, diag.singular_values, diag.relative_gaps,
            )
        else:
            result = orbit_map_similarity(points, proper_rotation=args.proper_rotation)
            _, diag = pca_align(points, proper_rotation=args.proper_rotation)
            element = result.element
            report = _cloud_report(
                element.translation, element.scale, element.rotation,
                diag.determinant, diag.singular_values, diag.relative_gaps,
            )
    except DegenerateInputError as exc:
        _write_json(args.report, {"degenerate": True, "reason": str(exc)})
        return EXIT_DEGENERATE
    cloudio.write_cloud(args.output, result.canonical.points)
    report["degenerate"] = False
    _write_json(args.report, report)
    return EXIT_OK


def _cmd_stability_report(args) -> int:
    if args.synthetic is not None:
        images = smooth_raster_corpus(args.synthetic, args.size, args.seed)
    elif args.images:
        images = [RasterImage(netpbm.read_netpbm(p)[0]) for p in args.images]
    else:
        raise ValueError("provide image files or --synthetic N")
    if args.noise_var > 0:
        rng = np.random.default_rng(args.seed + 1)
        images = [add_gaussian_noise(img, args.noise_var, rng) for img in images]
    circles = SampleCircleSet(radii=_parse_radii(args.radii), samples_per_circle=args.samples)
    report = stability_report(
        images,
        step_deg=args.step_deg,
        interpolation=args.interp,
        estimator=args.estimator,
        circles=circles,
        sigma=args.sigma,
    )
    _write_json(args.report, report.to_json_dict())
    return EXIT_OK


def _cmd_kernel_check(args) -> int:
    if args.builtin:
        pair = builtin_pair(args.builtin)
    else:
        with open(args.pair) as fh:
            data = json.load(fh)
        pair = KernelPair(k1=np.asarray(data["k1"], dtype=float), k2=np.asarray(data["k2"], dtype=float))
    per_turn = {}
    worst = 0.0
    for q in args.turns:
        holds, violation = check_condition(pair, q)
        per_turn[str(q)] = {"holds": holds, "max_violation": violation}
        worst = max(worst, violation)
    _write_json(
        args.report,
        {
            "k1": pair.k1.tolist(),
            "k2": pair.k2.tolist(),
            "holds": all(v["holds"] for v in per_turn.values()),
            "max_violation": worst,
            "per_turn": per_turn,
        },
    )
    return EXIT_OK


def _cmd_orbit_bench(args) -> int:
    with_om, without_om = toy_shape_bench(args.seed)
    _write_json(
        args.report,
        {"with_om": with_om.to_json_dict(), "without_om": without_om.to_json_dict()},
    )
    if args.do_assert:
        invariant = (
            with_om.clean_accuracy == with_om.average_accuracy == with_om.worst_case_accuracy
        )
        separated = without_om.worst_case_accuracy < without_om.clean_accuracy
        if not (invariant and separated):
            print("orbit-bench assertion failed", file=sys.stderr)
            return EXIT_ASSERT_FAILED
    return EXIT_OK


def _add_image_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma", type=float, default=_DEFAULTS.sigma, help="blur std in pixels")
    parser.add_argument("--radii", default="0.05,0.4", help="comma-separated circle radii")
    parser.add_argument("--samples", type=int, default=_DEFAULTS.samples, help="samples per circle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbitmap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonicalize-image", help="rotate an image to its canonical orientation")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--report", default=None, help="JSON report path (default: stdout)")
    p.add_argument("--interp", choices=("nearest", "bilinear", "bicubic"), default="bilinear")
    _add_image_options(p)
    p.set_defaults(fn=_cmd_canonicalize_image)

    p = sub.add_parser("canonicalize-cloud", help="canonicalize a point cloud")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--report", default=None)
    p.add_argument("--mode", choices=("center", "scale", "pca", "similarity"), default="similarity")
    p.add_argument("--proper-rotation", action="store_true", dest="proper_rotation")
    p.set_defaults(fn=_cmd_canonicalize_cloud)

    p = sub.add_parser("stability-report", help="orientation dispersion over a rotation sweep")
    p.add_argument("images", nargs="*", help="PGM/PPM files")
    p.add_argument("--synthetic", type=int, default=None, help="use N seeded synthetic images")
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    p.add_argument("--noise-var", type=float, default=0.0, dest="noise_var")
    p.add_argument("--step-deg", type=float, default=_DEFAULTS.step_deg, dest="step_deg")
    p.add_argument("--interp", choices=("nearest", "bilinear", "bicubic"), default=_DEFAULTS.interpolation)
    p.add_argument("--estimator", choices=("exact", "central", "forward"), default=_DEFAULTS.estimator)
    p.add_argument("--report", default=None)
    _add_image_options(p)
    p.set_defaults(fn=_cmd_stability_report)

    p = sub.add_parser("kernel-check", help="test a kernel pair's rotation condition")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--builtin", choices=("central", "forward"))
    group.add_argument("--pair", help='JSON file with {"k1": [[...]], "k2": [[...]]}')
    p.add_argument("--turns", type=int, nargs="+", default=[1, 2, 3], choices=(1, 2, 3))
    p.add_argument("--report", default=None)
    p.set_defaults(fn=_cmd_kernel_check)

    p = sub.add_parser("orbit-bench", help="toy shape-classification invariance bench")
    p.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    p.add_argument("--assert", action="store_true", dest="do_assert",
                   help="exit 4 unless the with-OM report is exactly invariant")
    p.add_argument("--report", default=None)
    p.set_defaults(fn=_cmd_orbit_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DegenerateInputError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
