import math

import numpy as np
import pytest

from orbitmap.errors import DegenerateOrientationError
from orbitmap.groups import Rotation2D
from orbitmap.image import (
    INTERPOLATION_MODES,
    ContinuousImage,
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


def ramp_image(size: int, gx: float, gy: float, offset: float = 1.0) -> RasterImage:
    """Raster of u(x, y) = offset + gx*x + gy*y sampled at pixel centers."""
    xs = 0.5 + (np.arange(size) + 0.5 - size / 2.0) / size
    xx, yy = np.meshgrid(xs, xs)
    return RasterImage(offset + gx * xx + gy * yy)


class TestRasterImage:
    def test_grayscale_gets_channel_axis(self):
        img = RasterImage(np.zeros((5, 6)))
        assert img.pixels.shape == (5, 6, 1)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            RasterImage(np.zeros((3, 8)))

    def test_bad_channel_count_rejected(self):
        with pytest.raises(ValueError):
            RasterImage(np.zeros((8, 8, 2)))


class TestGaussianBlur:
    def test_constant_preserved(self):
        img = RasterImage(np.full((16, 16), 0.37))
        out = gaussian_blur(img, 1.5)
        assert np.abs(out.pixels - 0.37).max() <= 4 * np.finfo(float).eps

    def test_impulse_center_matches_kernel_oracle(self):
        # independent kernel: truncation radius ceil(3*sigma), renormalized
        sigma = 1.5
        radius = math.ceil(3 * sigma)
        assert radius == 5
        k = np.exp(-0.5 * (np.arange(-radius, radius + 1) / sigma) ** 2)
        k /= k.sum()
        impulse = np.zeros((17, 17))
        impulse[8, 8] = 1.0
        out = gaussian_blur(RasterImage(impulse), sigma)
        assert out.pixels[8, 8, 0] == pytest.approx(k[radius] ** 2, abs=1e-15)
        assert out.pixels[8, 8 + radius, 0] == pytest.approx(k[radius] * k[0], abs=1e-15)
        assert out.pixels[8, 8 + radius + 1, 0] == 0.0

    def test_mass_preserved_for_interior_content(self):
        img = np.zeros((32, 32))
        img[13:19, 13:19] = np.random.default_rng(3).random((6, 6))
        out = gaussian_blur(RasterImage(img), 1.5)
        assert out.pixels.sum() == pytest.approx(img.sum(), rel=1e-9)

    def test_non_positive_sigma_rejected(self):
        with pytest.raises(ValueError):
            gaussian_blur(RasterImage(np.zeros((8, 8))), 0.0)


class TestContinuousImage:
    def test_pixel_centers_reproduce_raster(self, rng):
        img = RasterImage(rng.random((12, 19)))
        cimg = ContinuousImage.from_raster(img, 1.5)
        xs, ys = cimg.pixel_centers()
        pts = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
        inside = (pts > 0).all(axis=1) & (pts < 1).all(axis=1)
        values = cimg.value_at(pts[inside])
        expected = cimg.blurred.pixels.reshape(-1, 1)[inside]
        assert np.array_equal(values, expected)

    def test_outside_domain_rejected(self):
        cimg = ContinuousImage.from_raster(RasterImage(np.zeros((8, 8))), 1.5)
        with pytest.raises(ValueError):
            cimg.value_at([[1.2, 0.5]])
        with pytest.raises(ValueError):
            grad_bilinear(cimg, (0.5, 0.0))


class TestGradBilinear:
    def test_linear_ramp_gradient_everywhere(self, rng):
        cimg = ContinuousImage.from_raster(ramp_image(64, 0.0, 0.8), 1.5)
        pts = rng.uniform(0.3, 0.7, size=(50, 2))
        grads = cimg.gradient_at(pts)[:, :, 0]
        assert np.abs(grads[:, 0]).max() <= 1e-10
        assert np.abs(grads[:, 1] - 0.8).max() <= 1e-10

    def test_constant_gradient_zero(self):
        cimg = ContinuousImage.from_raster(RasterImage(np.full((16, 16), 2.0)), 1.5)
        g = grad_bilinear(cimg, (0.43, 0.57))
        assert np.array_equal(g, np.zeros((2, 1)))

    def test_matches_in_cell_finite_differences(self, rng):
        img = RasterImage(rng.random((32, 32)))
        cimg = ContinuousImage.from_raster(img, 1.5)
        cell = 1.0 / 32
        step = 1e-4 * cell
        for _ in range(25):
            # stay inside one cell: pick a point away from cell edges
            z = (np.floor(rng.uniform(8, 24, 2)) + rng.uniform(0.3, 0.7, 2)) * cell
            g = grad_bilinear(cimg, z)[:, 0]
            fx = (cimg.value_at([z + [step, 0]]) - cimg.value_at([z - [step, 0]]))[0, 0] / (2 * step)
            fy = (cimg.value_at([z + [0, step]]) - cimg.value_at([z - [0, step]]))[0, 0] / (2 * step)
            assert abs(g[0] - fx) <= 1e-8
            assert abs(g[1] - fy) <= 1e-8


class TestGradientIntegral:
    def test_constant_is_exactly_zero(self):
        cimg = ContinuousImage.from_raster(RasterImage(np.full((24, 24), 0.9)), 1.5)
        integral = gradient_integral(cimg)
        assert np.array_equal(integral.vector, np.zeros(2))
        assert integral.magnitude == 0.0

    def test_ramp_parallel_to_gradient(self):
        g = np.array([0.6, -0.3])
        cimg = ContinuousImage.from_raster(ramp_image(96, g[0], g[1]), 1.5)
        v = gradient_integral(cimg).vector
        cosine = v @ g / (np.linalg.norm(v) * np.linalg.norm(g))
        assert cosine == pytest.approx(1.0, abs=1e-9)

    def test_dense_sampling_oracle(self):
        def bump(p):
            return np.exp(-((p[:, 0] - 1.1) ** 2 + (p[:, 1] - 0.6) ** 2) / (2 * 0.5**2))

        img = render_synthetic(bump, Rotation2D(0.0), 96, 96)
        cimg = ContinuousImage.from_raster(img, 1.5)
        coarse = gradient_integral(cimg, SampleCircleSet(samples_per_circle=64)).vector
        dense = gradient_integral(cimg, SampleCircleSet(samples_per_circle=4096)).vector
        assert np.linalg.norm(coarse - dense) <= 1e-3 * np.linalg.norm(dense)

    def test_circle_radii_validated(self):
        with pytest.raises(ValueError):
            SampleCircleSet(radii=(0.05, 0.6))
        with pytest.raises(ValueError):
            SampleCircleSet(radii=())


class TestCanonicalAngle:
    def test_plus_x_ramp_gives_zero(self):
        cimg = ContinuousImage.from_raster(ramp_image(64, 1.0, 0.0), 1.5)
        rot, magnitude = canonical_angle(cimg)
        assert rot.angle == pytest.approx(0.0, abs=1e-12)
        assert magnitude > 0

    def test_plus_y_ramp_gives_quarter_turn(self):
        cimg = ContinuousImage.from_raster(ramp_image(64, 0.0, 1.0), 1.5)
        rot, _ = canonical_angle(cimg)
        assert rot.angle == pytest.approx(math.pi / 2, abs=1e-9)

    def test_constant_image_degenerate(self):
        cimg = ContinuousImage.from_raster(RasterImage(np.full((16, 16), 0.5)), 1.5)
        with pytest.raises(DegenerateOrientationError):
            canonical_angle(cimg)

    def test_alignment_objective_maximized_at_returned_angle(self, scenes20):
        # the closed form must maximize <(1,0), r(a)^T v> over the angle grid
        for scene in scenes20[:5]:
            img = render_synthetic(scene, Rotation2D(0.0), 64, 64)
            cimg = ContinuousImage.from_raster(img, 1.5)
            v = gradient_integral(cimg).vector
            rot, _ = canonical_angle(cimg)
            grid = np.deg2rad(np.arange(0.0, 360.0, 1.0))
            objective = np.cos(grid) * v[0] + np.sin(grid) * v[1]
            best = grid[np.argmax(objective)]
            diff = abs(math.degrees(best - rot.angle)) % 360
            assert min(diff, 360 - diff) <= 1.0


class TestRotateImage:
    def test_zero_angle_bit_identical_all_modes(self, rng):
        img = RasterImage(rng.random((15, 22, 3)))
        for mode in INTERPOLATION_MODES:
            out = rotate_image(img, Rotation2D(0.0), mode)
            assert np.array_equal(out.pixels, img.pixels)

    def test_quarter_turn_nearest_is_exact_array_rotation(self, rng):
        img = RasterImage(rng.random((8, 8)))
        out = rotate_image(img, Rotation2D(math.pi / 2), "nearest")
        assert np.array_equal(out.pixels, np.rot90(img.pixels, 1))

    def test_double_rotation_interior_psnr(self, scenes20):
        img = render_synthetic(scenes20[0], Rotation2D(0.0), 64, 64)
        peak = img.pixels.max()
        gamma = Rotation2D(math.radians(33.0))
        back = rotate_image(rotate_image(img, gamma, "bilinear"), gamma.invert(), "bilinear")
        interior = (slice(16, 48), slice(16, 48))
        err = back.pixels[interior] - img.pixels[interior]
        psnr = 10 * math.log10(peak**2 / np.mean(err**2))
        assert psnr >= 35.0

    def test_invalid_mode_rejected(self):
        with pytest.raises(ValueError):
            rotate_image(RasterImage(np.zeros((8, 8))), Rotation2D(0.1), "lanczos")


class TestOrbitMapImage:
    def test_already_canonical_unchanged(self):
        img = ramp_image(64, 1.0, 0.0)
        result = orbit_map_image(img)
        assert result.element.angle == pytest.approx(0.0, abs=1e-12)
        assert np.array_equal(result.canonical.pixels, img.pixels)

    def test_quarter_turn_copy_maps_to_same_orientation(self, scenes20):
        img = render_synthetic(scenes20[1], Rotation2D(0.0), 64, 64)
        turned = rotate_image(img, Rotation2D(math.pi / 2), "nearest")
        a = orbit_map_image(img)
        b = orbit_map_image(turned)
        diff = (b.element.degrees + 90.0 - a.element.degrees) % 360
        assert min(diff, 360 - diff) <= 1.0
        interior = (slice(20, 44), slice(20, 44))
        assert np.abs(a.canonical.pixels[interior] - b.canonical.pixels[interior]).max() <= 0.05

    def test_four_rotated_copies_align(self, scenes20):
        # rotated copies rendered analytically all map to one orientation
        scene = scenes20[2]
        absolute = []
        for gamma in (0.0, 87.0, 171.0, 264.0):
            img = render_synthetic(scene, Rotation2D(math.radians(gamma)), 64, 64)
            result = orbit_map_image(img)
            absolute.append((result.element.degrees + gamma) % 360)
        spread = max(absolute) - min(absolute)
        spread = min(spread, 360 - spread)
        assert spread <= 2.0

    def test_degenerate_propagates(self):
        with pytest.raises(DegenerateOrientationError):
            orbit_map_image(RasterImage(np.full((16, 16), 1.0)))


class TestRenderSynthetic:
    def test_zero_rotation_samples_pointwise(self):
        def scene(p):
            return p[:, 0] + 2.0 * p[:, 1]

        img = render_synthetic(scene, Rotation2D(0.0), 16, 16)
        xs = 0.5 + (np.arange(16) + 0.5 - 8.0) / 16.0
        xx, yy = np.meshgrid(xs, xs)
        assert np.allclose(img.pixels[:, :, 0], xx + 2 * yy, atol=1e-15)

    def test_rotation_composes_with_scene(self, scenes20):
        scene = scenes20[3]
        gamma = Rotation2D(1.1)

        def pre_rotated(p):
            return scene((p - 0.5) @ gamma.matrix().T + 0.5)

        a = render_synthetic(scene, gamma, 32, 32)
        b = render_synthetic(pre_rotated, Rotation2D(0.0), 32, 32)
        assert np.allclose(a.pixels, b.pixels, atol=1e-12)

    def test_symmetric_scene_invariant(self):
        def radial(p):
            return np.exp(-((p[:, 0] - 0.5) ** 2 + (p[:, 1] - 0.5) ** 2) / 0.02)

        base = render_synthetic(radial, Rotation2D(0.0), 32, 32)
        for gamma in (0.3, 1.7, 4.4):
            out = render_synthetic(radial, Rotation2D(gamma), 32, 32)
            assert np.allclose(out.pixels, base.pixels, atol=1e-12)


class TestConsistencyProperties:
    def test_footnote_consistency_on_analytic_renders(self, scenes20):
        circles = SampleCircleSet(samples_per_circle=128)
        for scene in scenes20[:6]:
            base = render_synthetic(scene, Rotation2D(0.0), 64, 64)
            a0 = canonical_angle(ContinuousImage.from_raster(base, 1.5), circles)[0].degrees
            for gamma in (31.0, 100.0, 213.0, 331.0):
                img = render_synthetic(scene, Rotation2D(math.radians(gamma)), 64, 64)
                ag = canonical_angle(ContinuousImage.from_raster(img, 1.5), circles)[0].degrees
                residual = (ag + gamma - a0) % 360
                assert min(residual, 360 - residual) <= 1.0

    def test_quadrature_convergence(self, scenes20):
        for scene in scenes20[:6]:
            img = render_synthetic(scene, Rotation2D(0.0), 64, 64)
            cimg = ContinuousImage.from_raster(img, 1.5)
            a64 = canonical_angle(cimg, SampleCircleSet(samples_per_circle=64))[0].degrees
            a128 = canonical_angle(cimg, SampleCircleSet(samples_per_circle=128))[0].degrees
            diff = abs(a64 - a128) % 360
            assert min(diff, 360 - diff) <= 0.1
