import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitmap.groups import (
    TAU,
    CanonicalResult,
    Permutation,
    RigidSimilarity3D,
    Rotation2D,
    equivariant_wrap,
    mean_subtract,
    sort_orbit_map,
)
from orbitmap.pointcloud import orbit_map_similarity

angles = st.floats(min_value=1e-12, max_value=TAU, exclude_max=True)


class TestRotation2D:
    @given(angles, angles)
    def test_compose_is_addition_mod_tau(self, a, b):
        composed = Rotation2D(a).compose(Rotation2D(b))
        assert 0.0 <= composed.angle < TAU
        expected = (a + b) % TAU
        diff = abs(composed.angle - expected) % TAU
        assert min(diff, TAU - diff) < 1e-9

    @given(angles)
    def test_compose_with_inverse_is_identity_exactly(self, a):
        rot = Rotation2D(a)
        assert rot.compose(rot.invert()).angle == 0.0

    def test_identity_inverse(self):
        assert Rotation2D(0.0).invert().angle == 0.0

    def test_matrix_is_rotation(self):
        m = Rotation2D(0.7).matrix()
        assert np.allclose(m @ m.T, np.eye(2), atol=1e-15)
        assert np.isclose(np.linalg.det(m), 1.0)

    def test_normalization(self):
        assert Rotation2D(TAU + 0.5).angle == pytest.approx(0.5)
        assert 0.0 <= Rotation2D(-0.5).angle < TAU


class TestRigidSimilarity3D:
    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            RigidSimilarity3D(rotation=np.eye(3) * 1.5, translation=np.zeros(3), scale=1.0)

    def test_rejects_non_positive_scale(self):
        with pytest.raises(ValueError):
            RigidSimilarity3D(rotation=np.eye(3), translation=np.zeros(3), scale=0.0)

    def test_apply_then_inverse_roundtrips(self, rng):
        pts = rng.normal(size=(40, 3))
        for _ in range(10):
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            t = RigidSimilarity3D(rotation=q, translation=rng.normal(size=3), scale=rng.uniform(0.1, 10))
            back = t.invert().apply(t.apply(pts))
            assert np.abs(back - pts).max() <= 1e-9 * max(1.0, np.abs(pts).max())

    def test_compose_matches_sequential_application(self, rng):
        pts = rng.normal(size=(10, 3))
        q1, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        q2, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        t1 = RigidSimilarity3D(rotation=q1, translation=rng.normal(size=3), scale=2.0)
        t2 = RigidSimilarity3D(rotation=q2, translation=rng.normal(size=3), scale=0.25)
        assert np.allclose(t2.compose(t1).apply(pts), t2.apply(t1.apply(pts)), atol=1e-12)


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation(np.array([0, 0, 2]))

    @given(st.permutations(list(range(6))))
    def test_invert_roundtrips(self, mapping):
        p = Permutation(np.array(mapping))
        v = np.arange(6, dtype=float) * 1.5
        assert np.array_equal(p.invert().apply(p.apply(v)), v)

    def test_compose(self):
        p = Permutation(np.array([1, 2, 0]))
        q = Permutation(np.array([2, 1, 0]))
        v = np.array([10.0, 20.0, 30.0])
        assert np.array_equal(q.compose(p).apply(v), q.apply(p.apply(v)))


class TestMeanSubtract:
    def test_simple_example(self):
        result = mean_subtract([1.0, 2.0, 3.0])
        assert np.array_equal(result.canonical, [-1.0, 0.0, 1.0])
        assert result.element == 2.0

    def test_constant_vector(self):
        result = mean_subtract([5.0, 5.0, 5.0])
        assert np.array_equal(result.canonical, [0.0, 0.0, 0.0])
        assert result.element == 5.0

    def test_orbit_invariance_under_integer_shift(self):
        v = np.array([3.0, -1.0, 4.0, 2.0])
        assert np.array_equal(mean_subtract(v).canonical, mean_subtract(v + 7.0).canonical)

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=30),
           st.floats(min_value=-1e3, max_value=1e3))
    def test_orbit_invariance_property(self, values, shift):
        v = np.asarray(values)
        a = mean_subtract(v)
        b = mean_subtract(v + shift)
        scale = max(1.0, np.abs(v).max(), abs(shift))
        assert np.abs(a.canonical - b.canonical).max() <= 1e-9 * scale
        assert abs(np.mean(a.canonical)) <= 1e-12 * max(1.0, np.abs(v).max())
        assert np.abs(v - a.element - a.canonical).max() <= 1e-12 * scale

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty input"):
            mean_subtract([])


class TestSortOrbitMap:
    def test_simple_example(self):
        result = sort_orbit_map([-3.0, 1.0, 2.0])
        assert np.array_equal(result.canonical, [1.0, 2.0, -3.0])

    def test_all_permutations_share_canonical(self):
        from itertools import permutations

        outputs = {tuple(sort_orbit_map(list(p)).canonical) for p in permutations([-3.0, 1.0, 2.0])}
        assert outputs == {(1.0, 2.0, -3.0)}

    def test_tie_rule_picks_unique_fixed_point(self):
        # Oracle: enumerate all orderings of the multiset and keep the ones
        # the map leaves unchanged; the tie rule must make that unique.
        from itertools import permutations

        fixed_points = set()
        for p in permutations([2.0, -2.0, 1.0]):
            out = tuple(sort_orbit_map(list(p)).canonical)
            if out == p:
                fixed_points.add(out)
        assert fixed_points == {(1.0, -2.0, 2.0)}
        assert np.array_equal(sort_orbit_map([2.0, -2.0, 1.0]).canonical, [1.0, -2.0, 2.0])

    def test_element_reproduces_canonical(self):
        v = np.array([4.0, -4.0, 0.5, 4.0])
        result = sort_orbit_map(v)
        assert np.array_equal(result.element.apply(v), result.canonical)

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=32), min_size=1, max_size=20))
    def test_orbit_invariance_and_idempotence(self, values):
        v = np.asarray(values, dtype=float)
        rng = np.random.default_rng(len(values))
        shuffled = v[rng.permutation(v.size)]
        a = sort_orbit_map(v)
        b = sort_orbit_map(shuffled)
        assert np.array_equal(a.canonical, b.canonical)
        assert np.array_equal(np.abs(a.canonical), np.sort(np.abs(v)))
        again = sort_orbit_map(a.canonical)
        assert np.array_equal(again.canonical, a.canonical)
        assert np.array_equal(again.element.mapping, np.arange(v.size))


class TestEquivariantWrap:
    def test_identity_inner_function(self):
        v = np.array([3.0, -1.0, 2.0])
        out = equivariant_wrap(sort_orbit_map, lambda x: x, v)
        assert np.array_equal(out, v)

    def test_pointcloud_scale_inner_function(self, rng):
        pts = rng.normal(size=(30, 3))
        inner = lambda cloud: 2.0 * np.asarray(cloud)
        base = equivariant_wrap(orbit_map_similarity, inner, pts)
        for _ in range(5):
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            q *= np.linalg.det(q)  # proper rotation
            rotated_out = equivariant_wrap(orbit_map_similarity, inner, pts @ q)
            assert np.abs(rotated_out - base @ q).max() <= 1e-9

    def test_equivariance_defect_random_rigid_transforms(self, rng):
        pts = rng.normal(size=(40, 3))
        w1 = rng.normal(size=(3, 5))
        w2 = rng.normal(size=(5, 3))

        def inner(cloud):
            x = np.asarray(cloud)
            return x + 0.2 * np.tanh(x @ w1) @ w2

        base = equivariant_wrap(orbit_map_similarity, inner, pts)
        worst = 0.0
        for _ in range(20):
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            q *= np.linalg.det(q)
            t = RigidSimilarity3D(rotation=q, translation=rng.uniform(-1, 1, 3), scale=1.0)
            defect = np.abs(equivariant_wrap(orbit_map_similarity, inner, t.apply(pts)) - t.apply(base)).max()
            worst = max(worst, defect)
        assert worst <= 1e-6


class TestCanonicalResult:
    def test_is_generic_container(self):
        r = CanonicalResult(canonical=np.array([1.0]), element=0.5)
        assert r.element == 0.5
