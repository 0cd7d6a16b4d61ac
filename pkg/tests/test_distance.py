import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from segloss import (
    DegenerateInputError,
    ValidationError,
    boundary_penalty_map,
    edt,
    edt_bruteforce,
    hausdorff_exact,
    level_set,
    one_hot,
    sentinel_value,
    unsigned_boundary_distance,
)

masks_1d = hnp.arrays(bool, st.integers(1, 24))
masks_2d = hnp.arrays(bool, st.tuples(st.integers(1, 10), st.integers(1, 10)))


class TestEdtExamples:
    def test_single_source_line(self):
        np.testing.assert_array_equal(edt(np.array([0, 0, 1, 0], bool)), [2, 1, 0, 1])
        np.testing.assert_array_equal(edt(np.array([1, 0, 0, 0], bool)), [0, 1, 2, 3])

    def test_center_source_3x3(self):
        m = np.zeros((3, 3), bool)
        m[1, 1] = True
        d = edt(m)
        r2 = np.sqrt(2.0)
        np.testing.assert_allclose(d, [[r2, 1, r2], [1, 0, 1], [r2, 1, r2]], atol=1e-12)

    def test_pythagorean_triple(self):
        m = np.zeros((4, 5), bool)
        m[0, 0] = True
        assert edt(m)[3, 4] == pytest.approx(5.0, abs=1e-12)

    def test_anisotropic_spacing(self):
        d = edt(np.array([1, 0, 0], bool), spacing=[2.5])
        np.testing.assert_allclose(d, [0.0, 2.5, 5.0])

    def test_empty_source_gives_sentinel(self):
        m = np.zeros((3, 4), bool)
        d = edt(m)
        assert (d == sentinel_value(m.shape, None)).all()
        assert d[0, 0] == 7.0

    def test_all_sources_gives_zero(self):
        np.testing.assert_array_equal(edt(np.ones((2, 3), bool)), 0.0)


class TestEdtAgainstBruteForce:
    @given(masks_2d)
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force_2d(self, m):
        np.testing.assert_allclose(edt(m), edt_bruteforce(m), atol=1e-9)

    def test_matches_on_random_3d_with_spacing(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            shape = tuple(rng.integers(1, 7, size=3))
            m = rng.random(shape) < 0.35
            sp = rng.uniform(0.5, 3.0, size=3)
            np.testing.assert_allclose(
                edt(m, sp), edt_bruteforce(m, sp), atol=1e-9
            )


class TestEdtInvariants:
    @given(masks_1d)
    @settings(max_examples=60, deadline=None)
    def test_lipschitz_between_neighbors(self, m):
        d = edt(m)
        if m.any() and m.size > 1:
            assert np.abs(np.diff(d)).max() <= 1.0 + 1e-12

    @given(masks_2d)
    @settings(max_examples=40, deadline=None)
    def test_zero_exactly_on_sources(self, m):
        if not m.any():
            return
        d = edt(m)
        assert (d[m] == 0.0).all()
        assert (d[~m] > 0.0).all()


class TestLevelSet:
    def test_sign_convention(self):
        phi = level_set(np.array([0, 0, 1, 1, 0], bool))
        np.testing.assert_array_equal(phi, [2, 1, -1, -1, 1])

    @given(masks_1d)
    @settings(max_examples=60, deadline=None)
    def test_complement_antisymmetry(self, m):
        if not m.any() or m.all():
            return
        np.testing.assert_allclose(level_set(m), -level_set(~m), atol=1e-12)

    def test_degenerate_masks_get_sentinel(self):
        empty = np.zeros(4, bool)
        snt = sentinel_value((4,), None)
        np.testing.assert_array_equal(level_set(empty), snt)
        np.testing.assert_array_equal(level_set(~empty), -snt)


class TestUnsignedBoundaryDistance:
    def test_checkerboard_is_all_ones(self):
        m = np.indices((2, 2)).sum(0) % 2 == 0
        np.testing.assert_array_equal(unsigned_boundary_distance(m), 1.0)

    def test_matches_level_set_magnitude(self):
        rng = np.random.default_rng(5)
        m = rng.random((6, 7)) < 0.4
        np.testing.assert_allclose(
            unsigned_boundary_distance(m), np.abs(level_set(m)), atol=1e-12
        )

    def test_degenerate_gives_sentinel(self):
        d = unsigned_boundary_distance(np.ones((2, 2), bool))
        assert (d == sentinel_value((2, 2), None)).all()


class TestBoundaryPenaltyMap:
    def test_values_in_unit_interval_with_distant_pixels_low(self):
        g = one_hot(np.array([0, 0, 0, 0, 1, 0, 0, 0, 0]), 2)
        pen = boundary_penalty_map(g)
        assert pen.shape == g.shape
        assert (pen >= 0).all() and (pen <= 1).all()
        # the farthest pixel from each class boundary carries zero penalty
        assert pen[..., 1].min() == 0.0

    def test_degenerate_class_is_zeroed(self):
        g = one_hot(np.zeros(5, dtype=int), 2)
        pen = boundary_penalty_map(g)
        np.testing.assert_array_equal(pen, 0.0)

    @given(masks_1d, st.floats(0.25, 8.0))
    @settings(max_examples=40, deadline=None)
    def test_spacing_scale_invariance(self, m, scale):
        if not m.any() or m.all():
            return
        g = np.stack([(~m).astype(float), m.astype(float)], axis=-1)
        base = boundary_penalty_map(g, spacing=[1.0])
        scaled = boundary_penalty_map(g, spacing=[scale])
        np.testing.assert_allclose(base, scaled, atol=1e-12)


class TestHausdorffExact:
    def test_known_value(self):
        g = np.array([0, 0, 1, 1, 0], bool)
        s = np.array([0, 0, 1, 1, 1], bool)
        assert hausdorff_exact(g, s) == pytest.approx(1.0)

    def test_identical_masks_zero(self):
        m = np.array([1, 0, 1], bool)
        assert hausdorff_exact(m, m) == 0.0

    @given(masks_1d, masks_1d.map(np.copy))
    @settings(max_examples=40, deadline=None)
    def test_symmetry(self, a, b):
        if a.shape != b.shape or not a.any() or not b.any():
            return
        assert hausdorff_exact(a, b) == hausdorff_exact(b, a)

    def test_rejects_and_names_empty_side(self):
        full = np.ones(3, bool)
        empty = np.zeros(3, bool)
        with pytest.raises(DegenerateInputError, match="first"):
            hausdorff_exact(empty, full)
        with pytest.raises(DegenerateInputError, match="second"):
            hausdorff_exact(full, empty)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValidationError):
            hausdorff_exact(np.ones(3, bool), np.ones(4, bool))


class TestSentinel:
    def test_value_is_extent_sum(self):
        assert sentinel_value((3, 4), None) == 7.0
        assert sentinel_value((3, 4), [2.0, 0.5]) == 8.0

    def test_dominates_any_distance(self):
        rng = np.random.default_rng(9)
        m = rng.random((5, 6)) < 0.5
        if m.any():
            assert edt(m).max() < sentinel_value(m.shape, None)
