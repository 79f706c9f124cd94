import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import plkg
from plkg.features import CONSTANTS, GOLDEN_POINTS, TONAL_CLASSES, extract_all


def solid(value, shape=(32, 32)):
    return np.full(shape + (3,), value, dtype=np.uint8)


def noisy_concurrent_lines(seed=7, point=(0.5, 0.4), n=24, sigma_deg=1.0):
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(n):
        theta = rng.uniform(0, 2 * math.pi)
        r1 = rng.uniform(0.2, 0.5)
        p1 = (point[0] + r1 * math.cos(theta), point[1] + r1 * math.sin(theta))
        theta2 = theta + math.radians(rng.normal(0, sigma_deg))
        p2 = (p1[0] + 0.5 * math.cos(theta2), p1[1] + 0.5 * math.sin(theta2))
        lines.append((p1, p2))
    return lines


class TestTonalKey:
    def test_white_is_high(self):
        assert plkg.tonal_key(solid(255)) == "high"

    def test_black_is_low(self):
        assert plkg.tonal_key(solid(0)) == "low"

    def test_middle_gray_is_full(self):
        assert plkg.tonal_key(solid(128)) == "full"

    def test_values_near_thresholds(self):
        # 0.60 * 255 = 153 and 0.40 * 255 = 102; stay one step away from
        # the cut because the luma weights do not sum to exactly 1.0.
        assert plkg.tonal_key(solid(154)) == "high"
        assert plkg.tonal_key(solid(152)) == "full"
        assert plkg.tonal_key(solid(103)) == "full"
        assert plkg.tonal_key(solid(101)) == "low"

    def test_class_codes(self):
        assert TONAL_CLASSES == {"low": 0, "full": 1, "high": 2}


class TestSymmetry:
    def test_mirror_symmetric_scores_one(self):
        rng = np.random.default_rng(3)
        half = rng.integers(0, 256, size=(64, 32, 3), dtype=np.uint8)
        img = np.concatenate([half, half[:, ::-1]], axis=1)
        assert plkg.symmetry_score(img, "vertical_mirror") == pytest.approx(1.0, abs=1e-9)

    def test_uniform_noise_scores_two_thirds(self):
        rng = np.random.default_rng(42)
        noise = rng.integers(0, 256, size=(512, 512), dtype=np.uint8)
        assert plkg.symmetry_score(noise, "vertical_mirror") == pytest.approx(2 / 3, abs=0.01)
        assert plkg.symmetry_score(noise, "horizontal_mirror") == pytest.approx(2 / 3, abs=0.01)

    def test_axes_differ(self):
        img = np.zeros((16, 16, 3), np.uint8)
        img[:8] = 255  # top half white: horizontally asymmetric, vertically symmetric
        assert plkg.symmetry_score(img, "vertical_mirror") == pytest.approx(1.0)
        assert plkg.symmetry_score(img, "horizontal_mirror") < 0.5

    def test_unknown_axis_rejected(self):
        with pytest.raises(ValueError):
            plkg.symmetry_score(solid(0), "diagonal")


class TestNegativeSpace:
    def test_constant_image_is_all_negative_space(self):
        assert plkg.negative_space_ratio(solid(200)) == 1.0

    def test_noise_is_no_negative_space(self):
        rng = np.random.default_rng(0)
        noise = rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8)
        assert plkg.negative_space_ratio(noise) < 0.05

    def test_fill_ratio_is_complement(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, size=(48, 48, 3), dtype=np.uint8)
        img[:24] = 255
        assert plkg.fill_ratio(img) == pytest.approx(1.0 - plkg.negative_space_ratio(img))


class TestWarmCold:
    def test_warm_bottom_cold_top_is_minus_one(self):
        img = np.zeros((2, 4, 3), np.uint8)
        img[1, :, 0] = 255  # bottom row pure red
        img[0, :, 2] = 255  # top row pure blue
        assert plkg.warm_cold_gradient(img, bands=2) == pytest.approx(-1.0)

    def test_cold_bottom_warm_top_is_plus_one(self):
        img = np.zeros((2, 4, 3), np.uint8)
        img[0, :, 0] = 255
        img[1, :, 2] = 255
        assert plkg.warm_cold_gradient(img, bands=2) == pytest.approx(1.0)

    def test_neutral_image_is_zero(self):
        assert plkg.warm_cold_gradient(solid(77)) == pytest.approx(0.0)

    def test_too_many_bands_rejected(self):
        with pytest.raises(plkg.BandsExceedHeight):
            plkg.warm_cold_gradient(solid(0, shape=(3, 3)), bands=5)


class TestHardEdges:
    def test_step_edge_is_hard(self):
        img = np.zeros((64, 64), np.uint8)
        img[:, 32:] = 255
        assert plkg.hard_edge_fraction(img) == pytest.approx(1.0)

    def test_shallow_ramp_is_soft(self):
        ramp = np.tile(np.linspace(0, 255, 64).astype(np.uint8), (64, 1))
        assert plkg.hard_edge_fraction(ramp) == pytest.approx(0.0)

    def test_flat_image_has_no_candidates(self):
        assert plkg.hard_edge_fraction(solid(128)) == 0.0

    def test_tiny_image_rejected(self):
        with pytest.raises(plkg.ImageTooSmall):
            plkg.hard_edge_fraction(np.zeros((2, 2, 3), np.uint8))


class TestSCurve:
    def test_full_height_path(self):
        path = [(0.5, 0.0), (0.2, 0.5), (0.8, 1.0)]
        assert plkg.s_curve_coverage(path) == pytest.approx(1.0)

    def test_acceptance_boundary(self):
        assert plkg.s_curve_coverage([(0.5, 0.2), (0.5, 0.79)]) == pytest.approx(0.59)
        assert plkg.s_curve_coverage([(0.5, 0.2), (0.5, 0.80)]) == pytest.approx(0.60)

    def test_reparameterization_invariant(self):
        sparse = [(0.5, 0.1), (0.5, 0.9)]
        dense = [(0.5, 0.1), (0.5, 0.3), (0.5, 0.5), (0.5, 0.7), (0.5, 0.9)]
        assert plkg.s_curve_coverage(sparse) == plkg.s_curve_coverage(dense)

    def test_width_axis(self):
        path = [(0.1, 0.5), (0.95, 0.5)]
        assert plkg.s_curve_coverage(path, axis="width") == pytest.approx(0.85)

    def test_degenerate_path_rejected(self):
        with pytest.raises(plkg.DegeneratePath):
            plkg.s_curve_coverage([(0.5, 0.5)])


class TestVanishingPoint:
    def test_exact_concurrent_lines(self):
        target = (0.5, 0.4)
        lines = [
            ((target[0] + 0.3 * math.cos(t), target[1] + 0.3 * math.sin(t)),
             (target[0] + 0.8 * math.cos(t), target[1] + 0.8 * math.sin(t)))
            for t in (0.3, 1.2, 2.0, 2.7)
        ]
        vp = plkg.vanishing_point(lines)
        assert math.hypot(vp.point[0] - target[0], vp.point[1] - target[1]) <= 1e-6
        assert vp.convergence_rms <= 1e-6

    def test_noisy_lines_within_tolerance(self):
        lines = noisy_concurrent_lines(seed=7)
        vp = plkg.vanishing_point(lines)
        assert math.hypot(vp.point[0] - 0.5, vp.point[1] - 0.4) <= 0.02

    def test_parallel_lines_rejected(self):
        lines = [((0.0, y), (1.0, y)) for y in (0.2, 0.5, 0.8)]
        with pytest.raises(plkg.AllParallel):
            plkg.vanishing_point(lines)

    def test_single_line_rejected(self):
        with pytest.raises(plkg.AllParallel):
            plkg.vanishing_point([((0, 0), (1, 1))])


class TestGoldenPoints:
    def test_four_points(self):
        assert sorted(GOLDEN_POINTS) == [
            (0.382, 0.382), (0.382, 0.618), (0.618, 0.382), (0.618, 0.618),
        ]

    def test_on_point_distance_zero(self):
        assert plkg.golden_point_min_distance((0.618, 0.382)) == 0.0

    def test_center_distance(self):
        expected = math.hypot(0.5 - 0.382, 0.5 - 0.382)
        assert plkg.golden_point_min_distance((0.5, 0.5)) == pytest.approx(expected)

    def test_outside_unit_square_rejected(self):
        with pytest.raises(ValueError):
            plkg.golden_point_min_distance((1.2, 0.5))


class TestExtractAll:
    def test_deterministic(self):
        rng = np.random.default_rng(5)
        img = rng.integers(0, 256, size=(40, 40, 3), dtype=np.uint8)
        assert extract_all(img) == extract_all(img)

    def test_optional_keys_omitted_without_inputs(self):
        fv = extract_all(solid(100))
        assert "s_curve_coverage" not in fv
        assert "vanishing_convergence" not in fv

    def test_optional_keys_present_with_inputs(self):
        lines = noisy_concurrent_lines()
        fv = extract_all(solid(100), path=[(0.5, 0.0), (0.5, 0.9)], lines=lines)
        assert fv["s_curve_coverage"] == pytest.approx(0.9)
        assert "vanishing_convergence" in fv
        assert "golden_point_min_distance" in fv

    def test_values_within_declared_ranges(self):
        from plkg.schema import FEATURE_KEY_RANGES

        rng = np.random.default_rng(9)
        img = rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8)
        fv = extract_all(img, path=[(0.1, 0.1), (0.9, 0.9)],
                         lines=noisy_concurrent_lines(seed=2))
        for key, value in fv.items():
            lo, hi = FEATURE_KEY_RANGES[key]
            assert lo <= value <= hi, key


class TestSuggestions:
    def test_bright_image_suggests_high_key(self, schema):
        fv = extract_all(solid(250))
        ids = [s.node_id for s in plkg.suggest_labels(schema, fv)]
        assert "light.value-system.tonal-key.high" in ids
        assert "light.value-system.tonal-key.low" not in ids

    def test_empty_vector_no_suggestions(self, schema):
        assert plkg.suggest_labels(schema, {}) == []

    def test_sorted_by_score_then_id(self, schema):
        fv = {"mean_luminance": 0.2, "negative_space_ratio": 0.8, "fill_ratio": 0.2}
        suggestions = plkg.suggest_labels(schema, fv)
        keys = [(-s.score, s.node_id) for s in suggestions]
        assert keys == sorted(keys)

    def test_s_curve_criterion_drives_suggestion(self, schema):
        hit = plkg.suggest_labels(schema, {"s_curve_coverage": 0.60})
        assert any(s.node_id == "comp.type.geometric.s-curve" for s in hit)
        miss = plkg.suggest_labels(schema, {"s_curve_coverage": 0.59})
        assert not any(s.node_id == "comp.type.geometric.s-curve" for s in miss)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_symmetry_bounds_on_random_images(seed):
    rng = np.random.default_rng(seed)
    img = rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8)
    for axis in ("vertical_mirror", "horizontal_mirror"):
        assert 0.0 <= plkg.symmetry_score(img, axis) <= 1.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_warm_cold_clipped_on_random_images(seed):
    rng = np.random.default_rng(seed)
    img = rng.integers(0, 256, size=(10, 10, 3), dtype=np.uint8)
    assert -1.0 <= plkg.warm_cold_gradient(img) <= 1.0
