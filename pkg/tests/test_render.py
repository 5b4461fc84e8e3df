import math

import numpy as np
import pytest

from dialkit.errors import DomainError, StyleError
from dialkit.render import (
    AppearanceCondition,
    StyleConfig,
    apply_appearance,
    dial_homography,
    project_points,
    render_dial_face,
    render_sample,
    sample_appearance,
    style_from_seed,
)
from dialkit.states import ClockState, GaugeState, clock_from_minutes
from oracle_utils import (
    circular_angle_error,
    count_color,
    minute_hand_band,
    quad_support_points,
    ray_pixels,
    scan_indicator_angle,
)

STYLE = StyleConfig(image_size_px=256)


class TestDialFace:
    def test_double_render_is_byte_identical(self):
        a = render_dial_face(ClockState(6, 30), STYLE)
        b = render_dial_face(ClockState(6, 30), STYLE)
        assert np.array_equal(a, b)

    def test_three_oclock_rays(self):
        img = render_dial_face(ClockState(3, 0), STYLE)
        # Hour hand lies along the 90-degree ray; face along 270.
        on_hand = ray_pixels(img, STYLE, 90.0, 0.12, STYLE.hour_hand_len_frac - 0.04,
                             mode="clock")
        assert count_color(on_hand, STYLE.palette.hand_hour) > 0
        off_hand = ray_pixels(img, STYLE, 270.0, 0.12, 0.7, mode="clock")
        assert count_color(off_hand, STYLE.palette.face) == off_hand.shape[0]

    def test_six_thirty_hand_rays(self):
        img = render_dial_face(ClockState(6, 30), STYLE)
        lo, hi = minute_hand_band(STYLE)
        minute_ray = ray_pixels(img, STYLE, 180.0, lo, hi, mode="clock")
        assert count_color(minute_ray, STYLE.palette.hand_minute) > 0
        hour_ray = ray_pixels(img, STYLE, 195.0, 0.2, STYLE.hour_hand_len_frac - 0.04,
                              mode="clock")
        assert count_color(hour_ray, STYLE.palette.hand_hour) > 0

    def test_gauge_pointer_rays(self):
        img = render_dial_face(GaugeState(0.0), STYLE)
        on_ray = ray_pixels(img, STYLE, 180.0, 0.2, STYLE.pointer_len_frac - 0.04,
                            mode="gauge")
        assert count_color(on_ray, STYLE.palette.pointer) > 0
        off_ray = ray_pixels(img, STYLE, 0.0, STYLE.hub_radius_frac + 0.12,
                             STYLE.pointer_len_frac, mode="gauge")
        assert count_color(off_ray, STYLE.palette.pointer) == 0

    def test_minute_hand_estimator_on_sampled_positions(self):
        lo, hi = minute_hand_band(STYLE)
        for minute in (0, 7, 15, 23, 38, 51, 59):
            img = render_dial_face(ClockState(2, minute), STYLE)
            angle, score = scan_indicator_angle(img, STYLE, STYLE.palette.hand_minute,
                                                lo, hi, mode="clock")
            assert score > 0
            assert circular_angle_error(angle, 6.0 * minute) <= 3.0

    def test_gauge_pointer_estimator(self):
        for value in (0.0, 25.0, 50.0, 62.5, 100.0):
            img = render_dial_face(GaugeState(value), STYLE)
            angle, score = scan_indicator_angle(
                img, STYLE, STYLE.palette.pointer,
                STYLE.hub_radius_frac + 0.1, STYLE.pointer_len_frac - 0.03,
                mode="gauge")
            assert score > 0
            assert circular_angle_error(angle, 180.0 - 1.8 * value) <= 3.0

    def test_supersampling_does_not_move_estimator_argmax(self):
        plain = StyleConfig(image_size_px=256, supersample=1)
        smooth = StyleConfig(image_size_px=256, supersample=2)
        lo, hi = minute_hand_band(plain)
        for minute in (4, 17, 29, 44):
            img1 = render_dial_face(ClockState(9, minute), plain)
            img2 = render_dial_face(ClockState(9, minute), smooth)
            a1, _ = scan_indicator_angle(img1, plain, plain.palette.hand_minute,
                                         lo, hi, mode="clock")
            a2, _ = scan_indicator_angle(img2, smooth, smooth.palette.hand_minute,
                                         lo, hi, mode="clock")
            assert a1 == a2

    def test_numerals_render_and_leave_hands_readable(self):
        style = StyleConfig(image_size_px=256, numerals_enabled=True)
        img_plain = render_dial_face(ClockState(10, 10), StyleConfig(image_size_px=256))
        img = render_dial_face(ClockState(10, 10), style)
        assert not np.array_equal(img, img_plain)
        lo, hi = minute_hand_band(style)
        angle, _ = scan_indicator_angle(img, style, style.palette.hand_minute,
                                        lo, hi, mode="clock")
        assert circular_angle_error(angle, 60.0) <= 3.0

    def test_degenerate_style_rejected(self):
        with pytest.raises(StyleError):
            StyleConfig(dial_radius_frac=0.0)
        with pytest.raises(StyleError):
            render_dial_face(ClockState(1, 0), StyleConfig(image_size_px=32,
                                                           dial_radius_frac=0.05))


class TestAppearancePipeline:
    def test_identity_condition_is_byte_identity(self):
        img = render_dial_face(ClockState(4, 45), STYLE)
        out = apply_appearance(img, AppearanceCondition.neutral())
        assert np.array_equal(out, img)
        assert out is not img

    def test_blur_of_uniform_image_is_identity(self):
        img = np.full((64, 64, 3), 137, dtype=np.uint8)
        out = apply_appearance(img, AppearanceCondition(blur_sigma_px=1.0))
        assert np.array_equal(out, img)

    def test_warped_square_corners_match_homography_oracle(self):
        size = 200
        img = np.zeros((size, size, 3), dtype=np.uint8)
        half = 30
        img[size // 2 - half:size // 2 + half, size // 2 - half:size // 2 + half] = 255
        cond = AppearanceCondition(pitch_deg=30.0)
        out = apply_appearance(img, cond)

        hom = dial_homography(cond, dial_radius_px=0.42 * size)
        corners = np.array([[-half, -half], [half, -half], [half, half], [-half, half]],
                           dtype=np.float64)
        oracle = project_points(hom, corners)

        mask = np.all(out > 127, axis=-1)
        centroid = oracle.mean(axis=0)
        directions = []
        for cx, cy in oracle:
            v = np.array([cx, cy]) - centroid
            directions.append(v / np.linalg.norm(v))
        measured = quad_support_points(mask, directions)
        for (mx, my), (ox, oy) in zip(measured, oracle):
            assert math.hypot(mx - ox, my - oy) <= 1.0

    def test_roll_only_rotates_in_plane(self):
        # Under pure roll, the homography reduces to a 2-d rotation.
        cond = AppearanceCondition(roll_deg=20.0)
        hom = dial_homography(cond, dial_radius_px=100.0)
        pts = np.array([[10.0, 0.0], [0.0, 10.0]])
        got = project_points(hom, pts)
        c, s = math.cos(math.radians(20)), math.sin(math.radians(20))
        expected = np.array([[10 * c, 10 * s], [-10 * s, 10 * c]])
        assert np.allclose(got, expected, atol=1e-9)

    def test_stage_composition_differs_from_identity(self):
        img = render_dial_face(ClockState(8, 20), STYLE)
        cond = sample_appearance("combined", 0.7, 99)
        out = apply_appearance(img, cond)
        assert out.shape == img.shape
        assert not np.array_equal(out, img)


class TestSampleAppearance:
    def test_clean_split_caps_both_severities(self):
        for seed in range(40):
            cond = sample_appearance("clean", 1.0, seed)
            assert cond.view_severity <= 0.1
            assert cond.illum_severity <= 0.1

    def test_view_split_leaves_illum_neutral(self):
        cond = sample_appearance("view", 0.8, 7)
        assert cond.brightness == 1.0
        assert cond.gamma == 1.0
        assert cond.glare_intensity == 0.0
        assert cond.blur_sigma_px == 0.0
        assert cond.gradient_strength == 0.0
        assert cond.illum_severity == 0.0
        assert cond.view_severity == pytest.approx(0.8)

    def test_illum_split_leaves_pose_neutral(self):
        cond = sample_appearance("illum", 0.6, 11)
        assert cond.pitch_deg == 0.0 and cond.yaw_deg == 0.0 and cond.roll_deg == 0.0
        assert cond.view_severity == 0.0
        assert cond.illum_severity == pytest.approx(0.6)

    def test_deterministic_in_inputs(self):
        a = sample_appearance("combined", 0.37, 123456)
        b = sample_appearance("combined", 0.37, 123456)
        assert a == b
        c = sample_appearance("combined", 0.37, 123457)
        assert a != c

    def test_zero_severity_is_identity_condition(self):
        for split in ("clean", "view", "illum", "combined"):
            assert sample_appearance(split, 0.0, 5).is_identity

    def test_validation(self):
        with pytest.raises(DomainError):
            sample_appearance("weird", 0.5, 1)
        with pytest.raises(DomainError):
            sample_appearance("view", 1.5, 1)
        with pytest.raises(DomainError):
            AppearanceCondition(pitch_deg=80.0)
        with pytest.raises(DomainError):
            AppearanceCondition(brightness=0.2)


class TestRenderSample:
    def test_metadata_reflects_inputs(self):
        cond = sample_appearance("illum", 0.4, 21)
        img, meta = render_sample(ClockState(6, 30), cond, STYLE)
        assert meta["task"] == "clock"
        assert meta["state"] == {"kind": "clock", "text": "6:30"}
        assert meta["appearance"]["illum_severity"] == pytest.approx(0.4)
        assert img.shape == (256, 256, 3)

    def test_state_fields_unaffected_by_appearance(self):
        cond_a = sample_appearance("combined", 0.2, 1)
        cond_b = sample_appearance("combined", 0.9, 2)
        _, meta_a = render_sample(ClockState(1, 5), cond_a, STYLE)
        _, meta_b = render_sample(ClockState(1, 5), cond_b, STYLE)
        assert meta_a["state"] == meta_b["state"]
        assert meta_a["appearance"] != meta_b["appearance"]


def test_style_pool_is_deterministic_and_varied():
    s1 = style_from_seed(42, "clock", image_size_px=256)
    s2 = style_from_seed(42, "clock", image_size_px=256)
    assert s1 == s2
    pool = {style_from_seed(seed, "clock").palette.face for seed in range(12)}
    assert len(pool) > 1


def test_style_config_file_round_trip():
    style = style_from_seed(9, "gauge", image_size_px=256)
    assert StyleConfig.from_json(style.to_json()) == style
    with pytest.raises(StyleError):
        StyleConfig.from_json({"frobnicate": 1})
    with pytest.raises(StyleError):
        StyleConfig.from_json({"palette": {"face": [0, 0, 0], "nope": [1, 1, 1]}})


def test_random_styles_render_readable_dials():
    for seed in (3, 77, 2024):
        style = style_from_seed(seed, "clock", image_size_px=256)
        state = clock_from_minutes(137)
        img = render_dial_face(state, style)
        lo, hi = minute_hand_band(style)
        angle, _ = scan_indicator_angle(img, style, style.palette.hand_minute,
                                        lo, hi, mode="clock")
        assert circular_angle_error(angle, 6.0 * state.minute) <= 3.0
