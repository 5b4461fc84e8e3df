"""Supersampled rasterizer for canonical (fronto-parallel) dial faces.

Geometry lives in a centered coordinate frame measured in final-image
pixels: x grows to the right, y grows downward, origin at the image center.
Clock angles are measured clockwise from 12 o'clock, so the direction of
angle A is (sin A, -cos A).  Gauge angles put 0 degrees at 3 o'clock and
grow toward 12 o'clock, direction (cos A, -sin A).

Rendering paints hard (non-anti-aliased) masks onto a float canvas at
`supersample` times the final resolution, then box-downfilters.  All masks
are painted in a fixed order, so a given build produces bit-identical
buffers for identical inputs.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import StyleError, VariantMismatchError
from ..states import (
    ClockState,
    DialState,
    GaugeState,
    clock_hand_angles,
    gauge_value_to_angle,
)
from .style import StyleConfig

# Seven-segment strokes per digit; segment endpoints are defined on a unit
# box (width 1, height 2) with the origin at the top-left corner.
_SEGMENTS = {
    "A": ((0.0, 0.0), (1.0, 0.0)),
    "B": ((1.0, 0.0), (1.0, 1.0)),
    "C": ((1.0, 1.0), (1.0, 2.0)),
    "D": ((0.0, 2.0), (1.0, 2.0)),
    "E": ((0.0, 1.0), (0.0, 2.0)),
    "F": ((0.0, 0.0), (0.0, 1.0)),
    "G": ((0.0, 1.0), (1.0, 1.0)),
}
_DIGIT_SEGMENTS = {
    "0": "ABCDEF",
    "1": "BC",
    "2": "ABGED",
    "3": "ABGCD",
    "4": "FGBC",
    "5": "AFGCD",
    "6": "AFGEDC",
    "7": "ABC",
    "8": "ABCDEFG",
    "9": "ABCFGD",
}


class _Canvas:
    """Supersampled paint target with capsule/disc primitives.

    Painting writes palette indices into a uint8 label plane (cheap per
    pixel); `finish` colorizes through a lookup table while box-averaging
    the supersample blocks.
    """

    def __init__(self, style: StyleConfig):
        self.size = style.image_size_px
        self.ss = style.supersample
        n = self.size * self.ss
        self.n = n
        # Subpixel centers in final-pixel units, origin at the image center.
        self.coords = (np.arange(n) + 0.5) / self.ss - self.size / 2.0
        self.labels = np.zeros((n, n), dtype=np.uint8)
        self.colors: list[tuple[int, int, int]] = [tuple(style.palette.background)]

    def _color_index(self, color) -> int:
        color = tuple(color)
        try:
            return self.colors.index(color)
        except ValueError:
            self.colors.append(color)
            return len(self.colors) - 1

    def _window(self, x_lo, x_hi, y_lo, y_hi):
        c = self.coords
        j0, j1 = np.searchsorted(c, x_lo), np.searchsorted(c, x_hi, side="right")
        i0, i1 = np.searchsorted(c, y_lo), np.searchsorted(c, y_hi, side="right")
        return i0, i1, j0, j1

    def paint_disc(self, center, radius, color) -> None:
        idx = self._color_index(color)
        cx, cy = center
        i0, i1, j0, j1 = self._window(cx - radius, cx + radius, cy - radius, cy + radius)
        x = self.coords[j0:j1][None, :] - cx
        y = self.coords[i0:i1][:, None] - cy
        mask = x * x + y * y <= radius * radius
        self.labels[i0:i1, j0:j1][mask] = idx

    def paint_capsule(self, p0, p1, halfwidth, color) -> None:
        idx = self._color_index(color)
        x_lo = min(p0[0], p1[0]) - halfwidth
        x_hi = max(p0[0], p1[0]) + halfwidth
        y_lo = min(p0[1], p1[1]) - halfwidth
        y_hi = max(p0[1], p1[1]) + halfwidth
        i0, i1, j0, j1 = self._window(x_lo, x_hi, y_lo, y_hi)
        x = self.coords[j0:j1][None, :] - p0[0]
        y = self.coords[i0:i1][:, None] - p0[1]
        dx, dy = p1[0] - p0[0], p1[1] - p0[1]
        seg_len2 = dx * dx + dy * dy
        if seg_len2 == 0.0:
            d2 = x * x + y * y
        else:
            t = np.clip((x * dx + y * dy) / seg_len2, 0.0, 1.0)
            d2 = (x - t * dx) ** 2 + (y - t * dy) ** 2
        mask = d2 <= halfwidth * halfwidth
        self.labels[i0:i1, j0:j1][mask] = idx

    def finish(self) -> np.ndarray:
        lut = np.asarray(self.colors, dtype=np.float32)
        s = self.ss
        if s == 1:
            out = lut[self.labels]
        else:
            out = np.zeros((self.size, self.size, 3), dtype=np.float32)
            for dy in range(s):
                for dx in range(s):
                    out += lut[self.labels[dy::s, dx::s]]
            out /= s * s
        return np.rint(out).astype(np.uint8)


def _clock_dir(angle_deg: float) -> tuple[float, float]:
    a = math.radians(angle_deg)
    return math.sin(a), -math.cos(a)


def _gauge_dir(angle_deg: float) -> tuple[float, float]:
    a = math.radians(angle_deg)
    return math.cos(a), -math.sin(a)


def _paint_radial_ticks(canvas, center, angles_deg, r_inner, r_outer, halfwidth,
                        color, direction) -> None:
    for a in angles_deg:
        ux, uy = direction(a)
        p0 = (center[0] + r_inner * ux, center[1] + r_inner * uy)
        p1 = (center[0] + r_outer * ux, center[1] + r_outer * uy)
        canvas.paint_capsule(p0, p1, halfwidth, color)


def _paint_digit_string(canvas, text, center, height, halfwidth, color) -> None:
    width = 0.5 * height
    advance = 0.8 * height
    total = advance * len(text) - (advance - width)
    x0 = center[0] - total / 2.0
    y0 = center[1] - height / 2.0
    for k, ch in enumerate(text):
        ox = x0 + k * advance
        for seg in _DIGIT_SEGMENTS[ch]:
            (ax, ay), (bx, by) = _SEGMENTS[seg]
            p0 = (ox + ax * width, y0 + ay * height / 2.0)
            p1 = (ox + bx * width, y0 + by * height / 2.0)
            canvas.paint_capsule(p0, p1, halfwidth, color)


def _render_clock(state: ClockState, style: StyleConfig, canvas: _Canvas) -> None:
    pal = style.palette
    R = style.dial_radius_px
    center = (0.0, 0.0)

    # Ring disc first, face disc over it: the visible ring is the rim.
    canvas.paint_disc(center, R, pal.ring)
    canvas.paint_disc(center, R * (1.0 - style.ring_width_frac), pal.face)

    minor_angles = [6.0 * m for m in range(60) if m % 5 != 0]
    major_angles = [30.0 * h for h in range(12)]
    _paint_radial_ticks(canvas, center, minor_angles,
                        R * style.minor_tick_inner_frac, R * style.tick_outer_frac,
                        R * style.minor_tick_width_frac / 2.0, pal.tick, _clock_dir)
    _paint_radial_ticks(canvas, center, major_angles,
                        R * style.major_tick_inner_frac, R * style.tick_outer_frac,
                        R * style.major_tick_width_frac / 2.0, pal.tick, _clock_dir)

    if style.numerals_enabled:
        height = R * style.numeral_height_frac
        for h in range(12):
            label = "12" if h == 0 else str(h)
            ux, uy = _clock_dir(30.0 * h)
            pos = (R * style.numeral_radius_frac * ux,
                   R * style.numeral_radius_frac * uy)
            _paint_digit_string(canvas, label, pos, height, 0.07 * height, pal.tick)

    hour_angle, minute_angle = clock_hand_angles(state)
    hx, hy = _clock_dir(hour_angle)
    mx, my = _clock_dir(minute_angle)
    canvas.paint_capsule(center, (R * style.hour_hand_len_frac * hx,
                                  R * style.hour_hand_len_frac * hy),
                         R * style.hour_hand_width_frac / 2.0, pal.hand_hour)
    canvas.paint_capsule(center, (R * style.minute_hand_len_frac * mx,
                                  R * style.minute_hand_len_frac * my),
                         R * style.minute_hand_width_frac / 2.0, pal.hand_minute)
    canvas.paint_disc(center, R * style.hub_radius_frac, pal.hub)


def _render_gauge(state: GaugeState, style: StyleConfig, canvas: _Canvas) -> None:
    pal = style.palette
    cal = state.calibration
    R = style.dial_radius_px
    center = (0.0, 0.0)

    canvas.paint_disc(center, R, pal.ring)
    canvas.paint_disc(center, R * (1.0 - style.ring_width_frac), pal.face)

    n_intervals = cal.major_ticks * (cal.minor_per_major + 1)
    step = (cal.angle_end_deg - cal.angle_start_deg) / n_intervals
    minor_angles, major_angles = [], []
    for k in range(n_intervals + 1):
        angle = cal.angle_start_deg + k * step
        if k % (cal.minor_per_major + 1) == 0:
            major_angles.append(angle)
        else:
            minor_angles.append(angle)
    _paint_radial_ticks(canvas, center, minor_angles,
                        R * style.minor_tick_inner_frac, R * style.tick_outer_frac,
                        R * style.minor_tick_width_frac / 2.0, pal.tick, _gauge_dir)
    _paint_radial_ticks(canvas, center, major_angles,
                        R * style.major_tick_inner_frac, R * style.tick_outer_frac,
                        R * style.major_tick_width_frac / 2.0, pal.tick, _gauge_dir)

    angle = gauge_value_to_angle(state)
    ux, uy = _gauge_dir(angle)
    tail = R * style.pointer_tail_frac
    tip = R * style.pointer_len_frac
    canvas.paint_capsule((-tail * ux, -tail * uy), (tip * ux, tip * uy),
                         R * style.pointer_width_frac / 2.0, pal.pointer)
    canvas.paint_disc(center, R * style.hub_radius_frac, pal.hub)


def render_dial_face(state: DialState, style: StyleConfig) -> np.ndarray:
    """Rasterize the canonical dial image for a state.

    Returns an (H, W, 3) uint8 array.  Identical inputs produce bit-identical
    buffers.
    """
    if style.dial_radius_px < 4:
        raise StyleError("dial radius degenerate at this image size")
    canvas = _Canvas(style)
    if isinstance(state, ClockState):
        _render_clock(state, style, canvas)
    elif isinstance(state, GaugeState):
        _render_gauge(state, style, canvas)
    else:
        raise VariantMismatchError(f"not a dial state: {type(state).__name__}")
    return canvas.finish()
