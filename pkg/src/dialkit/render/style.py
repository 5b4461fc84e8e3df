"""Dial style configuration and the seeded style pool."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from ..errors import StyleError
from ..rng import SplitMix64

RGB = tuple[int, int, int]


def _check_rgb(name: str, color) -> None:
    if (
        len(color) != 3
        or not all(isinstance(c, int) and 0 <= c <= 255 for c in color)
    ):
        raise StyleError(f"{name} must be an RGB triple of ints in [0, 255], got {color!r}")


@dataclass(frozen=True)
class Palette:
    background: RGB = (228, 228, 230)
    face: RGB = (248, 248, 246)
    ring: RGB = (44, 46, 52)
    tick: RGB = (36, 38, 44)
    hand_hour: RGB = (54, 54, 62)
    hand_minute: RGB = (16, 16, 22)
    pointer: RGB = (186, 32, 38)
    hub: RGB = (36, 38, 44)

    def __post_init__(self):
        for name in ("background", "face", "ring", "tick", "hand_hour",
                     "hand_minute", "pointer", "hub"):
            _check_rgb(name, getattr(self, name))

    def to_json(self) -> dict:
        return {name: list(getattr(self, name)) for name in
                ("background", "face", "ring", "tick", "hand_hour",
                 "hand_minute", "pointer", "hub")}

    @staticmethod
    def from_json(obj: dict) -> "Palette":
        known = {f.name for f in fields(Palette)}
        unknown = set(obj) - known
        if unknown:
            raise StyleError(f"unknown palette keys: {sorted(unknown)}")
        return Palette(**{k: tuple(int(c) for c in v) for k, v in obj.items()})


@dataclass(frozen=True)
class StyleConfig:
    """Geometry and palette of one dial style.

    Lengths and widths are fractions of the dial radius; the dial radius is
    `dial_radius_frac` of the image size.  Rasterization supersamples by
    `supersample` in each axis and box-downfilters, which is the only
    anti-aliasing applied.
    """

    image_size_px: int = 448
    supersample: int = 2
    dial_radius_frac: float = 0.42
    palette: Palette = Palette()
    ring_width_frac: float = 0.055
    # clock ticks
    tick_outer_frac: float = 0.935
    major_tick_inner_frac: float = 0.84
    minor_tick_inner_frac: float = 0.89
    major_tick_width_frac: float = 0.035
    minor_tick_width_frac: float = 0.014
    # clock hands
    minute_hand_len_frac: float = 0.80
    minute_hand_width_frac: float = 0.050
    hour_hand_len_frac: float = 0.52
    hour_hand_width_frac: float = 0.078
    hub_radius_frac: float = 0.050
    numerals_enabled: bool = False
    numeral_radius_frac: float = 0.70
    numeral_height_frac: float = 0.115
    # gauge
    pointer_len_frac: float = 0.78
    pointer_width_frac: float = 0.055
    pointer_tail_frac: float = 0.14

    def __post_init__(self):
        if self.image_size_px < 32:
            raise StyleError("image_size_px must be at least 32")
        if self.supersample < 1:
            raise StyleError("supersample must be >= 1")
        if not (0.0 < self.dial_radius_frac <= 0.5):
            raise StyleError("dial_radius_frac must lie in (0, 0.5]")
        if not (0.0 < self.ring_width_frac < 0.5):
            raise StyleError("ring_width_frac must lie in (0, 0.5)")
        for name in ("tick_outer_frac", "major_tick_inner_frac",
                     "minor_tick_inner_frac", "minute_hand_len_frac",
                     "hour_hand_len_frac", "pointer_len_frac"):
            value = getattr(self, name)
            if not (0.0 < value <= 1.0):
                raise StyleError(f"{name} must lie in (0, 1], got {value}")
        for name in ("major_tick_width_frac", "minor_tick_width_frac",
                     "minute_hand_width_frac", "hour_hand_width_frac",
                     "hub_radius_frac", "pointer_width_frac"):
            value = getattr(self, name)
            if value <= 0:
                raise StyleError(f"{name} must be positive, got {value}")

    @property
    def dial_radius_px(self) -> float:
        return self.dial_radius_frac * self.image_size_px

    def to_json(self) -> dict:
        """Documented key-value form: field names map one-to-one."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = value.to_json() if f.name == "palette" else value
        return out

    @staticmethod
    def from_json(obj: dict) -> "StyleConfig":
        known = {f.name for f in fields(StyleConfig)}
        unknown = set(obj) - known
        if unknown:
            raise StyleError(f"unknown style keys: {sorted(unknown)}")
        kwargs = dict(obj)
        if "palette" in kwargs:
            kwargs["palette"] = Palette.from_json(kwargs["palette"])
        return StyleConfig(**kwargs)


def style_from_seed(
    seed: int,
    task: str = "clock",
    image_size_px: int = 448,
    supersample: int = 2,
) -> StyleConfig:
    """Deterministic style pool: one seed, one fully specified style.

    The pool varies the cosmetic parameters (face/background tint, ring
    width, dial radius, tick lengths) and keeps the state-carrying geometry
    (hand and pointer shape, palette entries the readout tests key on)
    fixed, so any style renders a readable dial.
    """
    rng = SplitMix64(seed)
    face_grey = 240 + rng.randint(12)
    face_warm = rng.randint(5)
    bg_grey = 214 + rng.randint(26)
    ring_grey = 30 + rng.randint(26)
    palette = Palette(
        background=(bg_grey, bg_grey, bg_grey),
        face=(face_grey, face_grey, max(0, face_grey - face_warm)),
        ring=(ring_grey, ring_grey + 2, ring_grey + 8),
    )
    style = StyleConfig(
        image_size_px=image_size_px,
        supersample=supersample,
        dial_radius_frac=0.40 + 0.05 * rng.random(),
        palette=palette,
        ring_width_frac=0.04 + 0.025 * rng.random(),
        tick_outer_frac=0.925 + 0.02 * rng.random(),
        major_tick_inner_frac=0.83 + 0.02 * rng.random(),
        minor_tick_inner_frac=0.88 + 0.02 * rng.random(),
    )
    if task == "gauge":
        style = replace(style, pointer_len_frac=0.74 + 0.06 * rng.random())
    return style
