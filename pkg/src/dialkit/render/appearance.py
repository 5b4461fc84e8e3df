"""Appearance conditions: the nuisance factors that change pixels, not state.

Each axis has a documented range and a neutral value.  The normalized
magnitude of an axis is its distance from neutral divided by the maximum
deviation the range allows (gamma is measured in log units so that brightening
and darkening are symmetric).  The two severity fields summarize the axis
groups: view severity is the max over pose axes, illumination severity the
max over lighting/glare/blur axes.

Axis ranges and neutrals:

    pitch_deg, yaw_deg        [-45, 45]    neutral 0
    roll_deg                  [-30, 30]    neutral 0
    brightness                [0.5, 1.5]   neutral 1
    gamma                     [0.6, 1.6]   neutral 1, magnitude |ln g| / ln 1.6
    gradient_strength         [0, 0.5]     neutral 0
    glare_intensity           [0, 0.6]     neutral 0
    blur_sigma_px             [0, 3]       neutral 0

Gradient direction, glare center and radii are sub-parameters of their axis;
they carry no severity of their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError
from ..rng import SplitMix64

SPLITS = ("clean", "view", "illum", "combined")
CLEAN_SEVERITY_CAP = 0.1

PITCH_MAX_DEG = 45.0
YAW_MAX_DEG = 45.0
ROLL_MAX_DEG = 30.0
BRIGHTNESS_MAX_DEV = 0.5
GAMMA_MAX_LOG = math.log(1.6)
GRADIENT_MAX = 0.5
GLARE_MAX = 0.6
BLUR_MAX_PX = 3.0


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not (lo <= value <= hi):
        raise DomainError(f"{name} must lie in [{lo}, {hi}], got {value}")


@dataclass(frozen=True)
class AppearanceCondition:
    pitch_deg: float = 0.0
    yaw_deg: float = 0.0
    roll_deg: float = 0.0
    brightness: float = 1.0
    gamma: float = 1.0
    gradient_strength: float = 0.0
    gradient_direction_deg: float = 0.0
    glare_intensity: float = 0.0
    glare_center_u: float = 0.5
    glare_center_v: float = 0.5
    glare_radius_u: float = 0.25
    glare_radius_v: float = 0.25
    blur_sigma_px: float = 0.0
    view_severity: float | None = None
    illum_severity: float | None = None

    def __post_init__(self):
        _check_range("pitch_deg", self.pitch_deg, -PITCH_MAX_DEG, PITCH_MAX_DEG)
        _check_range("yaw_deg", self.yaw_deg, -YAW_MAX_DEG, YAW_MAX_DEG)
        _check_range("roll_deg", self.roll_deg, -ROLL_MAX_DEG, ROLL_MAX_DEG)
        _check_range("brightness", self.brightness, 0.5, 1.5)
        _check_range("gamma", self.gamma, 0.6, 1.6)
        _check_range("gradient_strength", self.gradient_strength, 0.0, GRADIENT_MAX)
        _check_range("glare_intensity", self.glare_intensity, 0.0, GLARE_MAX)
        _check_range("glare_center_u", self.glare_center_u, 0.0, 1.0)
        _check_range("glare_center_v", self.glare_center_v, 0.0, 1.0)
        _check_range("glare_radius_u", self.glare_radius_u, 1e-6, 0.75)
        _check_range("glare_radius_v", self.glare_radius_v, 1e-6, 0.75)
        _check_range("blur_sigma_px", self.blur_sigma_px, 0.0, BLUR_MAX_PX)
        derived_view = self._derived_view_severity()
        derived_illum = self._derived_illum_severity()
        if self.view_severity is None:
            object.__setattr__(self, "view_severity", derived_view)
        elif abs(self.view_severity - derived_view) > 1e-9:
            raise DomainError(
                f"view_severity {self.view_severity} inconsistent with axes "
                f"(derived {derived_view})"
            )
        if self.illum_severity is None:
            object.__setattr__(self, "illum_severity", derived_illum)
        elif abs(self.illum_severity - derived_illum) > 1e-9:
            raise DomainError(
                f"illum_severity {self.illum_severity} inconsistent with axes "
                f"(derived {derived_illum})"
            )

    def _derived_view_severity(self) -> float:
        return max(
            abs(self.pitch_deg) / PITCH_MAX_DEG,
            abs(self.yaw_deg) / YAW_MAX_DEG,
            abs(self.roll_deg) / ROLL_MAX_DEG,
        )

    def _derived_illum_severity(self) -> float:
        return max(
            abs(self.brightness - 1.0) / BRIGHTNESS_MAX_DEV,
            min(abs(math.log(self.gamma)) / GAMMA_MAX_LOG, 1.0),
            self.gradient_strength / GRADIENT_MAX,
            self.glare_intensity / GLARE_MAX,
            self.blur_sigma_px / BLUR_MAX_PX,
        )

    @property
    def is_identity(self) -> bool:
        """True when every stage of the appearance pipeline is a no-op."""
        return (
            self.pitch_deg == 0.0
            and self.yaw_deg == 0.0
            and self.roll_deg == 0.0
            and self.brightness == 1.0
            and self.gamma == 1.0
            and self.gradient_strength == 0.0
            and self.glare_intensity == 0.0
            and self.blur_sigma_px == 0.0
        )

    def to_json(self) -> dict:
        return {
            "pitch_deg": self.pitch_deg,
            "yaw_deg": self.yaw_deg,
            "roll_deg": self.roll_deg,
            "brightness": self.brightness,
            "gamma": self.gamma,
            "gradient_strength": self.gradient_strength,
            "gradient_direction_deg": self.gradient_direction_deg,
            "glare_intensity": self.glare_intensity,
            "glare_center_u": self.glare_center_u,
            "glare_center_v": self.glare_center_v,
            "glare_radius_u": self.glare_radius_u,
            "glare_radius_v": self.glare_radius_v,
            "blur_sigma_px": self.blur_sigma_px,
            "view_severity": self.view_severity,
            "illum_severity": self.illum_severity,
        }

    @staticmethod
    def from_json(obj: dict) -> "AppearanceCondition":
        return AppearanceCondition(**{k: obj[k] for k in obj})

    @staticmethod
    def neutral() -> "AppearanceCondition":
        return AppearanceCondition()


def sample_appearance(split: str, severity: float, seed: int) -> AppearanceCondition:
    """Draw an appearance condition for a benchmark split.

    Deterministic in (split, severity, seed).  `severity` in [0, 1] is the
    difficulty dial: the dominant axis of each active group lands exactly at
    that normalized magnitude (scaled by 0.1 for the clean split, whose
    variation stays mild on every axis), remaining axes draw uniformly below
    it.  Inactive groups sit exactly at neutral.
    """
    split = split.lower()
    if split not in SPLITS:
        raise DomainError(f"unknown split {split!r}, expected one of {SPLITS}")
    if not (0.0 <= severity <= 1.0):
        raise DomainError(f"severity must lie in [0, 1], got {severity}")

    rng = SplitMix64(seed)
    # Draw the full parameter block unconditionally so streams stay aligned
    # across splits; inactive groups are reset to neutral afterwards.
    pose_u = [rng.random() for _ in range(3)]
    pose_sign = [rng.sign() for _ in range(3)]
    pose_carrier = rng.randint(3)
    illum_u = [rng.random() for _ in range(5)]
    illum_sign = [rng.sign() for _ in range(2)]
    illum_carrier = rng.randint(5)
    gradient_direction = rng.uniform(0.0, 360.0)
    glare_center = (rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85))
    glare_radii = (rng.uniform(0.12, 0.40), rng.uniform(0.12, 0.40))

    if split == "clean":
        pose_scale = illum_scale = CLEAN_SEVERITY_CAP * severity
    elif split == "view":
        pose_scale, illum_scale = severity, None
    elif split == "illum":
        pose_scale, illum_scale = None, severity
    else:
        pose_scale = illum_scale = severity

    # Severities are recorded from the intended scales (the derived values
    # agree to within float rounding; the constructor cross-checks them).
    kwargs: dict = {
        "view_severity": 0.0 if pose_scale is None else pose_scale,
        "illum_severity": 0.0 if illum_scale is None else illum_scale,
    }
    if pose_scale is None:
        kwargs.update(pitch_deg=0.0, yaw_deg=0.0, roll_deg=0.0)
    else:
        pose_u[pose_carrier] = 1.0
        mags = [pose_scale * u for u in pose_u]
        kwargs.update(
            pitch_deg=pose_sign[0] * mags[0] * PITCH_MAX_DEG,
            yaw_deg=pose_sign[1] * mags[1] * YAW_MAX_DEG,
            roll_deg=pose_sign[2] * mags[2] * ROLL_MAX_DEG,
        )
    if illum_scale is None:
        kwargs.update(
            brightness=1.0, gamma=1.0,
            gradient_strength=0.0, gradient_direction_deg=0.0,
            glare_intensity=0.0, glare_center_u=0.5, glare_center_v=0.5,
            glare_radius_u=0.25, glare_radius_v=0.25,
            blur_sigma_px=0.0,
        )
    else:
        illum_u[illum_carrier] = 1.0
        mags = [illum_scale * u for u in illum_u]
        kwargs.update(
            brightness=1.0 + illum_sign[0] * mags[0] * BRIGHTNESS_MAX_DEV,
            gamma=math.exp(illum_sign[1] * mags[1] * GAMMA_MAX_LOG),
            gradient_strength=mags[2] * GRADIENT_MAX,
            gradient_direction_deg=gradient_direction,
            glare_intensity=mags[3] * GLARE_MAX,
            glare_center_u=glare_center[0],
            glare_center_v=glare_center[1],
            glare_radius_u=glare_radii[0],
            glare_radius_v=glare_radii[1],
            blur_sigma_px=mags[4] * BLUR_MAX_PX,
        )
    return AppearanceCondition(**kwargs)
