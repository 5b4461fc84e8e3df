"""Appearance pipeline: perspective warp, illumination, glare, blur.

The stage order is fixed: geometric projection first, then lighting, then
camera-side glare and defocus.  Every stage with neutral parameters is
skipped, and a fully neutral condition returns the input bytes unchanged.

Viewpoint model: the dial plane rotates about its center (roll about the
optical axis, then pitch about the horizontal axis, then yaw about the
vertical axis) and is observed by a pinhole camera at distance 2.5 dial
radii with the principal point at the image center and focal length equal
to the camera distance, so a zero rotation projects one-to-one.  Image
coordinates are centered: x right, y down, in pixels.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import gaussian_filter

from .appearance import AppearanceCondition

CAMERA_DISTANCE_RADII = 2.5
# apply_appearance has no access to the style, so the camera distance is tied
# to the nominal dial radius (the default radius fraction of the image size).
NOMINAL_DIAL_RADIUS_FRAC = 0.42
BLUR_TRUNCATE_SIGMAS = 3.0


def rotation_matrix(pitch_deg: float, yaw_deg: float, roll_deg: float) -> np.ndarray:
    """Combined rotation R = Ry(yaw) @ Rx(pitch) @ Rz(roll), right-handed."""
    p, y, r = (math.radians(a) for a in (pitch_deg, yaw_deg, roll_deg))
    rx = np.array([[1, 0, 0],
                   [0, math.cos(p), -math.sin(p)],
                   [0, math.sin(p), math.cos(p)]])
    ry = np.array([[math.cos(y), 0, math.sin(y)],
                   [0, 1, 0],
                   [-math.sin(y), 0, math.cos(y)]])
    rz = np.array([[math.cos(r), -math.sin(r), 0],
                   [math.sin(r), math.cos(r), 0],
                   [0, 0, 1]])
    return ry @ rx @ rz


def dial_homography(cond: AppearanceCondition, dial_radius_px: float) -> np.ndarray:
    """Homography mapping centered source coords to centered warped coords.

    For a plane point (X, Y, 0) rotated by R and viewed from distance
    d = 2.5 * dial_radius_px with focal length d, the projection is

        u = d (r00 X + r01 Y) / (d + r20 X + r21 Y)
        v = d (r10 X + r11 Y) / (d + r20 X + r21 Y)

    which in homogeneous form is the matrix returned here.
    """
    d = CAMERA_DISTANCE_RADII * dial_radius_px
    r = rotation_matrix(cond.pitch_deg, cond.yaw_deg, cond.roll_deg)
    return np.array([
        [d * r[0, 0], d * r[0, 1], 0.0],
        [d * r[1, 0], d * r[1, 1], 0.0],
        [r[2, 0], r[2, 1], d],
    ])


def project_points(homography: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Apply a homography to an (N, 2) array of points."""
    pts = np.asarray(points, dtype=np.float64)
    ones = np.ones((pts.shape[0], 1))
    h = (np.hstack([pts, ones]) @ homography.T)
    return h[:, :2] / h[:, 2:3]


def warp_perspective(img: np.ndarray, homography: np.ndarray,
                     background: np.ndarray) -> np.ndarray:
    """Inverse-map a homography over a float image with bilinear sampling.

    Destination pixels whose preimage falls outside the source are filled
    with `background` (an RGB float triple).
    """
    h, w = img.shape[:2]
    hinv = np.linalg.inv(homography)
    if hinv[2, 2] < 0:
        hinv = -hinv  # keep the front-of-camera half-space at denom > 0
    xs = np.arange(w) + 0.5 - w / 2.0
    ys = np.arange(h) + 0.5 - h / 2.0
    denom = hinv[2, 0] * xs[None, :] + (hinv[2, 1] * ys)[:, None] + hinv[2, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = (hinv[0, 0] * xs[None, :] + (hinv[0, 1] * ys)[:, None] + hinv[0, 2]) / denom
        sy = (hinv[1, 0] * xs[None, :] + (hinv[1, 1] * ys)[:, None] + hinv[1, 2]) / denom
    # Back to array indices (pixel centers at integer indices).
    sx = sx + w / 2.0 - 0.5
    sy = sy + h / 2.0 - 0.5

    valid = (denom > 0) & (sx >= 0) & (sx <= w - 1) & (sy >= 0) & (sy <= h - 1)
    sx = np.where(valid, sx, 0.0)
    sy = np.where(valid, sy, 0.0)
    x0 = np.clip(np.floor(sx), 0, w - 2).astype(np.int32)
    y0 = np.clip(np.floor(sy), 0, h - 2).astype(np.int32)
    fx = (sx - x0).astype(img.dtype)[..., None]
    fy = (sy - y0).astype(img.dtype)[..., None]
    flat = img.reshape(-1, img.shape[2])
    i00 = (y0 * w + x0).ravel()
    c00 = flat.take(i00, axis=0).reshape(img.shape)
    c01 = flat.take(i00 + 1, axis=0).reshape(img.shape)
    c10 = flat.take(i00 + w, axis=0).reshape(img.shape)
    c11 = flat.take(i00 + w + 1, axis=0).reshape(img.shape)
    one = np.asarray(1.0, dtype=img.dtype)
    out = (c00 * (one - fx) + c01 * fx) * (one - fy) + (c10 * (one - fx) + c11 * fx) * fy
    out[~valid] = background
    return out


def _gradient_field(h: int, w: int, direction_deg: float) -> np.ndarray:
    """Signed ramp along `direction_deg`, roughly -0.5..0.5 across the image."""
    a = math.radians(direction_deg)
    xs = ((np.arange(w, dtype=np.float32) + 0.5 - w / 2.0) / w) * np.float32(math.cos(a))
    ys = ((np.arange(h, dtype=np.float32) + 0.5 - h / 2.0) / h) * np.float32(math.sin(a))
    return xs[None, :] + ys[:, None]


def _glare_field(h: int, w: int, cond: AppearanceCondition) -> np.ndarray:
    size = max(h, w)
    cx = (cond.glare_center_u - 0.5) * w
    cy = (cond.glare_center_v - 0.5) * h
    rx = cond.glare_radius_u * size
    ry = cond.glare_radius_v * size
    xs = (np.arange(w, dtype=np.float32) + 0.5 - w / 2.0 - cx) / rx
    ys = (np.arange(h, dtype=np.float32) + 0.5 - h / 2.0 - cy) / ry
    return np.exp(-0.5 * (xs[None, :] ** 2 + ys[:, None] ** 2))


def apply_appearance(img: np.ndarray, cond: AppearanceCondition) -> np.ndarray:
    """Apply an appearance condition to a rendered uint8 image.

    Stages run in the fixed order warp, illumination (brightness and gamma,
    then additive linear gradient), additive elliptical Gaussian glare, and
    Gaussian blur truncated at three sigmas.  A neutral condition is the
    identity, byte for byte.
    """
    if cond.is_identity:
        return img.copy()

    h, w = img.shape[:2]
    buf = img.astype(np.float32) / np.float32(255.0)

    if cond.pitch_deg != 0.0 or cond.yaw_deg != 0.0 or cond.roll_deg != 0.0:
        # Background taken from the image corner, which the dial never reaches.
        background = buf[0, 0].copy()
        hom = dial_homography(cond, dial_radius_px=NOMINAL_DIAL_RADIUS_FRAC * max(h, w))
        buf = warp_perspective(buf, hom, background)

    if cond.brightness != 1.0 or cond.gamma != 1.0 or cond.gradient_strength != 0.0:
        buf = np.clip(np.float32(cond.brightness) * buf, 0.0, 1.0)
        if cond.gamma != 1.0:
            buf **= np.float32(1.0 / cond.gamma)
        if cond.gradient_strength != 0.0:
            ramp = _gradient_field(h, w, cond.gradient_direction_deg)
            buf = buf + np.float32(cond.gradient_strength) * ramp[..., None]
        buf = np.clip(buf, 0.0, 1.0)

    if cond.glare_intensity != 0.0:
        glare = np.float32(cond.glare_intensity) * _glare_field(h, w, cond)[..., None]
        buf = np.clip(buf + glare, 0.0, 1.0)

    if cond.blur_sigma_px != 0.0:
        buf = gaussian_filter(buf, sigma=(cond.blur_sigma_px, cond.blur_sigma_px, 0.0),
                              truncate=BLUR_TRUNCATE_SIGMAS, mode="nearest")

    return np.rint(buf * np.float32(255.0)).astype(np.uint8)
