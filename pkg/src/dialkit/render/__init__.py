"""Deterministic procedural rendering of clock and gauge faces.

The pipeline factorizes every image into a dial state (what the instrument
reads) and an appearance condition (how it is photographed): `render_dial_face`
rasterizes the canonical fronto-parallel dial, `apply_appearance` adds
viewpoint, illumination, glare, and blur, and `render_sample` composes both
and reports the metadata actually used.
"""

from .appearance import (
    SPLITS,
    AppearanceCondition,
    sample_appearance,
)
from .effects import apply_appearance, dial_homography, project_points, warp_perspective
from .raster import render_dial_face
from .style import Palette, StyleConfig, style_from_seed


def render_sample(state, cond, style):
    """Render one sample and return (image, metadata-as-used).

    The metadata dict carries the exact state, appearance (with severities),
    and style fingerprint needed to reproduce the image bit for bit.
    """
    from ..states import state_to_json, task_of

    img = apply_appearance(render_dial_face(state, style), cond)
    meta = {
        "task": task_of(state),
        "state": state_to_json(state),
        "appearance": cond.to_json(),
        "image_size": style.image_size_px,
        "supersample": style.supersample,
    }
    return img, meta


__all__ = [
    "SPLITS",
    "AppearanceCondition",
    "Palette",
    "StyleConfig",
    "apply_appearance",
    "dial_homography",
    "project_points",
    "render_dial_face",
    "render_sample",
    "sample_appearance",
    "style_from_seed",
    "warp_perspective",
]
