"""Render a gallery: one state under many appearance conditions, and the
same appearance across neighboring states.

Every image factors into (state, appearance, style).  The appearance axes
(viewpoint, illumination, glare, blur) never change the state metadata, and
a zero-severity condition reproduces the canonical render byte for byte.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from dialkit import (
    AppearanceCondition,
    ClockState,
    GaugeState,
    StyleConfig,
    apply_appearance,
    render_dial_face,
    sample_appearance,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

style = StyleConfig(image_size_px=224)
state = ClockState(6, 30)
canonical = render_dial_face(state, style)

print("same state, increasing combined severity:")
tiles = [canonical]
for k, severity in enumerate([0.25, 0.5, 0.75, 1.0]):
    cond = sample_appearance("combined", severity, seed=900 + k)
    tiles.append(apply_appearance(canonical, cond))
    print(f"  severity {severity:.2f}: view={cond.view_severity:.2f} "
          f"illum={cond.illum_severity:.2f} pitch={cond.pitch_deg:+.1f} "
          f"blur={cond.blur_sigma_px:.2f}")
row_same_state = np.hstack(tiles)

print("\nneighboring states under one shared appearance:")
cond = sample_appearance("view", 0.5, seed=41)
tiles = []
for minute in (28, 29, 30, 31, 32):
    img = apply_appearance(render_dial_face(ClockState(6, minute), style), cond)
    tiles.append(img)
print("  6:28 .. 6:32 rendered with identical viewpoint/lighting")
row_neighbors = np.hstack(tiles)

gauge_row = np.hstack([
    apply_appearance(render_dial_face(GaugeState(v), style),
                     sample_appearance("illum", 0.6, seed=77))
    for v in (0.0, 25.0, 50.0, 75.0, 100.0)
])

grid = np.vstack([row_same_state, row_neighbors, gauge_row])
Image.fromarray(grid).save(OUT / "gallery.png")
print(f"\nwrote {OUT / 'gallery.png'}")

identity = apply_appearance(canonical, AppearanceCondition.neutral())
print("neutral condition byte-identical to canonical render:",
      np.array_equal(identity, canonical))
