"""Tour of dial states and the distances everything else is built on.

A dial state is a clock time (720 minute states on a 12-hour cycle) or a
calibrated gauge value.  Distances between states drive triplet margins,
rewards, and the tolerance metrics, so this walk-through shows how they
behave, especially around the cycle wrap.
"""

from dialkit import (
    ClockState,
    GaugeState,
    clock_distance,
    clock_hand_angles,
    state_distance_normalized,
)

print("== clock states ==")
for hm in [(0, 0), (3, 0), (6, 30), (11, 59)]:
    state = ClockState(*hm)
    hour_angle, minute_angle = clock_hand_angles(state)
    print(f"  {state.hour:2d}:{state.minute:02d} -> hour hand {hour_angle:6.1f} deg, "
          f"minute hand {minute_angle:5.1f} deg")

print("\n== circular distance wraps at the cycle ==")
pairs = [((0, 0), (0, 1)), ((11, 59), (0, 1)), ((3, 0), (9, 0)), ((1, 30), (7, 30))]
for a, b in pairs:
    sa, sb = ClockState(*a), ClockState(*b)
    print(f"  d({a[0]}:{a[1]:02d}, {b[0]}:{b[1]:02d}) = "
          f"{clock_distance(sa, sb):3d} minutes "
          f"(normalized {state_distance_normalized(sa, sb):.4f})")

print("\n== gauges share the same normalized scale ==")
for v1, v2 in [(30.0, 70.0), (0.0, 100.0), (50.0, 52.0)]:
    d = state_distance_normalized(GaugeState(v1), GaugeState(v2))
    print(f"  gauge {v1:5.1f} vs {v2:5.1f} -> normalized distance {d:.4f}")

print("\nThe 12-hour cycle means 3:00 and 9:00 are maximally far apart (360")
print("minutes), while 11:59 and 12:01 are only 2 minutes apart. Margins and")
print("rewards all consume the normalized [0, 1] distance, so clocks and")
print("gauges can share one sigma and one margin schedule.")
