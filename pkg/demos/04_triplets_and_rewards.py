"""The alignment kernels: state-gap margins, the triplet hinge, state-aware
rewards, and group-relative advantages.

Triplets pair an anchor with a same-state positive and a negative at a
controlled state gap; the margin grows with that gap.  The reward side
replaces exact-match scoring with a Gaussian kernel of the normalized state
distance, mixes in a binary format reward, and standardizes rewards within
a candidate group into advantages.
"""

import numpy as np

from dialkit import (
    MarginSchedule,
    RewardConfig,
    combined_reward,
    format_reward,
    group_normalize,
    margin_for_gap,
    sample_triplet,
    state_reward,
    triplet_loss,
)
from dialkit.datasets import TripletConfig

print("== margin schedule (m_min=0.2, m_max=1.0, cap at gap 0.5) ==")
schedule = MarginSchedule(0.2, 1.0, 0.5)
for gap in (0.0, 0.1, 0.25, 0.5, 0.9):
    print(f"  gap {gap:.2f} -> margin {margin_for_gap(gap, schedule):.2f}")

print("\n== sampled triplets carry their gap and margin ==")
cfg = TripletConfig(task="clock", schedule=schedule)
for index in range(4):
    triplet, (a, p, n) = sample_triplet(master_seed=7, index=index, cfg=cfg)
    print(f"  anchor {a.state.hour}:{a.state.minute:02d}  "
          f"negative {n.state.hour}:{n.state.minute:02d}  "
          f"gap {triplet.state_gap_norm:.3f}  margin {triplet.margin:.2f}")

print("\n== triplet hinge on toy embeddings ==")
rng = np.random.default_rng(0)
anchors = rng.normal(size=(8, 16))
positives = anchors + 0.05 * rng.normal(size=(8, 16))   # tight same-state pairs
negatives = anchors + 1.5 * rng.normal(size=(8, 16))    # far different-state
margins = np.full(8, 0.5)
print(f"  well-separated batch: loss = {triplet_loss(anchors, positives, negatives, margins):.4f}")
print(f"  collapsed negatives:  loss = "
      f"{triplet_loss(anchors, positives, anchors + 0.05, margins):.4f}")

print("\n== state reward: smooth credit for near misses ==")
config = RewardConfig(sigma=0.05, beta=0.1)
for minutes_off in (0, 1, 5, 15, 60, 360):
    d = minutes_off / 360.0
    print(f"  {minutes_off:3d} min off -> r_state {state_reward(d, config):.4f}")

print("\n== format reward gates unparseable answers ==")
for text in ("The time is 7:45", "around noonish", "value 42.5"):
    print(f"  clock response {text!r}: r_fmt = {format_reward(text, 'clock')}")

print("\n== group-relative advantages ==")
responses_minutes_off = [0, 2, 30, 180]
rewards = [combined_reward(state_reward(off / 360.0, config), 1, config)
           for off in responses_minutes_off]
advantages = group_normalize(rewards, config.group_eps)
for off, r, adv in zip(responses_minutes_off, rewards, advantages):
    print(f"  {off:3d} min off: reward {r:.4f}  advantage {adv:+.3f}")
print("  advantages sum to", f"{sum(advantages):+.2e}")
