"""Numeric kernels for state-consistent alignment.

These are the reference implementations an external trainer plugs into:
the state-gap margin schedule and triplet hinge for representation
alignment, and the Gaussian state reward, binary format reward, combined
reward, and group-relative advantage normalization for policy optimization.
Everything here is a pure function over plain floats and numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    EmptyBatchError,
    EmptyGroupError,
)


@dataclass(frozen=True)
class MarginSchedule:
    """Linear-with-cap margin schedule over the normalized state gap.

    The margin grows linearly from m_min at gap 0 to m_max at gap_cap and
    stays at m_max beyond, so triplets with a larger state discrepancy are
    pushed farther apart while antipodal negatives do not blow the margin up.
    """

    m_min: float = 0.2
    m_max: float = 1.0
    gap_cap: float = 0.5

    def __post_init__(self):
        if self.m_min < 0:
            raise DomainError("m_min must be >= 0")
        if self.m_max < self.m_min:
            raise DomainError("m_max must be >= m_min")
        if not (0.0 < self.gap_cap <= 1.0):
            raise DomainError("gap_cap must lie in (0, 1]")


def margin_for_gap(norm_gap: float, schedule: MarginSchedule = MarginSchedule()) -> float:
    """Margin for a triplet whose anchor/negative state gap is `norm_gap`."""
    if not (0.0 <= norm_gap <= 1.0):
        raise DomainError(f"norm_gap must lie in [0, 1], got {norm_gap}")
    ramp = min(norm_gap / schedule.gap_cap, 1.0)
    return schedule.m_min + (schedule.m_max - schedule.m_min) * ramp


def triplet_loss(
    anchors,
    positives,
    negatives,
    margins,
) -> float:
    """Mean hinge loss over a batch of embedding triplets.

    Per triplet i the term is ``max(0, ||a_i - p_i|| - ||a_i - n_i|| + m_i)``
    with Euclidean norms; the batch loss is the mean over triplets.

    Args:
        anchors, positives, negatives: arrays of shape (B, D).
        margins: array of shape (B,).
    """
    a = np.asarray(anchors, dtype=np.float64)
    p = np.asarray(positives, dtype=np.float64)
    n = np.asarray(negatives, dtype=np.float64)
    m = np.asarray(margins, dtype=np.float64)
    if a.ndim == 1:
        a, p, n = a[None, :], p[None, :], n[None, :]
        m = np.atleast_1d(m)
    if a.shape[0] == 0:
        raise EmptyBatchError("triplet batch is empty")
    if not (a.shape == p.shape == n.shape) or m.shape != (a.shape[0],):
        raise DimensionMismatchError(
            f"inconsistent triplet batch shapes: {a.shape}, {p.shape}, "
            f"{n.shape}, margins {m.shape}"
        )
    d_ap = np.linalg.norm(a - p, axis=1)
    d_an = np.linalg.norm(a - n, axis=1)
    hinge = np.maximum(d_ap - d_an + m, 0.0)
    return float(hinge.mean())


@dataclass(frozen=True)
class RewardConfig:
    """Knobs for the state-aware reward and its combination.

    sigma is the Gaussian tolerance in normalized state units (0.05 keeps a
    5-minute clock error near reward 0.96 while errors past ~30 minutes decay
    to almost nothing); beta weights the format reward in the convex
    combination; group_eps guards the advantage denominator.
    """

    sigma: float = 0.05
    beta: float = 0.1
    group_eps: float = 1e-8

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if not (0.0 <= self.beta <= 1.0):
            raise DomainError("beta must lie in [0, 1]")
        if self.group_eps < 0:
            raise DomainError("group_eps must be >= 0")


DEFAULT_REWARD_CONFIG = RewardConfig()


def state_reward(d_norm: float, config: RewardConfig = DEFAULT_REWARD_CONFIG) -> float:
    """Gaussian state reward exp(-d^2 / (2 sigma^2)); 1 iff the distance is 0."""
    if d_norm < 0:
        raise DomainError(f"state distance must be >= 0, got {d_norm}")
    return math.exp(-(d_norm * d_norm) / (2.0 * config.sigma * config.sigma))


def format_reward(response_text: str, task: str, calibration=None) -> int:
    """1 iff the response contains a well-formed final answer, else 0.

    Well-formed means the same grammar the evaluator scores with: a valid
    12-hour time for clocks, a finite decimal number for gauges.
    """
    from .evaluation import parse_prediction

    return 0 if parse_prediction(response_text, task, calibration) is None else 1


def combined_reward(
    r_state: float, r_fmt: int, config: RewardConfig = DEFAULT_REWARD_CONFIG
) -> float:
    """Convex combination (1 - beta) * r_state + beta * r_fmt, in [0, 1]."""
    if not (0.0 <= r_state <= 1.0):
        raise DomainError(f"r_state must lie in [0, 1], got {r_state}")
    if r_fmt not in (0, 1):
        raise DomainError(f"r_fmt must be 0 or 1, got {r_fmt}")
    return (1.0 - config.beta) * r_state + config.beta * float(r_fmt)


def group_normalize(rewards: Sequence[float], group_eps: float = 1e-8) -> list[float]:
    """Group-relative advantages: (r - mean) / (population std + eps).

    A zero-variance group maps to all-zero advantages even with eps = 0.
    """
    r = np.asarray(list(rewards), dtype=np.float64)
    if r.size == 0:
        raise EmptyGroupError("reward group is empty")
    centered = r - r.mean()
    std = float(np.sqrt(np.mean(centered * centered)))
    if std == 0.0:
        return [0.0] * r.size
    return list((centered / (std + group_eps)).astype(float))


def warmup_weight(step: int, warmup_steps: int, lambda_max: float = 0.1) -> float:
    """Linear warm-up for the triplet-loss weight: lambda_max * min(step / warmup_steps, 1)."""
    if warmup_steps <= 0:
        return lambda_max
    return lambda_max * min(step / warmup_steps, 1.0)
