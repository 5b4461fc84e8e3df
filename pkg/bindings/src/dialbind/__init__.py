"""Training-loop bindings for the dialkit numeric kernels.

External trainers need the state distances, rewards, margins, and group
normalization exactly as the main toolchain computes them, but with plain
inputs (state strings, floats) instead of toolkit objects.  Every function
here delegates to the installed `dialkit` package — the same code path, not
a re-implementation — so values agree bit for bit.  The module also ships
streaming readers for the manifest/triplet JSONL files that yield plain
dict records in file order with constant memory.

Versioned in lockstep with dialkit: both must be 0.1.0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

__version__ = "0.1.0"


class BindingLoadError(RuntimeError):
    """The primary dialkit package is missing or incompatible."""


class BindingDataError(ValueError):
    """A JSONL data file is malformed."""


def _dk():
    try:
        import dialkit
    except ImportError as exc:
        raise BindingLoadError(
            "dialbind wraps the dialkit package, which is not importable; "
            "install it first (pip install dialkit) — there is no fallback "
            "implementation"
        ) from exc
    if dialkit.__version__ != __version__:
        raise BindingLoadError(
            f"dialbind {__version__} requires dialkit {__version__}, "
            f"found {dialkit.__version__}"
        )
    return dialkit


def _coerce_state(value, calibration=None):
    """Accept toolkit states, manifest dicts, 'H:MM' strings, or numbers."""
    dk = _dk()
    if isinstance(value, (dk.ClockState, dk.GaugeState)):
        return value
    if isinstance(value, dict):
        from dialkit.states import state_from_json

        return state_from_json(value, calibration)
    if isinstance(value, str) and ":" in value:
        return dk.parse_clock_text(value)
    cal = calibration if calibration is not None else _dk().DEFAULT_GAUGE_CALIBRATION
    return dk.GaugeState(float(value), cal)


def clock_distance(first, second) -> int:
    """Circular clock distance in minutes; accepts 'H:MM' strings."""
    dk = _dk()
    return dk.clock_distance(_coerce_state(first), _coerce_state(second))


def gauge_distance(first, second, calibration=None) -> float:
    """Normalized gauge distance; accepts plain values."""
    dk = _dk()
    return dk.gauge_distance(_coerce_state(first, calibration),
                             _coerce_state(second, calibration))


def state_distance_normalized(first, second, calibration=None) -> float:
    """Shared [0, 1] state distance; accepts strings, numbers, or dicts."""
    dk = _dk()
    return dk.state_distance_normalized(_coerce_state(first, calibration),
                                        _coerce_state(second, calibration))


def state_reward(d_norm: float, sigma: float = 0.05) -> float:
    dk = _dk()
    return dk.state_reward(d_norm, dk.RewardConfig(sigma=sigma))


def combined_reward(r_state: float, r_fmt: int, beta: float = 0.1) -> float:
    dk = _dk()
    return dk.combined_reward(r_state, r_fmt, dk.RewardConfig(beta=beta))


def format_reward(response_text: str, task: str, calibration=None) -> int:
    return _dk().format_reward(response_text, task, calibration)


def group_normalize(rewards, group_eps: float = 1e-8) -> list[float]:
    return _dk().group_normalize(rewards, group_eps)


def margin_for_gap(norm_gap: float, m_min: float = 0.2, m_max: float = 1.0,
                   gap_cap: float = 0.5) -> float:
    dk = _dk()
    return dk.margin_for_gap(norm_gap, dk.MarginSchedule(m_min, m_max, gap_cap))


def read_manifest(path) -> Iterator[dict]:
    """Stream manifest records as plain dicts, in file order.

    The header line is validated eagerly (kind and schema version) before
    the first record is yielded; corrupted rows raise with their line
    number.  Constant memory: one line at a time, single consumer.
    """
    path = Path(path)
    fh = path.open("r", encoding="utf-8")
    try:
        first = fh.readline()
        if not first.strip():
            raise BindingDataError(f"{path}: empty manifest (missing header line)")
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise BindingDataError(f"{path}:1: bad header: {exc}") from exc
        if header.get("kind") != "dial-manifest":
            raise BindingDataError(f"{path}:1: not a dial-manifest file")
        if header.get("schema_version") != 1:
            raise BindingDataError(
                f"{path}:1: unsupported schema_version "
                f"{header.get('schema_version')!r} (expected 1)"
            )
    except BaseException:
        fh.close()
        raise

    def rows():
        with fh:
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError as exc:
                    raise BindingDataError(
                        f"{path}:{lineno}: bad record: {exc}"
                    ) from exc

    return rows()


def read_triplets(path) -> Iterator[dict]:
    """Stream triplet rows ({anchor_id, positive_id, negative_id,
    state_gap_norm, margin}) in file order."""
    path = Path(path)

    def rows():
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise BindingDataError(
                        f"{path}:{lineno}: bad triplet row: {exc}"
                    ) from exc
                missing = {"anchor_id", "positive_id", "negative_id",
                           "state_gap_norm", "margin"} - set(row)
                if missing:
                    raise BindingDataError(
                        f"{path}:{lineno}: triplet row missing {sorted(missing)}"
                    )
                yield row

    return rows()


@dataclass(frozen=True)
class BoundFunctionSet:
    """The callable set a trainer plugs in, bound to the primary kernels."""

    clock_distance: Callable
    gauge_distance: Callable
    state_distance_normalized: Callable
    state_reward: Callable
    combined_reward: Callable
    format_reward: Callable
    group_normalize: Callable
    margin_for_gap: Callable
    read_manifest: Callable
    read_triplets: Callable


def bind_rewards() -> BoundFunctionSet:
    """Load the primary package and return the bound callable set.

    Raises BindingLoadError with a clear message when dialkit is absent or
    version-skewed; never falls back to a local re-implementation.
    """
    _dk()  # fail fast with the load error if the primary is unavailable
    return BoundFunctionSet(
        clock_distance=clock_distance,
        gauge_distance=gauge_distance,
        state_distance_normalized=state_distance_normalized,
        state_reward=state_reward,
        combined_reward=combined_reward,
        format_reward=format_reward,
        group_normalize=group_normalize,
        margin_for_gap=margin_for_gap,
        read_manifest=read_manifest,
        read_triplets=read_triplets,
    )


__all__ = [
    "BindingDataError",
    "BindingLoadError",
    "BoundFunctionSet",
    "bind_rewards",
    "clock_distance",
    "combined_reward",
    "format_reward",
    "gauge_distance",
    "group_normalize",
    "margin_for_gap",
    "read_manifest",
    "read_triplets",
    "state_distance_normalized",
    "state_reward",
]
