"""Benchmark generation, diagnostic pairs, triplets, and grounded targets.

This module owns the JSONL manifest format.  A manifest starts with one
header line ({"schema_version": ..., "kind": "dial-manifest", ...}) followed
by one object per sample:

    {"id", "task", "split", "state": {...}, "calibration": {...}|null,
     "appearance": {...}, "severity", "bucket", "style_seed", "image_path"}

Companion files reference manifest ids:

    triplets.jsonl  {"anchor_id", "positive_id", "negative_id",
                     "state_gap_norm", "margin"}
    pairs.jsonl     {"kind", "first_id", "second_id", "delta"}
    sft.jsonl       {"sample_id", "prompt", "target_text"}

Every draw is keyed by (master_seed, index, role) through the portable
seed derivation in `dialkit.rng`, so generation is reproducible sample by
sample and parallelizable without changing output.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .alignment import MarginSchedule, margin_for_gap
from .errors import ConfigError, DomainError, ManifestError, MetadataError
from .render import (
    SPLITS,
    AppearanceCondition,
    StyleConfig,
    apply_appearance,
    render_dial_face,
    sample_appearance,
    style_from_seed,
)
from .rng import SplitMix64, derive_seed
from .states import (
    CLOCK_CYCLE_MINUTES,
    DEFAULT_GAUGE_CALIBRATION,
    ClockState,
    DialState,
    GaugeCalibration,
    GaugeState,
    clock_from_minutes,
    clock_hand_angles,
    format_clock,
    format_gauge_value,
    gauge_value_to_angle,
    quantize_gauge_value,
    state_distance_normalized,
    state_from_json,
    state_to_json,
    task_of,
)

MANIFEST_SCHEMA_VERSION = 1
MANIFEST_KIND = "dial-manifest"
PNG_COMPRESS_LEVEL = 3
SFT_PROMPT = "Read the instrument and state its value."


@dataclass(frozen=True)
class SampleRecord:
    """One rendered sample: everything needed to reproduce and score it."""

    id: str
    task: str
    split: str
    state: DialState
    appearance: AppearanceCondition
    severity: float
    bucket: int
    style_seed: int
    image_path: str

    def to_json(self) -> dict:
        calibration = None
        if isinstance(self.state, GaugeState):
            calibration = self.state.calibration.to_json()
        return {
            "id": self.id,
            "task": self.task,
            "split": self.split,
            "state": state_to_json(self.state),
            "calibration": calibration,
            "appearance": self.appearance.to_json(),
            "severity": self.severity,
            "bucket": self.bucket,
            "style_seed": self.style_seed,
            "image_path": self.image_path,
        }

    @staticmethod
    def from_json(obj: dict) -> "SampleRecord":
        calibration = None
        if obj.get("calibration") is not None:
            calibration = GaugeCalibration.from_json(obj["calibration"])
        return SampleRecord(
            id=obj["id"],
            task=obj["task"],
            split=obj["split"],
            state=state_from_json(obj["state"], calibration),
            appearance=AppearanceCondition.from_json(obj["appearance"]),
            severity=float(obj["severity"]),
            bucket=int(obj["bucket"]),
            style_seed=int(obj["style_seed"]),
            image_path=obj["image_path"],
        )


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def write_manifest(path, header: dict, records: list[SampleRecord]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(_dump_line(header) + "\n")
        for rec in records:
            fh.write(_dump_line(rec.to_json()) + "\n")


def read_manifest(path) -> tuple[dict, list[SampleRecord]]:
    """Read and validate a manifest; raises ManifestError with line context."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ManifestError(f"{path}: empty manifest (missing header line)")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}:1: bad header: {exc}") from exc
    if header.get("kind") != MANIFEST_KIND:
        raise ManifestError(f"{path}:1: not a {MANIFEST_KIND} file")
    if header.get("schema_version") != MANIFEST_SCHEMA_VERSION:
        raise ManifestError(
            f"{path}:1: schema_version {header.get('schema_version')!r} "
            f"unsupported (expected {MANIFEST_SCHEMA_VERSION})"
        )
    records = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = SampleRecord.from_json(json.loads(line))
        except Exception as exc:
            raise ManifestError(f"{path}:{lineno}: bad record: {exc}") from exc
        if rec.id in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate id {rec.id!r}")
        seen.add(rec.id)
        records.append(rec)
    return header, records


def bucket_of(severity: float, bucket_count: int) -> int:
    """floor(severity * bucket_count), clamped into the last bucket."""
    return min(int(severity * bucket_count), bucket_count - 1)


# --- benchmark generation ----------------------------------------------------


@dataclass
class BenchmarkConfig:
    task: str = "clock"
    counts: dict = field(default_factory=lambda: {"combined": 400})
    bucket_count: int = 4
    master_seed: int = 0
    image_size: int = 448
    supersample: int = 2
    unique_states: bool = False
    jobs: int = 1
    calibration: GaugeCalibration = DEFAULT_GAUGE_CALIBRATION
    # Pin one explicit style for every sample instead of the seeded pool;
    # recorded in the manifest header so re-rendering stays exact.
    style_override: StyleConfig | None = None

    def validate(self) -> None:
        if self.task not in ("clock", "gauge"):
            raise ConfigError(f"task must be clock or gauge, got {self.task!r}")
        if self.bucket_count < 1:
            raise ConfigError("bucket_count must be >= 1")
        if not self.counts:
            raise ConfigError("counts must name at least one split")
        for split, n in self.counts.items():
            if split not in SPLITS:
                raise ConfigError(f"unknown split {split!r}")
            if n <= 0:
                raise ConfigError(f"count for split {split!r} must be positive")
            if n % self.bucket_count != 0:
                raise ConfigError(
                    f"count {n} for split {split!r} not divisible by "
                    f"bucket_count {self.bucket_count} (buckets must be equal)"
                )
        if self.unique_states:
            if self.task != "clock":
                raise ConfigError("unique_states is only defined for clocks")
            for split, n in self.counts.items():
                if n > CLOCK_CYCLE_MINUTES:
                    raise ConfigError(
                        f"unique_states needs count <= {CLOCK_CYCLE_MINUTES}, "
                        f"got {n} for split {split!r}"
                    )
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


def _draw_state(cfg: BenchmarkConfig, seed: int) -> DialState:
    rng = SplitMix64(seed)
    if cfg.task == "clock":
        return clock_from_minutes(rng.randint(CLOCK_CYCLE_MINUTES))
    value = quantize_gauge_value(
        rng.uniform(cfg.calibration.value_min, cfg.calibration.value_max)
    )
    return GaugeState(value, cfg.calibration)


def _benchmark_records(cfg: BenchmarkConfig) -> list[SampleRecord]:
    records = []
    for split in SPLITS:
        if split not in cfg.counts:
            continue
        n = cfg.counts[split]
        if cfg.unique_states:
            minutes = list(range(CLOCK_CYCLE_MINUTES))
            SplitMix64(derive_seed(cfg.master_seed, 0, f"{split}/stateperm")).shuffle(minutes)
        for i in range(n):
            if cfg.unique_states:
                state: DialState = clock_from_minutes(minutes[i])
            else:
                state = _draw_state(cfg, derive_seed(cfg.master_seed, i, f"{split}/state"))
            # Round-robin bucket assignment keeps bucket counts exactly equal;
            # the in-bucket position is uniform.
            bucket = i % cfg.bucket_count
            u = SplitMix64(derive_seed(cfg.master_seed, i, f"{split}/severity")).random()
            severity = (bucket + u) / cfg.bucket_count
            cond = sample_appearance(
                split, severity, derive_seed(cfg.master_seed, i, f"{split}/appearance")
            )
            sample_id = f"{cfg.task}-{split}-{i:05d}"
            records.append(SampleRecord(
                id=sample_id,
                task=cfg.task,
                split=split,
                state=state,
                appearance=cond,
                severity=severity,
                bucket=bucket_of(severity, cfg.bucket_count),
                style_seed=derive_seed(cfg.master_seed, i, f"{split}/style"),
                image_path=f"images/{sample_id}.png",
            ))
    return records


def render_record(record: SampleRecord, image_size: int, supersample: int,
                  style_override: StyleConfig | None = None) -> np.ndarray:
    """Re-render a manifest record's image exactly as generated.

    Pass the header's style_override (if any) to reproduce runs that pinned
    an explicit style instead of the seeded pool.
    """
    if style_override is not None:
        style = replace(style_override, image_size_px=image_size,
                        supersample=supersample)
    else:
        style = style_from_seed(record.style_seed, record.task, image_size,
                                supersample)
    return apply_appearance(render_dial_face(record.state, style), record.appearance)


def render_record_from_header(record: SampleRecord, header: dict) -> np.ndarray:
    """Re-render using a manifest header's image settings and style."""
    override = header.get("style_override")
    style = StyleConfig.from_json(override) if override else None
    return render_record(record, header["image_size"], header["supersample"], style)


def _render_to_file(args) -> None:
    record, image_size, supersample, style_override, out_dir = args
    img = render_record(record, image_size, supersample, style_override)
    target = Path(out_dir) / record.image_path
    Image.fromarray(img).save(target, format="PNG", compress_level=PNG_COMPRESS_LEVEL)


def _render_all(records: list[SampleRecord], image_size: int, supersample: int,
                out_dir: Path, jobs: int,
                style_override: StyleConfig | None = None) -> None:
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    work = [(rec, image_size, supersample, style_override, str(out_dir))
            for rec in records]
    if jobs > 1 and len(records) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(_render_to_file, work, chunksize=16))
    else:
        for item in work:
            _render_to_file(item)


def _manifest_header(cfg: BenchmarkConfig) -> dict:
    header = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "kind": MANIFEST_KIND,
        "task": cfg.task,
        "master_seed": cfg.master_seed,
        "bucket_count": cfg.bucket_count,
        "image_size": cfg.image_size,
        "supersample": cfg.supersample,
    }
    if cfg.style_override is not None:
        header["style_override"] = cfg.style_override.to_json()
    return header


def generate_benchmark(cfg: BenchmarkConfig, out_dir) -> Path:
    """Generate manifest plus images under `out_dir`; returns the manifest path.

    Fully reproducible from the config: the same master seed yields a
    byte-identical manifest and identical image files.
    """
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = _benchmark_records(cfg)
    _render_all(records, cfg.image_size, cfg.supersample, out_dir, cfg.jobs,
                cfg.style_override)
    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(manifest_path, _manifest_header(cfg), records)
    return manifest_path


# --- diagnostic pairs and triplets -------------------------------------------


def _record_for(task, split, state, severity, appearance, sample_id, style_seed,
                bucket_count=4) -> SampleRecord:
    return SampleRecord(
        id=sample_id,
        task=task,
        split=split,
        state=state,
        appearance=appearance,
        severity=severity,
        bucket=bucket_of(severity, bucket_count),
        style_seed=style_seed,
        image_path=f"images/{sample_id}.png",
    )


def sample_same_state_pair(
    state: DialState, master_seed: int, index: int, split: str = "combined"
) -> tuple[SampleRecord, SampleRecord]:
    """Two records with identical state and independently drawn appearance."""
    task = task_of(state)
    rng = SplitMix64(derive_seed(master_seed, index, "pair/severity"))
    records = []
    for tag in ("a", "b"):
        severity = rng.random()
        cond = sample_appearance(
            split, severity, derive_seed(master_seed, index, f"pair/appearance-{tag}")
        )
        records.append(_record_for(
            task, split, state, severity, cond,
            sample_id=f"{task}-pair-{index:05d}-{tag}",
            style_seed=derive_seed(master_seed, index, f"pair/style-{tag}"),
        ))
    return records[0], records[1]


def advance_state(state: DialState, delta: float) -> tuple[DialState, DialState]:
    """(base, base + delta) with clock wraparound or gauge re-centering.

    Clocks advance modulo the 720-minute cycle.  Gauges clamp: when
    base + delta would leave the range, the base shifts down so the gap is
    preserved exactly (delta must not exceed the value span).
    """
    if isinstance(state, ClockState):
        if delta != int(delta) or delta <= 0:
            raise DomainError(f"clock delta must be a positive integer, got {delta}")
        return state, clock_from_minutes(state.minutes_of_cycle + int(delta))
    cal = state.calibration
    delta = quantize_gauge_value(float(delta))
    if not (0 < delta <= cal.value_span):
        raise DomainError(
            f"gauge delta must lie in (0, {cal.value_span}], got {delta}"
        )
    base = min(state.value, cal.value_max - delta)
    base = quantize_gauge_value(max(base, cal.value_min))
    return (GaugeState(base, cal),
            GaugeState(quantize_gauge_value(base + delta), cal))


def sample_neighbor_pair(
    state: DialState, delta: float, master_seed: int, index: int,
    split: str = "combined",
) -> tuple[SampleRecord, SampleRecord]:
    """Two records one small state step apart, sharing one appearance."""
    task = task_of(state)
    base, stepped = advance_state(state, delta)
    severity = SplitMix64(derive_seed(master_seed, index, "neighbor/severity")).random()
    cond = sample_appearance(
        split, severity, derive_seed(master_seed, index, "neighbor/appearance")
    )
    rec_a = _record_for(task, split, base, severity, cond,
                        sample_id=f"{task}-nbr-{index:05d}-a",
                        style_seed=derive_seed(master_seed, index, "neighbor/style"))
    rec_b = _record_for(task, split, stepped, severity, cond,
                        sample_id=f"{task}-nbr-{index:05d}-b",
                        style_seed=derive_seed(master_seed, index, "neighbor/style"))
    return rec_a, rec_b


@dataclass(frozen=True)
class Triplet:
    anchor_id: str
    positive_id: str
    negative_id: str
    state_gap_norm: float
    margin: float

    def to_json(self) -> dict:
        return {
            "anchor_id": self.anchor_id,
            "positive_id": self.positive_id,
            "negative_id": self.negative_id,
            "state_gap_norm": self.state_gap_norm,
            "margin": self.margin,
        }


@dataclass
class TripletConfig:
    task: str = "clock"
    neg_gap_range: tuple[float, float] = (0.05, 1.0)
    schedule: MarginSchedule = MarginSchedule()
    split: str = "combined"
    calibration: GaugeCalibration = DEFAULT_GAUGE_CALIBRATION

    def validate(self) -> None:
        lo, hi = self.neg_gap_range
        if not (0.0 < lo <= hi <= 1.0):
            raise ConfigError(
                f"neg_gap_range must satisfy 0 < lo <= hi <= 1, got {self.neg_gap_range}"
            )
        if self.task not in ("clock", "gauge"):
            raise ConfigError(f"task must be clock or gauge, got {self.task!r}")


def sample_triplet(
    master_seed: int, index: int, cfg: TripletConfig = TripletConfig()
) -> tuple[Triplet, tuple[SampleRecord, SampleRecord, SampleRecord]]:
    """Anchor/positive (same state) plus a negative at a controlled state gap."""
    cfg.validate()
    rng = SplitMix64(derive_seed(master_seed, index, "triplet/state"))
    gap = SplitMix64(derive_seed(master_seed, index, "triplet/gap")).uniform(*cfg.neg_gap_range)

    if cfg.task == "clock":
        anchor_state: DialState = clock_from_minutes(rng.randint(CLOCK_CYCLE_MINUTES))
        gap_minutes = max(1, min(360, round(gap * 360.0)))
        direction = SplitMix64(derive_seed(master_seed, index, "triplet/side")).sign()
        negative_state: DialState = clock_from_minutes(
            anchor_state.minutes_of_cycle + direction * gap_minutes
        )
    else:
        cal = cfg.calibration
        value = quantize_gauge_value(rng.uniform(cal.value_min, cal.value_max))
        offset = quantize_gauge_value(gap * cal.value_span)
        offset = max(offset, 10.0 ** -4)
        side = SplitMix64(derive_seed(master_seed, index, "triplet/side")).sign()
        if side > 0 and value + offset > cal.value_max:
            side = -1
        if side < 0 and value - offset < cal.value_min:
            side = 1
        if value + side * offset > cal.value_max or value + side * offset < cal.value_min:
            # Neither side fits: re-center the anchor so the gap is preserved.
            value = quantize_gauge_value(cal.value_max - offset)
            side = 1
        anchor_state = GaugeState(value, cal)
        negative_state = GaugeState(quantize_gauge_value(value + side * offset), cal)

    rec_a, rec_p = sample_same_state_pair(anchor_state, master_seed, index, cfg.split)
    neg_severity = SplitMix64(derive_seed(master_seed, index, "triplet/neg-severity")).random()
    neg_cond = sample_appearance(
        cfg.split, neg_severity, derive_seed(master_seed, index, "triplet/neg-appearance")
    )
    rec_a = _rename(rec_a, f"{cfg.task}-tri-{index:05d}-a")
    rec_p = _rename(rec_p, f"{cfg.task}-tri-{index:05d}-p")
    rec_n = _record_for(
        cfg.task, cfg.split, negative_state, neg_severity, neg_cond,
        sample_id=f"{cfg.task}-tri-{index:05d}-n",
        style_seed=derive_seed(master_seed, index, "triplet/neg-style"),
    )
    gap_norm = state_distance_normalized(rec_a.state, rec_n.state)
    triplet = Triplet(
        anchor_id=rec_a.id,
        positive_id=rec_p.id,
        negative_id=rec_n.id,
        state_gap_norm=gap_norm,
        margin=margin_for_gap(gap_norm, cfg.schedule),
    )
    return triplet, (rec_a, rec_p, rec_n)


def _rename(record: SampleRecord, new_id: str) -> SampleRecord:
    return replace(record, id=new_id, image_path=f"images/{new_id}.png")


# --- grounded observation-to-state targets ------------------------------------


@dataclass(frozen=True)
class GroundedTarget:
    sample_id: str
    steps: dict
    rendered_text: str


def _fmt_angle(angle: float) -> str:
    return f"{angle:g}"


def sft_target(record: SampleRecord) -> GroundedTarget:
    """Fill the four-step readout template from record metadata only.

    The template walks indicator, dial position, calibration mapping, and
    final answer; the final answer uses the manifest state serialization so
    the evaluator's parser recovers the state exactly.
    """
    state = record.state
    if isinstance(state, ClockState):
        hour_angle, minute_angle = clock_hand_angles(state)
        indicator = "the minute hand and the hour hand"
        position = (
            f"the minute hand at {_fmt_angle(minute_angle)} degrees and "
            f"the hour hand at {_fmt_angle(hour_angle)} degrees"
        )
        mapping = (
            "the minute hand advances 6 degrees per minute and the hour hand "
            "30 degrees per hour, clockwise from the 12 o'clock mark"
        )
        answer = format_clock(state)
    elif isinstance(state, GaugeState):
        cal = getattr(state, "calibration", None)
        if cal is None:
            raise MetadataError(f"record {record.id} has no gauge calibration")
        angle = gauge_value_to_angle(state)
        indicator = "the pointer"
        position = f"the pointer at {_fmt_angle(angle)} degrees"
        mapping = (
            f"the scale runs linearly from {_fmt_angle(cal.angle_start_deg)} degrees "
            f"at value {format_gauge_value(cal.value_min)} to "
            f"{_fmt_angle(cal.angle_end_deg)} degrees at value "
            f"{format_gauge_value(cal.value_max)}"
        )
        answer = format_gauge_value(state.value)
    else:
        raise MetadataError(f"record {record.id} has no dial state")

    text = (
        f"Indicator: {indicator}. "
        f"Position: {position} on the dial. "
        f"Mapping: {mapping}. "
        f"Answer: {answer}"
    )
    steps = {
        "indicator": indicator,
        "dial_position": position,
        "calibration_mapping": mapping,
        "final_state": answer,
    }
    return GroundedTarget(sample_id=record.id, steps=steps, rendered_text=text)


# --- batch file writers (CLI surface) -----------------------------------------


def generate_pairs(
    kind: str, n: int, master_seed: int, out_dir, task: str = "clock",
    delta: float | None = None, image_size: int = 448, supersample: int = 2,
    jobs: int = 1, calibration: GaugeCalibration = DEFAULT_GAUGE_CALIBRATION,
) -> Path:
    """Write n same-state or neighbor pairs (manifest + images + pairs.jsonl)."""
    if kind not in ("same", "neighbor"):
        raise ConfigError(f"pair kind must be same or neighbor, got {kind!r}")
    if n <= 0:
        raise ConfigError("n must be positive")
    if task not in ("clock", "gauge"):
        raise ConfigError(f"task must be clock or gauge, got {task!r}")
    if delta is None:
        delta = 1 if task == "clock" else calibration.minor_tick_value
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records, pair_rows = [], []
    for i in range(n):
        rng = SplitMix64(derive_seed(master_seed, i, "pair/state"))
        if task == "clock":
            state: DialState = clock_from_minutes(rng.randint(CLOCK_CYCLE_MINUTES))
        else:
            state = GaugeState(
                quantize_gauge_value(rng.uniform(calibration.value_min, calibration.value_max)),
                calibration,
            )
        if kind == "same":
            rec_a, rec_b = sample_same_state_pair(state, master_seed, i)
        else:
            rec_a, rec_b = sample_neighbor_pair(state, delta, master_seed, i)
        records.extend([rec_a, rec_b])
        pair_rows.append({
            "kind": "same_state" if kind == "same" else "neighbor",
            "first_id": rec_a.id,
            "second_id": rec_b.id,
            "delta": 0 if kind == "same" else delta,
        })

    _render_all(records, image_size, supersample, out_dir, jobs)
    header = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "kind": MANIFEST_KIND,
        "task": task,
        "master_seed": master_seed,
        "bucket_count": 4,
        "image_size": image_size,
        "supersample": supersample,
    }
    write_manifest(out_dir / "manifest.jsonl", header, records)
    pairs_path = out_dir / "pairs.jsonl"
    with pairs_path.open("w", encoding="utf-8") as fh:
        for row in pair_rows:
            fh.write(_dump_line(row) + "\n")
    return pairs_path


def generate_triplets(
    n: int, master_seed: int, out_dir, cfg: TripletConfig = TripletConfig(),
    image_size: int = 448, supersample: int = 2, jobs: int = 1,
) -> Path:
    """Write n margin-annotated triplets (manifest + images + triplets.jsonl)."""
    if n <= 0:
        raise ConfigError("n must be positive")
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records, triplets = [], []
    for i in range(n):
        triplet, (rec_a, rec_p, rec_n) = sample_triplet(master_seed, i, cfg)
        records.extend([rec_a, rec_p, rec_n])
        triplets.append(triplet)

    _render_all(records, image_size, supersample, out_dir, jobs)
    header = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "kind": MANIFEST_KIND,
        "task": cfg.task,
        "master_seed": master_seed,
        "bucket_count": 4,
        "image_size": image_size,
        "supersample": supersample,
    }
    write_manifest(out_dir / "manifest.jsonl", header, records)
    triplets_path = out_dir / "triplets.jsonl"
    with triplets_path.open("w", encoding="utf-8") as fh:
        for t in triplets:
            fh.write(_dump_line(t.to_json()) + "\n")
    return triplets_path


def write_sft_targets(manifest_path, out_path) -> Path:
    """Derive sft.jsonl (prompt + grounded target text) from a manifest."""
    _, records = read_manifest(manifest_path)
    out_path = Path(out_path)
    with out_path.open("w", encoding="utf-8") as fh:
        for rec in records:
            target = sft_target(rec)
            fh.write(_dump_line({
                "sample_id": target.sample_id,
                "prompt": SFT_PROMPT,
                "target_text": target.rendered_text,
            }) + "\n")
    return out_path
