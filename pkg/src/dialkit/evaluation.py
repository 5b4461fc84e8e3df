"""Scoring of model predictions against a benchmark manifest.

Metrics follow the readout protocol: Exact Match as the primary metric,
Tolerance-1 and Tolerance-5 bands, and MAE.  Clock errors are circular
distances in minutes, so EM means zero minutes off and Tol-k means within k
minutes.  Gauge errors are normalized scalar errors; EM allows half a minor
tick and Tol-k allows k minor ticks.  Unparseable predictions count as
incorrect for EM/Tol-k, are excluded from MAE, and are reported separately
as a parse-failure rate.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .datasets import SampleRecord, read_manifest
from .errors import DomainError, DuplicateIdError, ManifestError, UnknownIdError
from .render import SPLITS
from .states import (
    ClockState,
    GaugeCalibration,
    GaugeState,
    clock_distance,
)

# Hour 0-12 (no leading-digit neighbors), minute 00-59; the last match wins.
_CLOCK_RE = re.compile(r"(?<!\d)(1[0-2]|0?[0-9]):([0-5][0-9])(?!\d)")
# Finite decimal, optional sign; the last match wins.
_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.\d+|\d+\.?|\.\d+)")


@dataclass(frozen=True)
class ClockReading:
    """Parsed clock answer, canonical minute-of-cycle in [0, 720)."""

    minutes: int


@dataclass(frozen=True)
class GaugeReading:
    """Parsed gauge answer; the raw value may lie outside the calibrated range."""

    value: float
    out_of_range: bool = False


def parse_prediction(text: str, task: str,
                     calibration: GaugeCalibration | None = None):
    """Extract the final answer from a prediction; None on parse failure.

    Clock answers are the last H:MM substring with a valid 12-hour time
    (hour 0 normalized onto the 12 cycle).  Gauge answers are the last finite
    decimal number; values outside the calibration range are flagged but not
    clamped.
    """
    if task == "clock":
        matches = _CLOCK_RE.findall(text)
        if not matches:
            return None
        hour, minute = (int(x) for x in matches[-1])
        return ClockReading(minutes=(hour % 12) * 60 + int(minute))
    if task == "gauge":
        matches = _NUMBER_RE.findall(text)
        if not matches:
            return None
        try:
            value = float(matches[-1])
        except ValueError:
            return None
        out_of_range = False
        if calibration is not None:
            out_of_range = not (calibration.value_min <= value <= calibration.value_max)
        return GaugeReading(value=value, out_of_range=out_of_range)
    raise DomainError(f"task must be clock or gauge, got {task!r}")


def reading_matches_state(reading, state) -> bool:
    """Exact agreement between a parsed reading and a ground-truth state."""
    if reading is None:
        return False
    if isinstance(state, ClockState) and isinstance(reading, ClockReading):
        return reading.minutes == state.minutes_of_cycle
    if isinstance(state, GaugeState) and isinstance(reading, GaugeReading):
        return reading.value == state.value
    return False


def prediction_error(reading, record: SampleRecord) -> float | None:
    """Per-sample error, or None when the prediction failed to parse.

    Clock: circular distance in minutes.  Gauge: normalized |error| over the
    value span (computed from the raw, unclamped value).
    """
    if reading is None:
        return None
    state = record.state
    if isinstance(state, ClockState):
        if not isinstance(reading, ClockReading):
            return None
        pred = ClockState(reading.minutes // 60, reading.minutes % 60)
        return float(clock_distance(pred, state))
    if not isinstance(reading, GaugeReading):
        return None
    return abs(reading.value - state.value) / state.calibration.value_span


def read_predictions(path) -> dict[str, str]:
    """Load predictions.jsonl ({"id", "prediction"} per line) into a dict."""
    path = Path(path)
    out: dict[str, str] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                pid, text = obj["id"], obj["prediction"]
            except Exception as exc:
                raise ManifestError(f"{path}:{lineno}: bad prediction row: {exc}") from exc
            if pid in out:
                raise DuplicateIdError(f"{path}:{lineno}: duplicate prediction id {pid!r}")
            out[pid] = text
    return out


def _tolerances(task: str, records: list[SampleRecord]) -> tuple[float, float, float]:
    """(em_eps, tol1, tol5) thresholds in the task's error unit."""
    if task == "clock":
        return 0.0, 1.0, 5.0
    spans = {rec.state.calibration.calibration_id: rec.state.calibration
             for rec in records if isinstance(rec.state, GaugeState)}
    if len(spans) > 1:
        raise ManifestError("mixed gauge calibrations in one evaluation")
    if not spans:
        from .states import DEFAULT_GAUGE_CALIBRATION
        cal = DEFAULT_GAUGE_CALIBRATION
    else:
        cal = next(iter(spans.values()))
    minor_norm = cal.minor_tick_value / cal.value_span
    return 0.5 * minor_norm, 1.0 * minor_norm, 5.0 * minor_norm


def _group_metrics(errors: list[float | None], thresholds) -> dict:
    em_eps, tol1, tol5 = thresholds
    n = len(errors)
    parsed = [e for e in errors if e is not None]
    hits_em = sum(1 for e in parsed if e <= em_eps)
    hits_t1 = sum(1 for e in parsed if e <= tol1)
    hits_t5 = sum(1 for e in parsed if e <= tol5)
    return {
        "n": n,
        "n_parsed": len(parsed),
        "exact_match_pct": 100.0 * hits_em / n if n else 0.0,
        "tol1_pct": 100.0 * hits_t1 / n if n else 0.0,
        "tol5_pct": 100.0 * hits_t5 / n if n else 0.0,
        "mae": sum(parsed) / len(parsed) if parsed else None,
        "parse_failure_pct": 100.0 * (n - len(parsed)) / n if n else 0.0,
    }


def evaluate(manifest, predictions) -> dict:
    """Score predictions against a manifest.

    `manifest` is a path or a (header, records) pair; `predictions` is a path
    or an {id: text} dict.  Missing predictions score as parse failures;
    prediction ids absent from the manifest raise UnknownIdError.
    """
    if isinstance(manifest, (str, Path)):
        header, records = read_manifest(manifest)
    else:
        header, records = manifest
    if isinstance(predictions, (str, Path)):
        predictions = read_predictions(predictions)

    by_id = {rec.id: rec for rec in records}
    for pid in predictions:
        if pid not in by_id:
            raise UnknownIdError(f"prediction id {pid!r} not in manifest")

    task = header.get("task", records[0].task if records else "clock")
    bucket_count = int(header.get("bucket_count", 4))
    thresholds = _tolerances(task, records) if records else (0.0, 1.0, 5.0)

    errors: dict[str, float | None] = {}
    for rec in records:
        text = predictions.get(rec.id)
        reading = None
        if text is not None:
            calibration = rec.state.calibration if isinstance(rec.state, GaugeState) else None
            reading = parse_prediction(text, rec.task, calibration)
        errors[rec.id] = prediction_error(reading, rec)

    def group(records_subset):
        return _group_metrics([errors[rec.id] for rec in records_subset], thresholds)

    splits_present = [s for s in SPLITS if any(rec.split == s for rec in records)]
    report = {
        "task": task,
        "bucket_count": bucket_count,
        "error_unit": "minutes" if task == "clock" else "normalized",
        "overall": group(records),
        "splits": {},
    }
    for split in splits_present:
        rows = [rec for rec in records if rec.split == split]
        buckets = []
        for b in range(bucket_count):
            bucket_rows = [rec for rec in rows if rec.bucket == b]
            metrics = group(bucket_rows)
            metrics["bucket"] = b
            metrics["severity_center"] = (b + 0.5) / bucket_count
            buckets.append(metrics)
        report["splits"][split] = {"overall": group(rows), "buckets": buckets}
    return report


def degradation_curve(report: dict, split: str, metric: str = "em") -> list[tuple[float, float]]:
    """Per-bucket accuracy as severity grows: [(bucket_center, pct), ...]."""
    key = {"em": "exact_match_pct", "tol1": "tol1_pct", "tol5": "tol5_pct"}.get(metric)
    if key is None:
        raise DomainError(f"metric must be em, tol1, or tol5, got {metric!r}")
    if split not in report["splits"]:
        raise DomainError(f"split {split!r} not present in report")
    buckets = report["splits"][split]["buckets"]
    return [(b["severity_center"], b[key]) for b in buckets]


# --- report emission ----------------------------------------------------------

_CSV_FIELDS = ["split", "bucket", "severity_center", "n", "n_parsed",
               "exact_match_pct", "tol1_pct", "tol5_pct", "mae",
               "parse_failure_pct"]


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()

    def row(split, bucket, center, metrics):
        writer.writerow({
            "split": split, "bucket": bucket, "severity_center": center,
            "n": metrics["n"], "n_parsed": metrics["n_parsed"],
            "exact_match_pct": repr(metrics["exact_match_pct"]),
            "tol1_pct": repr(metrics["tol1_pct"]),
            "tol5_pct": repr(metrics["tol5_pct"]),
            "mae": "" if metrics["mae"] is None else repr(metrics["mae"]),
            "parse_failure_pct": repr(metrics["parse_failure_pct"]),
        })

    row("overall", "", "", report["overall"])
    for split, data in report["splits"].items():
        row(split, "", "", data["overall"])
        for b in data["buckets"]:
            row(split, b["bucket"], b["severity_center"], b)
    return buf.getvalue()


def _svg_polyline(points, width, height, color, label) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return (f'<polyline fill="none" stroke="{color}" stroke-width="2" '
            f'points="{coords}"><title>{label}</title></polyline>')


_SPLIT_COLORS = {"clean": "#2b6cb0", "view": "#c05621", "illum": "#2f855a",
                 "combined": "#9b2c2c"}


def render_degradation_svg(report: dict, metric: str = "em") -> str:
    """Severity-vs-accuracy polyline chart, one line per split present."""
    width, height = 480, 320
    margin = 48
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12">perturbation severity</text>',
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.0f})">{metric} accuracy (%)</text>',
    ]
    for tick in (0, 25, 50, 75, 100):
        y = height - margin - plot_h * tick / 100.0
        parts.append(f'<text x="{margin - 6}" y="{y + 4:.1f}" text-anchor="end" '
                     f'font-size="10">{tick}</text>')
    legend_y = margin
    for split in report["splits"]:
        series = degradation_curve(report, split, metric)
        points = [
            (margin + plot_w * center, height - margin - plot_h * pct / 100.0)
            for center, pct in series
        ]
        color = _SPLIT_COLORS.get(split, "#444444")
        parts.append(_svg_polyline(points, width, height, color, split))
        for x, y in points:
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
        parts.append(f'<text x="{width - margin + 4}" y="{legend_y:.0f}" '
                     f'font-size="11" fill="{color}">{split}</text>')
        legend_y += 14
    parts.append("</svg>")
    return "\n".join(parts)


def emit_report(report: dict, path, fmt: str = "json", metric: str = "em") -> Path:
    """Write a report as json, csv, or an svg degradation chart."""
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
    elif fmt == "csv":
        path.write_text(report_to_csv(report), encoding="utf-8")
    elif fmt == "svg":
        path.write_text(render_degradation_svg(report, metric) + "\n", encoding="utf-8")
    else:
        raise DomainError(f"format must be json, csv, or svg, got {fmt!r}")
    return path
