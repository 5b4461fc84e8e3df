import json

import numpy as np
import pytest

from dialkit.datasets import MANIFEST_KIND, MANIFEST_SCHEMA_VERSION, SampleRecord
from dialkit.errors import DomainError, DuplicateIdError, UnknownIdError
from dialkit.evaluation import (
    ClockReading,
    GaugeReading,
    degradation_curve,
    emit_report,
    evaluate,
    parse_prediction,
    read_predictions,
    render_degradation_svg,
    report_to_csv,
)
from dialkit.render import AppearanceCondition
from dialkit.states import ClockState, GaugeState, clock_from_minutes, format_clock


def make_record(rid, state, split="combined", bucket=0, severity=0.1, task=None):
    if task is None:
        task = "clock" if isinstance(state, ClockState) else "gauge"
    return SampleRecord(
        id=rid, task=task, split=split, state=state,
        appearance=AppearanceCondition.neutral(), severity=severity,
        bucket=bucket, style_seed=0, image_path=f"images/{rid}.png",
    )


def make_header(task="clock", bucket_count=4):
    return {"schema_version": MANIFEST_SCHEMA_VERSION, "kind": MANIFEST_KIND,
            "task": task, "bucket_count": bucket_count}


class TestParsePrediction:
    def test_clock_examples(self):
        assert parse_prediction("Final answer: 07:45", "clock") == ClockReading(465)
        assert parse_prediction("I cannot tell", "clock") is None
        assert parse_prediction("reads 25:99", "clock") is None

    def test_clock_last_match_wins(self):
        assert parse_prediction("maybe 3:00, no wait 4:30", "clock") == ClockReading(270)

    def test_clock_hour_normalization(self):
        assert parse_prediction("0:15", "clock") == ClockReading(15)
        assert parse_prediction("12:34", "clock") == ClockReading(34)

    def test_clock_rejects_embedded_digits(self):
        assert parse_prediction("code 114:30b", "clock") is None
        assert parse_prediction("at 14:30 sharp", "clock") is None

    def test_gauge_examples(self):
        assert parse_prediction("value is about 42.5 units", "gauge") \
            == GaugeReading(42.5)
        assert parse_prediction("no reading visible", "gauge") is None

    def test_gauge_last_number_wins_and_flags_range(self):
        from dialkit.states import DEFAULT_GAUGE_CALIBRATION

        reading = parse_prediction("between 10 and 150", "gauge",
                                   DEFAULT_GAUGE_CALIBRATION)
        assert reading.value == 150.0
        assert reading.out_of_range

    def test_unknown_task(self):
        with pytest.raises(DomainError):
            parse_prediction("1:00", "sundial")


class TestEvaluate:
    def test_all_exact(self):
        records = [make_record(f"r{i}", clock_from_minutes(i * 37)) for i in range(8)]
        preds = {rec.id: f"Answer: {format_clock(rec.state)}" for rec in records}
        report = evaluate((make_header(), records), preds)
        overall = report["overall"]
        assert overall["exact_match_pct"] == 100.0
        assert overall["tol1_pct"] == 100.0
        assert overall["tol5_pct"] == 100.0
        assert overall["mae"] == 0.0
        assert overall["parse_failure_pct"] == 0.0

    def test_three_minute_error_fixture(self):
        records = [make_record("r0", ClockState(0, 0))]
        report = evaluate((make_header(), records), {"r0": "looks like 12:03"})
        overall = report["overall"]
        assert overall["exact_match_pct"] == 0.0
        assert overall["tol1_pct"] == 0.0
        assert overall["tol5_pct"] == 100.0
        assert overall["mae"] == 3.0

    def test_two_sample_aggregate(self):
        records = [make_record("r0", ClockState(0, 0)),
                   make_record("r1", ClockState(0, 0))]
        preds = {"r0": "12:00", "r1": "12:10"}
        report = evaluate((make_header(), records), preds)
        overall = report["overall"]
        assert overall["exact_match_pct"] == 50.0
        assert overall["tol5_pct"] == 50.0
        assert overall["mae"] == 5.0

    def test_parse_failures_counted_not_in_mae(self):
        records = [make_record("r0", ClockState(0, 0)),
                   make_record("r1", ClockState(0, 0))]
        preds = {"r0": "12:02"}  # r1 missing -> parse failure
        report = evaluate((make_header(), records), preds)
        overall = report["overall"]
        assert overall["parse_failure_pct"] == 50.0
        assert overall["mae"] == 2.0
        assert overall["n_parsed"] == 1

    def test_tolerance_monotonicity_on_random_sets(self):
        rng = np.random.default_rng(4)
        records = [make_record(f"r{i}", clock_from_minutes(int(rng.integers(0, 720))),
                               bucket=int(rng.integers(0, 4)))
                   for i in range(60)]
        preds = {}
        for rec in records:
            if rng.random() < 0.1:
                preds[rec.id] = "unreadable"
            else:
                noisy = clock_from_minutes(
                    rec.state.minutes_of_cycle + int(rng.integers(-30, 31)))
                preds[rec.id] = format_clock(noisy)
        report = evaluate((make_header(), records), preds)
        for group in [report["overall"], report["splits"]["combined"]["overall"],
                      *report["splits"]["combined"]["buckets"]]:
            assert group["exact_match_pct"] <= group["tol1_pct"] <= group["tol5_pct"]

    def test_prediction_order_irrelevant(self):
        rng = np.random.default_rng(5)
        records = [make_record(f"r{i}", clock_from_minutes(int(rng.integers(0, 720))))
                   for i in range(20)]
        preds = {rec.id: format_clock(clock_from_minutes(
            rec.state.minutes_of_cycle + int(rng.integers(0, 9)))) for rec in records}
        shuffled = dict(reversed(list(preds.items())))
        assert evaluate((make_header(), records), preds) \
            == evaluate((make_header(), records), shuffled)

    def test_bucket_weighted_reconstruction(self):
        rng = np.random.default_rng(6)
        records = []
        for i in range(40):
            bucket = i % 4
            records.append(make_record(
                f"r{i}", clock_from_minutes(int(rng.integers(0, 720))),
                bucket=bucket, severity=(bucket + 0.5) / 4))
        preds = {rec.id: format_clock(clock_from_minutes(
            rec.state.minutes_of_cycle + int(rng.integers(0, 4)))) for rec in records}
        report = evaluate((make_header(), records), preds)
        split = report["splits"]["combined"]
        for key in ("exact_match_pct", "tol1_pct", "tol5_pct"):
            weighted = sum(b[key] * b["n"] for b in split["buckets"])
            assert weighted / split["overall"]["n"] \
                == pytest.approx(split["overall"][key], abs=1e-9)

    def test_gauge_em_uses_half_minor_tick(self):
        records = [make_record("g0", GaugeState(50.0))]
        header = make_header(task="gauge")
        assert evaluate((header, records), {"g0": "reads 50.9"})["overall"][
            "exact_match_pct"] == 100.0
        report = evaluate((header, records), {"g0": "reads 51.5"})
        assert report["overall"]["exact_match_pct"] == 0.0
        assert report["overall"]["tol1_pct"] == 100.0
        assert evaluate((header, records), {"g0": "reads 70"})["overall"][
            "mae"] == pytest.approx(0.2)

    def test_unknown_and_duplicate_ids(self, tmp_path):
        records = [make_record("r0", ClockState(0, 0))]
        with pytest.raises(UnknownIdError):
            evaluate((make_header(), records), {"ghost": "12:00"})
        pred_file = tmp_path / "preds.jsonl"
        pred_file.write_text('{"id":"r0","prediction":"12:00"}\n'
                             '{"id":"r0","prediction":"12:01"}\n')
        with pytest.raises(DuplicateIdError):
            read_predictions(pred_file)


class TestDegradationCurve:
    @pytest.fixture()
    def bucketed_report(self):
        rng = np.random.default_rng(7)
        records, preds = [], {}
        for i in range(80):
            bucket = i % 4
            rec = make_record(f"r{i}", clock_from_minutes(int(rng.integers(0, 720))),
                              bucket=bucket, severity=(bucket + 0.5) / 4)
            records.append(rec)
            offset = int(rng.integers(0, 3)) * bucket  # worse in higher buckets
            preds[rec.id] = format_clock(clock_from_minutes(
                rec.state.minutes_of_cycle + offset))
        return (make_header(), records), preds

    def test_series_shape_and_centers(self, bucketed_report):
        manifest, preds = bucketed_report
        report = evaluate(manifest, preds)
        series = degradation_curve(report, "combined", "em")
        assert len(series) == 4
        assert [round(c, 3) for c, _ in series] == [0.125, 0.375, 0.625, 0.875]

    def test_flat_curve_when_all_correct(self):
        records = [make_record(f"r{i}", ClockState(1, 1), bucket=i % 4)
                   for i in range(8)]
        preds = {rec.id: "1:01" for rec in records}
        report = evaluate((make_header(), records), preds)
        assert all(pct == 100.0 for _, pct in degradation_curve(report, "combined"))

    def test_bucket_points_match_filtered_evaluation(self, bucketed_report):
        (header, records), preds = bucketed_report
        report = evaluate((header, records), preds)
        series = degradation_curve(report, "combined", "em")
        for bucket, (_, pct) in enumerate(series):
            rows = [rec for rec in records if rec.bucket == bucket]
            sub_preds = {rec.id: preds[rec.id] for rec in rows}
            sub = evaluate((header, rows), sub_preds)
            assert sub["overall"]["exact_match_pct"] == pytest.approx(pct, abs=1e-12)


class TestEmitReport:
    @pytest.fixture()
    def report(self):
        records = [make_record(f"r{i}", clock_from_minutes(40 * i), bucket=i % 4)
                   for i in range(16)]
        preds = {rec.id: format_clock(rec.state) for rec in records[:12]}
        return evaluate((make_header(), records), preds)

    def test_json_csv_values_agree(self, report, tmp_path):
        json_path = emit_report(report, tmp_path / "r.json", "json")
        csv_path = emit_report(report, tmp_path / "r.csv", "csv")
        loaded = json.loads(json_path.read_text())
        lines = csv_path.read_text().splitlines()
        header = lines[0].split(",")
        overall_row = dict(zip(header, lines[1].split(",")))
        assert float(overall_row["exact_match_pct"]) \
            == loaded["overall"]["exact_match_pct"]
        assert float(overall_row["parse_failure_pct"]) \
            == loaded["overall"]["parse_failure_pct"]

    def test_emissions_deterministic(self, report, tmp_path):
        a = emit_report(report, tmp_path / "a.svg", "svg").read_bytes()
        b = emit_report(report, tmp_path / "b.svg", "svg").read_bytes()
        assert a == b

    def test_svg_has_one_point_per_bucket(self, report):
        svg = render_degradation_svg(report, "em")
        assert svg.count("<circle") == report["bucket_count"] * len(report["splits"])

    def test_csv_deterministic(self, report):
        assert report_to_csv(report) == report_to_csv(json.loads(json.dumps(report)))

    def test_unknown_format(self, report, tmp_path):
        with pytest.raises(DomainError):
            emit_report(report, tmp_path / "r.xml", "xml")
