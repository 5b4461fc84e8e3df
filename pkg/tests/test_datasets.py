import json

import numpy as np
import pytest
from PIL import Image

from dialkit.alignment import MarginSchedule, margin_for_gap
from dialkit.datasets import (
    BenchmarkConfig,
    SampleRecord,
    TripletConfig,
    bucket_of,
    generate_benchmark,
    generate_pairs,
    generate_triplets,
    read_manifest,
    render_record,
    sample_neighbor_pair,
    sample_same_state_pair,
    sample_triplet,
    sft_target,
    write_sft_targets,
)
from dialkit.errors import ConfigError, DomainError, ManifestError
from dialkit.evaluation import parse_prediction, reading_matches_state
from dialkit.states import (
    ClockState,
    GaugeState,
    clock_distance,
    clock_from_minutes,
    state_distance_normalized,
)

FAST = dict(image_size=64, supersample=1)


@pytest.fixture(scope="module")
def small_benchmark(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    cfg = BenchmarkConfig(task="clock", counts={"combined": 40}, bucket_count=4,
                          master_seed=7, **FAST)
    manifest = generate_benchmark(cfg, out)
    return cfg, out, manifest


class TestGenerateBenchmark:
    def test_counts_buckets_and_uniqueness(self, small_benchmark):
        cfg, out, manifest = small_benchmark
        header, records = read_manifest(manifest)
        assert len(records) == 40
        assert len({rec.id for rec in records}) == 40
        per_bucket = {}
        for rec in records:
            per_bucket[rec.bucket] = per_bucket.get(rec.bucket, 0) + 1
            assert rec.bucket == bucket_of(rec.severity, cfg.bucket_count)
            assert (out / rec.image_path).exists()
        assert per_bucket == {0: 10, 1: 10, 2: 10, 3: 10}

    def test_regeneration_is_byte_identical(self, small_benchmark, tmp_path):
        cfg, out, manifest = small_benchmark
        again = generate_benchmark(cfg, tmp_path)
        assert again.read_bytes() == manifest.read_bytes()
        _, records = read_manifest(manifest)
        probe = records[0]
        assert ((tmp_path / probe.image_path).read_bytes()
                == (out / probe.image_path).read_bytes())

    def test_images_match_rerender(self, small_benchmark):
        cfg, out, manifest = small_benchmark
        header, records = read_manifest(manifest)
        rec = records[3]
        on_disk = np.asarray(Image.open(out / rec.image_path))
        again = render_record(rec, header["image_size"], header["supersample"])
        assert np.array_equal(on_disk, again)

    def test_split_semantics_hold_row_wise(self, tmp_path):
        cfg = BenchmarkConfig(task="clock",
                              counts={"clean": 8, "view": 8, "illum": 8},
                              bucket_count=4, master_seed=3, **FAST)
        _, records = read_manifest(generate_benchmark(cfg, tmp_path))
        for rec in records:
            cond = rec.appearance
            if rec.split == "clean":
                assert cond.view_severity <= 0.1 and cond.illum_severity <= 0.1
            elif rec.split == "view":
                assert cond.brightness == 1.0 and cond.gamma == 1.0
                assert cond.glare_intensity == 0.0 and cond.blur_sigma_px == 0.0
            elif rec.split == "illum":
                assert cond.pitch_deg == 0.0 and cond.yaw_deg == 0.0
                assert cond.roll_deg == 0.0

    def test_unique_states_cover_each_minute_once(self, tmp_path):
        cfg = BenchmarkConfig(task="clock", counts={"combined": 720},
                              bucket_count=4, master_seed=5, unique_states=True,
                              image_size=32, supersample=1)
        _, records = read_manifest(generate_benchmark(cfg, tmp_path))
        minutes = sorted(rec.state.minutes_of_cycle for rec in records)
        assert minutes == list(range(720))

    def test_gauge_benchmark_round_trips(self, tmp_path):
        cfg = BenchmarkConfig(task="gauge", counts={"illum": 8}, bucket_count=2,
                              master_seed=11, **FAST)
        header, records = read_manifest(generate_benchmark(cfg, tmp_path))
        for rec in records:
            assert isinstance(rec.state, GaugeState)
            assert rec.state.calibration.calibration_id == "default"

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            BenchmarkConfig(counts={"combined": 10}, bucket_count=4).validate()
        with pytest.raises(ConfigError):
            BenchmarkConfig(counts={"weird": 8}).validate()
        with pytest.raises(ConfigError):
            BenchmarkConfig(counts={}).validate()
        with pytest.raises(ConfigError):
            BenchmarkConfig(task="gauge", counts={"clean": 8},
                            unique_states=True).validate()

    def test_style_override_recorded_and_reproducible(self, tmp_path):
        from dialkit.datasets import render_record_from_header
        from dialkit.render import StyleConfig

        pinned = StyleConfig(image_size_px=64, supersample=1,
                             numerals_enabled=True)
        cfg = BenchmarkConfig(task="clock", counts={"clean": 4}, bucket_count=2,
                              master_seed=21, style_override=pinned, **FAST)
        manifest = generate_benchmark(cfg, tmp_path)
        header, records = read_manifest(manifest)
        assert StyleConfig.from_json(header["style_override"]) == pinned
        rec = records[0]
        on_disk = np.asarray(Image.open(tmp_path / rec.image_path))
        assert np.array_equal(on_disk, render_record_from_header(rec, header))
        # The pool would have produced a different face for this seed.
        assert not np.array_equal(on_disk, render_record(rec, 64, 1))

    def test_parallel_generation_matches_serial(self, tmp_path):
        cfg1 = BenchmarkConfig(task="clock", counts={"view": 8}, bucket_count=4,
                               master_seed=9, jobs=1, **FAST)
        cfg2 = BenchmarkConfig(task="clock", counts={"view": 8}, bucket_count=4,
                               master_seed=9, jobs=2, **FAST)
        m1 = generate_benchmark(cfg1, tmp_path / "serial")
        m2 = generate_benchmark(cfg2, tmp_path / "parallel")
        assert m1.read_bytes() == m2.read_bytes()
        _, records = read_manifest(m1)
        for rec in records[:3]:
            assert ((tmp_path / "serial" / rec.image_path).read_bytes()
                    == (tmp_path / "parallel" / rec.image_path).read_bytes())


class TestPairs:
    def test_same_state_pair_shares_state_not_appearance(self):
        state = ClockState(6, 30)
        rec_a, rec_b = sample_same_state_pair(state, master_seed=1, index=0)
        assert rec_a.state == rec_b.state
        assert clock_distance(rec_a.state, rec_b.state) == 0
        assert rec_a.appearance.to_json() != rec_b.appearance.to_json()
        assert rec_a.id != rec_b.id

    def test_same_state_pair_deterministic(self):
        a1 = sample_same_state_pair(ClockState(1, 2), 42, 3)
        a2 = sample_same_state_pair(ClockState(1, 2), 42, 3)
        assert a1 == a2

    def test_neighbor_pair_advances_by_delta(self):
        rec_a, rec_b = sample_neighbor_pair(ClockState(0, 0), 1, master_seed=1, index=0)
        assert rec_a.state == ClockState(0, 0)
        assert rec_b.state == ClockState(0, 1)
        assert clock_distance(rec_a.state, rec_b.state) == 1

    def test_neighbor_pair_wraps_the_cycle(self):
        rec_a, rec_b = sample_neighbor_pair(ClockState(11, 59), 1, master_seed=1, index=0)
        assert rec_a.state == ClockState(11, 59)
        assert rec_b.state == ClockState(0, 0)

    def test_neighbor_pair_shares_appearance(self):
        rec_a, rec_b = sample_neighbor_pair(ClockState(3, 15), 1, master_seed=8, index=2)
        assert rec_a.appearance.to_json() == rec_b.appearance.to_json()

    def test_gauge_neighbor_recenters_at_range_edge(self):
        rec_a, rec_b = sample_neighbor_pair(GaugeState(99.5), 2.0, master_seed=1, index=0)
        assert rec_a.state.value == pytest.approx(98.0)
        assert rec_b.state.value == pytest.approx(100.0)
        assert abs(rec_b.state.value - rec_a.state.value) == pytest.approx(2.0)

    def test_invalid_delta(self):
        with pytest.raises(DomainError):
            sample_neighbor_pair(ClockState(0, 0), 0, 1, 0)
        with pytest.raises(DomainError):
            sample_neighbor_pair(ClockState(0, 0), 1.5, 1, 0)
        with pytest.raises(DomainError):
            sample_neighbor_pair(GaugeState(50.0), 200.0, 1, 0)

    def test_generate_pairs_files(self, tmp_path):
        pairs_path = generate_pairs("same", 4, 13, tmp_path, task="clock", **FAST)
        header, records = read_manifest(tmp_path / "manifest.jsonl")
        ids = {rec.id for rec in records}
        rows = [json.loads(line) for line in pairs_path.read_text().splitlines()]
        assert len(rows) == 4
        for row in rows:
            assert row["first_id"] in ids and row["second_id"] in ids


class TestTriplets:
    def test_margin_and_gap_recompute_from_records(self):
        cfg = TripletConfig(task="clock")
        for index in range(20):
            triplet, (rec_a, rec_p, rec_n) = sample_triplet(99, index, cfg)
            assert state_distance_normalized(rec_a.state, rec_p.state) == 0.0
            gap = state_distance_normalized(rec_a.state, rec_n.state)
            assert gap > 0.0
            assert triplet.state_gap_norm == gap
            assert triplet.margin == margin_for_gap(gap, cfg.schedule)

    def test_pinned_gap_hits_schedule_ceiling(self):
        cfg = TripletConfig(task="clock", neg_gap_range=(0.5, 0.5),
                            schedule=MarginSchedule(0.2, 1.0, 0.5))
        triplet, _ = sample_triplet(7, 0, cfg)
        assert triplet.state_gap_norm == pytest.approx(0.5)
        assert triplet.margin == pytest.approx(1.0)

    def test_gauge_triplets_respect_range(self):
        cfg = TripletConfig(task="gauge", neg_gap_range=(0.6, 0.9))
        for index in range(20):
            triplet, (rec_a, _, rec_n) = sample_triplet(5, index, cfg)
            assert 0.0 <= rec_n.state.value <= 100.0
            assert triplet.state_gap_norm == pytest.approx(
                abs(rec_n.state.value - rec_a.state.value) / 100.0)

    def test_triplet_ids_subset_of_manifest(self, tmp_path):
        path = generate_triplets(5, 3, tmp_path, TripletConfig(task="clock"), **FAST)
        _, records = read_manifest(tmp_path / "manifest.jsonl")
        ids = {rec.id for rec in records}
        for line in path.read_text().splitlines():
            row = json.loads(line)
            assert {row["anchor_id"], row["positive_id"], row["negative_id"]} <= ids
            assert row["margin"] == margin_for_gap(row["state_gap_norm"])

    def test_bad_gap_range(self):
        with pytest.raises(ConfigError):
            TripletConfig(neg_gap_range=(0.0, 0.5)).validate()
        with pytest.raises(ConfigError):
            TripletConfig(neg_gap_range=(0.7, 0.2)).validate()


class TestGroundedTargets:
    def test_clock_template_fields(self):
        rec, _ = sample_same_state_pair(ClockState(6, 30), 1, 0)
        target = sft_target(rec)
        assert "minute hand at 180 degrees" in target.rendered_text
        assert "hour hand at 195 degrees" in target.rendered_text
        assert target.rendered_text.endswith("Answer: 6:30")
        assert target.steps["final_state"] == "6:30"

    def test_gauge_template_fields(self):
        rec, _ = sample_same_state_pair(GaugeState(50.0), 1, 0)
        target = sft_target(rec)
        assert "pointer at 90 degrees" in target.rendered_text
        assert target.rendered_text.endswith("Answer: 50.0")

    def test_round_trip_through_parser(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            state = clock_from_minutes(int(rng.integers(0, 720)))
            rec, _ = sample_same_state_pair(state, 4, 0)
            reading = parse_prediction(sft_target(rec).rendered_text, "clock")
            assert reading_matches_state(reading, state)
        for _ in range(50):
            value = round(float(rng.uniform(0, 100)), 4)
            rec, _ = sample_same_state_pair(GaugeState(value), 4, 0)
            reading = parse_prediction(sft_target(rec).rendered_text, "gauge")
            assert reading_matches_state(reading, state=rec.state)

    def test_sft_file_round_trip(self, small_benchmark, tmp_path):
        _, out, manifest = small_benchmark
        sft_path = write_sft_targets(manifest, tmp_path / "sft.jsonl")
        _, records = read_manifest(manifest)
        by_id = {rec.id: rec for rec in records}
        rows = [json.loads(line) for line in sft_path.read_text().splitlines()]
        assert len(rows) == len(records)
        for row in rows:
            rec = by_id[row["sample_id"]]
            assert row["prompt"] == "Read the instrument and state its value."
            reading = parse_prediction(row["target_text"], rec.task)
            assert reading_matches_state(reading, rec.state)


class TestManifestIO:
    def test_corrupt_row_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"schema_version":1,"kind":"dial-manifest"}\n{oops\n')
        with pytest.raises(ManifestError, match=":2:"):
            read_manifest(path)

    def test_schema_version_checked(self, tmp_path):
        path = tmp_path / "v9.jsonl"
        path.write_text('{"schema_version":9,"kind":"dial-manifest"}\n')
        with pytest.raises(ManifestError, match="schema_version"):
            read_manifest(path)

    def test_duplicate_ids_rejected(self, small_benchmark, tmp_path):
        _, out, manifest = small_benchmark
        lines = manifest.read_text().splitlines()
        dup = tmp_path / "dup.jsonl"
        dup.write_text("\n".join([lines[0], lines[1], lines[1]]) + "\n")
        with pytest.raises(ManifestError, match="duplicate"):
            read_manifest(dup)

    def test_record_json_round_trip(self, small_benchmark):
        _, _, manifest = small_benchmark
        _, records = read_manifest(manifest)
        rec = records[0]
        assert SampleRecord.from_json(rec.to_json()) == rec
