"""Command-line entry point.

One binary, subcommand style: generate, pairs, triplets, sft, reward,
evaluate, probe, plot.  Machine-readable data goes to files under --out;
human-readable summaries and diagnostics go to stderr.  Exit codes: 0 on
success, 1 on a domain error, 2 on usage errors.

Every subcommand accepts --config pointing at a JSON file whose keys mirror
the long flag names (dashes allowed); explicit flags override config values,
and the fully resolved configuration is echoed next to the outputs as
run-config.json for provenance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .alignment import MarginSchedule, RewardConfig, combined_reward, group_normalize, state_reward
from .datasets import (
    BenchmarkConfig,
    TripletConfig,
    generate_benchmark,
    generate_pairs,
    generate_triplets,
    write_sft_targets,
)
from .errors import ConfigError, DialkitError, ManifestError
from .evaluation import emit_report, evaluate, parse_prediction
from .probes import pca_project, probe_report, read_embeddings
from .render import SPLITS
from .states import (
    DEFAULT_GAUGE_CALIBRATION,
    ClockState,
    GaugeState,
    clock_distance,
    parse_clock_text,
    state_from_json,
)

_REQUIRED = object()


def load_config(path) -> dict:
    """Load a JSON config file; empty file means all defaults.

    Duplicate keys are rejected (they almost always indicate an editing
    mistake that JSON parsers would otherwise silently swallow).
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return {}

    def no_duplicates(pairs):
        out = {}
        for key, value in pairs:
            if key in out:
                raise ConfigError(f"{path}: duplicate key {key!r}")
            out[key] = value
        return out

    try:
        obj = json.loads(text, object_pairs_hook=no_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return {key.replace("-", "_"): value for key, value in obj.items()}


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge flag values over config-file values over defaults."""
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(cfg) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        value = flag if flag is not None else cfg.get(key, default)
        if value is _REQUIRED:
            raise ConfigError(f"missing required option --{key.replace('_', '-')}")
        resolved[key] = value
    return resolved


def _echo_config(resolved: dict, target_dir: Path, command: str) -> None:
    target_dir.mkdir(parents=True, exist_ok=True)
    payload = {"command": command}
    payload.update({k: v for k, v in sorted(resolved.items())})
    (target_dir / "run-config.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _say(message: str) -> None:
    print(message, file=sys.stderr)


# --- subcommand handlers -------------------------------------------------------


_GENERATE_DEFAULTS = dict(
    task="clock", split="combined", n=400, buckets=4, seed=0,
    image_size=448, supersample=2, unique_states=False, jobs=1,
    style_file=None, out=_REQUIRED,
)


def _cmd_generate(args) -> int:
    opts = _resolve(args, _GENERATE_DEFAULTS)
    splits = list(SPLITS) if opts["split"] == "all" else [opts["split"]]
    style_override = None
    if opts["style_file"]:
        from .render import StyleConfig

        style_override = StyleConfig.from_json(
            json.loads(Path(opts["style_file"]).read_text(encoding="utf-8")))
    cfg = BenchmarkConfig(
        task=opts["task"],
        counts={split: opts["n"] for split in splits},
        bucket_count=opts["buckets"],
        master_seed=opts["seed"],
        image_size=opts["image_size"],
        supersample=opts["supersample"],
        unique_states=opts["unique_states"],
        jobs=opts["jobs"],
        style_override=style_override,
    )
    cfg.validate()
    out = Path(opts["out"])
    manifest = generate_benchmark(cfg, out)
    _echo_config(opts, out, "generate")
    _say(f"wrote {sum(cfg.counts.values())} samples to {out} (manifest {manifest.name})")
    return 0


_PAIRS_DEFAULTS = dict(
    type="same", task="clock", n=100, delta=None, seed=0,
    image_size=448, supersample=2, jobs=1, out=_REQUIRED,
)


def _cmd_pairs(args) -> int:
    opts = _resolve(args, _PAIRS_DEFAULTS)
    out = Path(opts["out"])
    path = generate_pairs(
        opts["type"], opts["n"], opts["seed"], out, task=opts["task"],
        delta=opts["delta"], image_size=opts["image_size"],
        supersample=opts["supersample"], jobs=opts["jobs"],
    )
    _echo_config(opts, out, "pairs")
    _say(f"wrote {opts['n']} {opts['type']} pairs to {out} ({path.name})")
    return 0


_TRIPLETS_DEFAULTS = dict(
    task="clock", n=100, seed=0, gap_lo=0.05, gap_hi=1.0,
    margin_min=0.2, margin_max=1.0, gap_cap=0.5,
    image_size=448, supersample=2, jobs=1, out=_REQUIRED,
)


def _cmd_triplets(args) -> int:
    opts = _resolve(args, _TRIPLETS_DEFAULTS)
    out = Path(opts["out"])
    cfg = TripletConfig(
        task=opts["task"],
        neg_gap_range=(opts["gap_lo"], opts["gap_hi"]),
        schedule=MarginSchedule(opts["margin_min"], opts["margin_max"], opts["gap_cap"]),
    )
    path = generate_triplets(
        opts["n"], opts["seed"], out, cfg,
        image_size=opts["image_size"], supersample=opts["supersample"],
        jobs=opts["jobs"],
    )
    _echo_config(opts, out, "triplets")
    _say(f"wrote {opts['n']} triplets to {out} ({path.name})")
    return 0


_SFT_DEFAULTS = dict(manifest=_REQUIRED, out=_REQUIRED)


def _cmd_sft(args) -> int:
    opts = _resolve(args, _SFT_DEFAULTS)
    out = Path(opts["out"])
    path = write_sft_targets(opts["manifest"], out)
    _echo_config(opts, out.parent, "sft")
    _say(f"wrote grounded targets to {path}")
    return 0


_REWARD_DEFAULTS = dict(
    input=_REQUIRED, out=_REQUIRED, task="clock",
    sigma=0.05, beta=0.1, group_eps=1e-8,
)


def _parse_truth(value, task: str):
    if isinstance(value, dict):
        return state_from_json(value)
    text = str(value)
    if task == "clock":
        return parse_clock_text(text)
    return GaugeState(float(text), DEFAULT_GAUGE_CALIBRATION)


def _reward_distance(reading, truth) -> float | None:
    if reading is None:
        return None
    if isinstance(truth, ClockState):
        pred = ClockState(reading.minutes // 60, reading.minutes % 60)
        return clock_distance(pred, truth) / 360.0
    return abs(reading.value - truth.value) / truth.calibration.value_span


def _cmd_reward(args) -> int:
    opts = _resolve(args, _REWARD_DEFAULTS)
    config = RewardConfig(sigma=opts["sigma"], beta=opts["beta"],
                          group_eps=opts["group_eps"])
    task = opts["task"]
    in_path, out_path = Path(opts["input"]), Path(opts["out"])

    rows = []
    with in_path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                response = obj["response_text"]
                truth = _parse_truth(obj["ground_truth_state"], task)
                rid = obj["id"]
            except DialkitError:
                raise
            except Exception as exc:
                raise ManifestError(f"{in_path}:{lineno}: bad reward row: {exc}") from exc
            calibration = truth.calibration if isinstance(truth, GaugeState) else None
            reading = parse_prediction(response, task, calibration)
            distance = _reward_distance(reading, truth)
            r_fmt = 0 if reading is None else 1
            r_state = 0.0 if distance is None else state_reward(distance, config)
            rows.append({
                "id": rid,
                "r_state": r_state,
                "r_fmt": r_fmt,
                "r": combined_reward(r_state, r_fmt, config),
                "group_id": obj.get("group_id"),
            })

    groups: dict = {}
    for i, row in enumerate(rows):
        if row["group_id"] is not None:
            groups.setdefault(row["group_id"], []).append(i)
    advantages = {}
    for indices in groups.values():
        adv = group_normalize([rows[i]["r"] for i in indices], config.group_eps)
        advantages.update(dict(zip(indices, adv)))

    with out_path.open("w", encoding="utf-8") as fh:
        for i, row in enumerate(rows):
            out_row = {"id": row["id"], "r_state": row["r_state"],
                       "r_fmt": row["r_fmt"], "r": row["r"]}
            if row["group_id"] is not None:
                out_row["group_id"] = row["group_id"]
                out_row["advantage"] = advantages[i]
            fh.write(json.dumps(out_row, separators=(",", ":")) + "\n")
    _echo_config(opts, out_path.parent, "reward")
    _say(f"scored {len(rows)} responses ({len(groups)} groups) into {out_path}")
    return 0


_EVALUATE_DEFAULTS = dict(
    manifest=_REQUIRED, predictions=_REQUIRED, out=_REQUIRED,
    format="json", tolerance_metric="em",
)


def _cmd_evaluate(args) -> int:
    opts = _resolve(args, _EVALUATE_DEFAULTS)
    out = Path(opts["out"])
    report = evaluate(opts["manifest"], opts["predictions"])
    emit_report(report, out, opts["format"], opts["tolerance_metric"])
    _echo_config(opts, out.parent, "evaluate")
    overall = report["overall"]
    _say(f"evaluated {overall['n']} samples: EM {overall['exact_match_pct']:.2f}%, "
         f"Tol-1 {overall['tol1_pct']:.2f}%, Tol-5 {overall['tol5_pct']:.2f}%")
    return 0


_PROBE_DEFAULTS = dict(
    embeddings=_REQUIRED, manifest=_REQUIRED, out=_REQUIRED, coords=None,
    retrieval_metric="cosine", silhouette_metric="euclidean", coarse=False,
)


def _cmd_probe(args) -> int:
    opts = _resolve(args, _PROBE_DEFAULTS)
    out = Path(opts["out"])
    ids, vectors = read_embeddings(opts["embeddings"])
    report = probe_report((ids, vectors), opts["manifest"],
                          retrieval_metric=opts["retrieval_metric"],
                          silhouette_metric=opts["silhouette_metric"],
                          coarse=opts["coarse"])
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    _echo_config(opts, out.parent, "probe")
    if opts["coords"]:
        sorted_ids, coords, degenerate = pca_project((ids, vectors))
        lines = ["id,x,y"]
        for rid, (x, y) in zip(sorted_ids, coords):
            lines.append(f"{rid},{x!r},{y!r}")
        Path(opts["coords"]).write_text("\n".join(lines) + "\n", encoding="utf-8")
        if degenerate:
            _say("warning: zero-variance embeddings, coordinates all zero")
    _say(f"probed {report['n']} embeddings: recall@1 {report['recall_at_1_pct']:.2f}%, "
         f"silhouette {report['silhouette']:.4f}")
    return 0


_PLOT_DEFAULTS = dict(report=_REQUIRED, out=_REQUIRED, metric="em")


def _cmd_plot(args) -> int:
    opts = _resolve(args, _PLOT_DEFAULTS)
    out = Path(opts["out"])
    report = json.loads(Path(opts["report"]).read_text(encoding="utf-8"))
    emit_report(report, out, "svg", opts["metric"])
    _echo_config(opts, out.parent, "plot")
    _say(f"wrote degradation chart to {out}")
    return 0


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialkit",
        description="Dial synthesis, alignment kernels, and readout evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override it")

    p = sub.add_parser("generate", help="generate a benchmark split with images")
    p.add_argument("--task", choices=["clock", "gauge"])
    p.add_argument("--split", choices=[*SPLITS, "all"])
    p.add_argument("--n", type=int, help="samples per split")
    p.add_argument("--buckets", type=int, help="severity buckets per split")
    p.add_argument("--seed", type=int)
    p.add_argument("--image-size", type=int, dest="image_size")
    p.add_argument("--supersample", type=int)
    p.add_argument("--unique-states", action="store_const", const=True,
                   dest="unique_states", help="each clock minute state at most once")
    p.add_argument("--jobs", type=int)
    p.add_argument("--style-file", dest="style_file",
                   help="JSON style config pinning one dial style for all samples")
    p.add_argument("--out")
    add_common(p)
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("pairs", help="generate same-state or neighbor pairs")
    p.add_argument("--type", choices=["same", "neighbor"])
    p.add_argument("--task", choices=["clock", "gauge"])
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=float, help="neighbor state step")
    p.add_argument("--seed", type=int)
    p.add_argument("--image-size", type=int, dest="image_size")
    p.add_argument("--supersample", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    add_common(p)
    p.set_defaults(handler=_cmd_pairs)

    p = sub.add_parser("triplets", help="generate margin-annotated triplets")
    p.add_argument("--task", choices=["clock", "gauge"])
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--gap-lo", type=float, dest="gap_lo")
    p.add_argument("--gap-hi", type=float, dest="gap_hi")
    p.add_argument("--margin-min", type=float, dest="margin_min")
    p.add_argument("--margin-max", type=float, dest="margin_max")
    p.add_argument("--gap-cap", type=float, dest="gap_cap")
    p.add_argument("--image-size", type=int, dest="image_size")
    p.add_argument("--supersample", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    add_common(p)
    p.set_defaults(handler=_cmd_triplets)

    p = sub.add_parser("sft", help="derive grounded readout targets from a manifest")
    p.add_argument("--manifest")
    p.add_argument("--out")
    add_common(p)
    p.set_defaults(handler=_cmd_sft)

    p = sub.add_parser("reward", help="score response files with state-aware rewards")
    p.add_argument("--input", help="JSONL of {id, response_text, ground_truth_state}")
    p.add_argument("--out")
    p.add_argument("--task", choices=["clock", "gauge"])
    p.add_argument("--sigma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--group-eps", type=float, dest="group_eps")
    add_common(p)
    p.set_defaults(handler=_cmd_reward)

    p = sub.add_parser("evaluate", help="score predictions against a manifest")
    p.add_argument("--manifest")
    p.add_argument("--predictions")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv", "svg"])
    p.add_argument("--tolerance-metric", choices=["em", "tol1", "tol5"],
                   dest="tolerance_metric")
    add_common(p)
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("probe", help="embedding-space diagnostics")
    p.add_argument("--embeddings")
    p.add_argument("--manifest")
    p.add_argument("--out")
    p.add_argument("--coords", help="also write a 2-d PCA projection CSV here")
    p.add_argument("--retrieval-metric", choices=["cosine", "euclidean"],
                   dest="retrieval_metric")
    p.add_argument("--silhouette-metric", choices=["cosine", "euclidean"],
                   dest="silhouette_metric")
    p.add_argument("--coarse", action="store_const", const=True,
                   help="group clock states into 5-minute bins")
    add_common(p)
    p.set_defaults(handler=_cmd_probe)

    p = sub.add_parser("plot", help="degradation chart from a saved report")
    p.add_argument("--report")
    p.add_argument("--out")
    p.add_argument("--metric", choices=["em", "tol1", "tol5"])
    add_common(p)
    p.set_defaults(handler=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DialkitError as exc:
        print(f"dialkit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
