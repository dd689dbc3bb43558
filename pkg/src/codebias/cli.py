"""Command-line entry point.

Subcommands map one-to-one onto the experiment protocols: generate, audit,
compare, report, sweep, difficulty, detect, plus extract (influence analysis
over a labeled-snippet JSONL, which is also the surface the execution oracle
scores against).

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 upstream-model
failure budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, corpus, pipeline, report
from .corpus import (DEFAULT_BLOCKLIST, Difficulty, MitigationStrategy,
                     attribute_subset, enumerate_corpus, load_builtin_spec,
                     load_dataset_spec, load_template_bank, sensitive_free)
from .detection import (DetectionBuildError, STRATEGIES, build_detection_set,
                        run_detection)
from .extractor import dataflow
from .modelclient import FixtureStore, GenerationConfig, ModelClient

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_FAILURE_BUDGET = 3

CONFIG_DEFAULTS = {
    "datasets": "crime,compas,income,employment,insurance,credit,law",
    "code_types": "conditional,ml_pipeline",
    "mitigation": "none",
    "blocklist": ",".join(DEFAULT_BLOCKLIST),
    "difficulty": "default",
    "seed": "42",
    "model_id": "fixture-model",
    "temperature": "0.0",
    "max_tokens": "512",
    "endpoint": "replay",
    "alpha": "0.001",
    "epsilon": "1e-6",
    "extractor": "static",
    "judge_model_id": "judge-fixture",
    "detect_judge_model_id": "detector-fixture",
    "quota_per_pair": "20",
    "strategies": "specific",
    "sweep": "5,10,15,20,25,30,35,40,45,50,55,60,65,70,75,80,85,90",
    "sweep_dataset": "crime_full",
    "sweep_max_tokens": "2048",
    "irrelevant_in_sweep": "true",
    "failure_budget": "0.05",
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def load_config(path: str | None) -> dict:
    cfg = dict(CONFIG_DEFAULTS)
    if path is None:
        return cfg
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {path}", EXIT_IO)
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise CliError(f"{path}:{lineno}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if key not in CONFIG_DEFAULTS:
            raise CliError(f"{path}:{lineno}: unknown config key '{key}'")
        cfg[key] = value.strip()
    return cfg


def _csv_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def load_specs(cfg: dict) -> list[corpus.DatasetSpec]:
    names = _csv_list(cfg["datasets"])
    if not names:
        raise CliError("config names no datasets")
    specs = []
    for name in names:
        try:
            if name.endswith(".json"):
                specs.append(load_dataset_spec(name))
            else:
                specs.append(load_builtin_spec(name))
        except corpus.DatasetSpecError as exc:
            raise CliError(f"dataset spec error: {exc}") from exc
    return specs


def build_mitigation(cfg: dict) -> MitigationStrategy:
    kind = cfg["mitigation"]
    if kind == "blocklist":
        return MitigationStrategy(kind="blocklist",
                                  blocklist_names=tuple(_csv_list(cfg["blocklist"])))
    try:
        return MitigationStrategy(kind=kind)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def build_client(args, live_endpoint: str) -> ModelClient:
    if getattr(args, "replay", None):
        return ModelClient(store=FixtureStore(args.replay), mode="replay")
    if getattr(args, "record", None):
        return ModelClient(store=FixtureStore(args.record), mode="record")
    if live_endpoint == "replay":
        raise CliError("endpoint is 'replay' but no --replay store was given")
    return ModelClient(mode="live")


def config_snapshot(cfg: dict, **overrides) -> dict:
    snap = dict(cfg)
    snap.update({k: v for k, v in overrides.items() if v is not None})
    return snap


def _generate_records(specs, cfg, args, *, code_types=None, mitigation=None,
                      difficulty=None, max_tokens=None, seed=None):
    """Render a corpus and collect completions; returns (records, client, instances)."""
    bank = load_template_bank()
    mitigation = mitigation or build_mitigation(cfg)
    difficulty = difficulty or Difficulty(cfg["difficulty"])
    code_types = code_types or _csv_list(cfg["code_types"])
    seed = seed if seed is not None else int(cfg["seed"])
    try:
        instances = enumerate_corpus(specs, code_types, mitigation, difficulty, seed, bank)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    client = build_client(args, cfg["endpoint"])
    gen_config = GenerationConfig(
        model_id=cfg["model_id"],
        temperature=float(cfg["temperature"]),
        max_tokens=max_tokens if max_tokens is not None else int(cfg["max_tokens"]),
        endpoint=cfg["endpoint"],
    )
    samples = client.generate_many(instances, gen_config)
    if client.mode != "replay":
        failures = sum(1 for s in samples if s.status == "transport_error")
        if samples and failures / len(samples) > float(cfg["failure_budget"]):
            raise CliError(
                f"{failures}/{len(samples)} generations failed transport, over the "
                f"{cfg['failure_budget']} budget", EXIT_FAILURE_BUDGET)
    by_id = {s.id: s for s in specs}
    records = [pipeline.record_from_sample(s, by_id[s.instance.dataset_id]) for s in samples]
    return records, client, instances


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    specs = load_specs(cfg)
    records, client, instances = _generate_records(specs, cfg, args)
    out = _out_dir(args)
    pipeline.write_samples(out / "samples.jsonl", records)
    manifest = report.RunManifest(
        run_id="", config=config_snapshot(cfg), corpus_sha=corpus.corpus_sha(instances),
        fixture_sha=client.store.sha256() if client.store else "none", m=0)
    manifest.run_id = args.run_id or manifest.hash
    manifest.write(out / "manifest.json")
    print(f"wrote {len(records)} samples to {out / 'samples.jsonl'} (run {manifest.run_id})")
    return EXIT_OK


def _audit_run(records, cfg, args):
    mode = args.extractor or cfg["extractor"]
    judge_client = None
    judge_config = None
    if mode == "llm":
        if not getattr(args, "replay", None) and cfg["endpoint"] == "replay":
            raise CliError("llm extractor needs --replay fixtures or a live endpoint")
        judge_client = build_client(args, cfg["endpoint"])
        judge_config = GenerationConfig(model_id=cfg["judge_model_id"],
                                        endpoint=cfg["endpoint"])
    return pipeline.audit_samples(
        records, mode=mode, client=judge_client, judge_config=judge_config,
        epsilon=float(cfg["epsilon"]),
        alpha=float(args.alpha) if args.alpha is not None else float(cfg["alpha"]),
        count_failures_as_unbiased=args.count_failures_as_unbiased)


def cmd_audit(args) -> int:
    run_dir = Path(args.run)
    samples_path = Path(args.samples) if args.samples else run_dir / "samples.jsonl"
    if not samples_path.exists():
        print(f"error: samples file not found: {samples_path}", file=sys.stderr)
        return EXIT_IO
    cfg = load_config(args.config)
    try:
        records = pipeline.read_samples(samples_path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"error: unreadable samples: {exc}", file=sys.stderr)
        return EXIT_IO

    result = _audit_run(records, cfg, args)
    manifest_path = run_dir / "manifest.json"
    if manifest_path.exists():
        manifest = report.RunManifest.read(manifest_path)
    else:
        manifest = report.RunManifest(run_id="adhoc", config={}, corpus_sha="none",
                                      fixture_sha="none", m=0)
    manifest.m = result.m
    manifest.config = config_snapshot(
        manifest.config or {},
        extractor=result.tallies["extractor_mode"],
        alpha=args.alpha if args.alpha is not None else cfg["alpha"],
        epsilon=cfg["epsilon"],
        count_failures_as_unbiased=args.count_failures_as_unbiased)
    manifest.write(manifest_path)

    pipeline.write_influence(run_dir / "influence.jsonl", result)
    (run_dir / "cells.csv").write_text(
        report.emit_cells_csv(result.cells, manifest), encoding="utf-8")
    (run_dir / "tests.csv").write_text(
        report.emit_tests_csv(result.test_rows, manifest), encoding="utf-8")
    tallies_path = run_dir / "tallies.json"
    tallies_path.write_text(json.dumps(result.tallies, indent=1, sort_keys=True) + "\n",
                            encoding="utf-8")
    print(f"audited {len(records)} samples: {result.tallies['n_ok']} analyzable, "
          f"m={result.m}; wrote cells.csv and tests.csv under {run_dir}")
    return EXIT_OK


def _read_cells(run_dir: Path):
    cells_path = run_dir / "cells.csv"
    if not cells_path.exists():
        raise CliError(f"cells.csv not found under {run_dir} (run audit first)", EXIT_IO)
    return parse_cells_csv(cells_path.read_text(encoding="utf-8"))


def parse_cells_csv(text: str):
    from .stats import BiasCell
    from fractions import Fraction
    cells = []
    for line in text.splitlines():
        if line.startswith("#") or line.startswith("model_id,") or not line.strip():
            continue
        (model_id, dataset_id, code_type, attribute, attr_kind,
         n_biased, n_total, _pct) = line.split(",")
        cells.append(BiasCell(
            model_id=model_id, dataset_id=dataset_id, code_type=code_type,
            attribute=attribute, attr_kind=attr_kind, n_biased=int(n_biased),
            n_total=int(n_total),
            cbs_percent=float(Fraction(int(n_biased), int(n_total)) * 100)))
    return cells


def cmd_compare(args) -> int:
    run_dir = Path(args.run)
    cells = _read_cells(run_dir)
    manifest = report.RunManifest.read(run_dir / "manifest.json")
    (run_dir / "comparison.csv").write_text(
        report.emit_comparison_csv(cells, manifest), encoding="utf-8")
    print(f"wrote {run_dir / 'comparison.csv'}")
    return EXIT_OK


def cmd_report(args) -> int:
    run_dir = Path(args.run)
    cells = _read_cells(run_dir)
    manifest = report.RunManifest.read(run_dir / "manifest.json")
    alpha = float(manifest.config.get("alpha", 0.001))
    epsilon = float(manifest.config.get("epsilon", 1e-6))
    from .stats import adjust, one_sample_prop_z
    test_rows = [(c, one_sample_prop_z(c.n_biased, c.n_total, p0=epsilon, alpha=alpha))
                 for c in cells if c.attr_kind == "sensitive"]
    test_rows = [(c, adjust(t, manifest.m or len(test_rows))) for c, t in test_rows]
    comparison_csv = report.emit_comparison_csv(cells, manifest)
    contrast_csv = report.emit_contrast_csv(cells, manifest)
    (run_dir / "comparison.csv").write_text(comparison_csv, encoding="utf-8")
    (run_dir / "contrast.csv").write_text(contrast_csv, encoding="utf-8")
    tallies = {}
    tallies_path = run_dir / "tallies.json"
    if tallies_path.exists():
        tallies = json.loads(tallies_path.read_text(encoding="utf-8"))
    detection_csv = None
    if (run_dir / "detection.csv").exists():
        detection_csv = (run_dir / "detection.csv").read_text(encoding="utf-8")
    md = report.emit_report_md(manifest, cells, test_rows, tallies,
                               comparison_csv=comparison_csv, contrast_csv=contrast_csv,
                               detection_csv=detection_csv)
    (run_dir / "report.md").write_text(md, encoding="utf-8")
    print(f"wrote comparison.csv, contrast.csv, report.md under {run_dir}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    seed = int(cfg["seed"])
    base = (load_dataset_spec(cfg["sweep_dataset"])
            if cfg["sweep_dataset"].endswith(".json")
            else load_builtin_spec(cfg["sweep_dataset"]))
    points = [int(n) for n in _csv_list(cfg["sweep"])]
    if not points:
        raise CliError("sweep list is empty")
    out = _out_dir(args)
    rows = []
    fixture_sha = "none"
    for n in points:
        spec_n = attribute_subset(base, n, seed)
        if cfg["irrelevant_in_sweep"] != "true":
            spec_n = corpus.DatasetSpec(
                id=spec_n.id, task_description=spec_n.task_description,
                prediction_target=spec_n.prediction_target,
                attributes=tuple(a for a in spec_n.attributes if a.kind != "irrelevant"))
        records, client, _ = _generate_records(
            [spec_n], cfg, args, max_tokens=int(cfg["sweep_max_tokens"]))
        fixture_sha = client.store.sha256() if client.store else "none"
        result = _audit_run(records, cfg, args)
        sens_cells = [c for c in result.cells if c.attr_kind == "sensitive"]
        from .stats import aggregate_means
        for row in aggregate_means(sens_cells, ("code_type",)):
            n_samples = sum(1 for e in result.audited
                            if e.analyzable and e.record.code_type == row["code_type"])
            rows.append({"n_nonsensitive": n, "code_type": row["code_type"],
                         "n_samples": n_samples, "mean_cbs": row["mean_cbs"]})
    manifest = report.RunManifest(
        run_id="", config=config_snapshot(cfg, command="sweep"),
        corpus_sha="sweep", fixture_sha=fixture_sha, m=0)
    manifest.run_id = manifest.hash
    manifest.write(out / "manifest.json")
    (out / "sweep.csv").write_text(report.emit_sweep_csv(rows, manifest), encoding="utf-8")
    print(f"wrote {out / 'sweep.csv'} with {len(rows)} rows over {len(points)} corpora")
    return EXIT_OK


def cmd_difficulty(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    specs = load_specs(cfg)
    out = _out_dir(args)
    # the difficulty protocol fixes the specific mitigation for all runs and
    # keeps a conditional baseline alongside the three pipeline tiers
    mitigation = MitigationStrategy(kind="specific")
    plan = [("default", "conditional"), ("easy", "ml_pipeline"),
            ("default", "ml_pipeline"), ("complex", "ml_pipeline")]
    rows = []
    fixture_sha = "none"
    for tier, code_type in plan:
        records, client, _ = _generate_records(
            specs, cfg, args, code_types=[code_type], mitigation=mitigation,
            difficulty=Difficulty(tier))
        fixture_sha = client.store.sha256() if client.store else "none"
        result = _audit_run(records, cfg, args)
        sens_cells = [c for c in result.cells if c.attr_kind == "sensitive"]
        from .stats import aggregate_means
        mean_rows = aggregate_means(sens_cells, ("code_type",)) if sens_cells else []
        mean_cbs = mean_rows[0]["mean_cbs"] if mean_rows else 0.0
        lengths = [len(e.record.code) for e in result.audited
                   if e.analyzable and e.record.code]
        rows.append({
            "tier": tier, "code_type": code_type,
            "n_samples": sum(1 for e in result.audited if e.analyzable),
            "mean_cbs": mean_cbs,
            "mean_code_chars": (sum(lengths) / len(lengths)) if lengths else 0.0,
        })
    manifest = report.RunManifest(
        run_id="", config=config_snapshot(cfg, command="difficulty"),
        corpus_sha="difficulty", fixture_sha=fixture_sha, m=0)
    manifest.run_id = manifest.hash
    manifest.write(out / "manifest.json")
    (out / "difficulty.csv").write_text(report.emit_difficulty_csv(rows, manifest),
                                        encoding="utf-8")
    print(f"wrote {out / 'difficulty.csv'}")
    return EXIT_OK


def cmd_detect(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    seed = int(cfg["seed"])
    specs = load_specs(cfg)
    out = _out_dir(args)

    biased_records, client, _ = _generate_records(specs, cfg, args)
    biased_result = _audit_run(biased_records, cfg, args)
    unbiased_specs = [sensitive_free(s) for s in specs]
    unbiased_records, _, _ = _generate_records(unbiased_specs, cfg, args)
    unbiased_result = _audit_run(unbiased_records, cfg, args)

    try:
        det_set, substitutions = build_detection_set(
            pipeline.detection_candidates(biased_result),
            pipeline.detection_candidates(unbiased_result),
            quota_per_pair=int(args.quota or cfg["quota_per_pair"]),
            seed=seed, relax=args.relax)
    except DetectionBuildError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    det_set.save(out / "detection_set.jsonl")

    judge_client = build_client(args, cfg["endpoint"])
    judge_config = GenerationConfig(model_id=cfg["detect_judge_model_id"],
                                    endpoint=cfg["endpoint"])
    strategies = [args.strategy] if args.strategy else _csv_list(cfg["strategies"])
    for strat in strategies:
        if strat not in STRATEGIES:
            raise CliError(f"unknown detection strategy: {strat}")
    outcomes = [run_detection(det_set, judge_client, strat, judge_config)
                for strat in strategies]
    manifest = report.RunManifest(
        run_id="", config=config_snapshot(cfg, command="detect"),
        corpus_sha="detect", fixture_sha=client.store.sha256() if client.store else "none",
        m=0)
    manifest.run_id = manifest.hash
    manifest.write(out / "manifest.json")
    (out / "detection.csv").write_text(
        report.emit_detection_csv(outcomes, manifest), encoding="utf-8")
    with (out / "detection_log.jsonl").open("w", encoding="utf-8") as fh:
        for outcome in outcomes:
            for entry in outcome.log:
                fh.write(json.dumps({"strategy": outcome.strategy, **entry},
                                    ensure_ascii=False) + "\n")
    if substitutions:
        (out / "detection_substitutions.log").write_text(
            "\n".join(substitutions) + "\n", encoding="utf-8")
    for outcome in outcomes:
        print(f"{outcome.strategy}: overall accuracy {outcome.accuracy_overall:.4f} "
              f"({outcome.n_unparseable} unparseable)")
    return EXIT_OK


def cmd_extract(args) -> int:
    snippets_path = Path(args.snippets)
    if not snippets_path.exists():
        print(f"error: snippets file not found: {snippets_path}", file=sys.stderr)
        return EXIT_IO
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    sink_config = (dataflow.SinkConfig.load(args.sink_config)
                   if args.sink_config else None)
    n = 0
    with snippets_path.open(encoding="utf-8") as fh, \
            out_path.open("w", encoding="utf-8") as out:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            rep = dataflow.analyze_code(
                row["code"], row["schema"],
                prediction_target=row.get("prediction_target"),
                sample_ref=row.get("ref", str(n)), sink_config=sink_config)
            out.write(json.dumps({
                "ref": rep.sample_ref,
                "parse_status": rep.parse_status,
                "influencing": sorted(rep.influencing),
                "evidence": {a: [{"line": e.line, "sink_kind": e.sink_kind,
                                  "low_confidence": e.low_confidence} for e in evs]
                             for a, evs in rep.evidence.items()},
                "warnings": rep.warnings,
            }, ensure_ascii=False) + "\n")
            n += 1
    print(f"analyzed {n} snippets into {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codebias",
                                     description="Bias audit harness for generated code")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", help="key = value run configuration file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--replay", help="replay fixture store (JSONL)")
        p.add_argument("--record", help="record fixture store (JSONL)")
        p.add_argument("--out", default="runs/run", help="output directory")
        p.add_argument("--extractor", choices=["static", "llm"], default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--count-failures-as-unbiased", action="store_true")

    p = sub.add_parser("generate", help="render corpus and collect completions")
    common(p)
    p.add_argument("--run-id", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("audit", help="extraction, CBS, and hypothesis tests")
    common(p)
    p.add_argument("--run", required=True, help="run directory with samples.jsonl")
    p.add_argument("--samples", default=None, help="samples.jsonl override")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("compare", help="pipeline vs conditional two-sample table")
    p.add_argument("--run", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="emit comparison, contrast and report.md")
    p.add_argument("--run", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="attribute-count sweep")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("difficulty", help="pipeline difficulty tiers")
    common(p)
    p.set_defaults(func=cmd_difficulty)

    p = sub.add_parser("detect", help="sensitive-usage detection protocol")
    common(p)
    p.add_argument("--strategy", choices=list(STRATEGIES), default=None)
    p.add_argument("--quota", type=int, default=None)
    p.add_argument("--relax", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("extract", help="static influence analysis over a snippet JSONL")
    p.add_argument("--snippets", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sink-config", default=None)
    p.set_defaults(func=cmd_extract)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except corpus.DatasetSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
