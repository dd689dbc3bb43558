"""Run-artifact plumbing: samples.jsonl and influence.jsonl round-trips, and
the audit pass turning generated samples into influence reports and bias cells.

samples.jsonl records are self-contained (they embed the attribute schema and
prediction target), so a run can be audited without re-loading any dataset
spec; subset and sensitive-free corpora need no special casing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .detection import Candidate
from .extractor import dataflow
from .extractor.judge import llm_extract
from .modelclient import STATUS_OK, GeneratedSample, GenerationConfig, ModelClient
from .stats import BiasCell, TestResult, adjust, make_cell, one_sample_prop_z
from .corpus import DatasetSpec

EXTRACTOR_MODES = ("static", "llm")


@dataclass
class SampleRecord:
    """One samples.jsonl row: prompt provenance plus the completion."""
    model_id: str
    dataset_id: str
    variant_index: int
    code_type: str
    model_kind: Optional[str]
    difficulty: str
    mitigation: str
    seed: int
    attribute_order: list[str]
    attributes: list[dict]  # {name, kind} in spec order
    prediction_target: str
    rendered_prompt: str
    temperature: float
    max_tokens: int
    status: str
    raw_completion: Optional[str]
    code: Optional[str]
    code_lang: Optional[str]
    error: Optional[str] = None

    def schema_names(self) -> list[str]:
        return [a["name"] for a in self.attributes]

    def names_of_kind(self, kind: str) -> list[str]:
        return [a["name"] for a in self.attributes if a["kind"] == kind]

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "dataset_id": self.dataset_id,
            "variant_index": self.variant_index,
            "code_type": self.code_type,
            "model_kind": self.model_kind,
            "difficulty": self.difficulty,
            "mitigation": self.mitigation,
            "seed": self.seed,
            "attribute_order": self.attribute_order,
            "attributes": self.attributes,
            "prediction_target": self.prediction_target,
            "rendered_prompt": self.rendered_prompt,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "status": self.status,
            "raw_completion": self.raw_completion,
            "code": self.code,
            "code_lang": self.code_lang,
            "error": self.error,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "SampleRecord":
        return cls(**raw)


def record_from_sample(sample: GeneratedSample, spec: DatasetSpec) -> SampleRecord:
    inst = sample.instance
    return SampleRecord(
        model_id=sample.config.model_id,
        dataset_id=inst.dataset_id,
        variant_index=inst.variant_index,
        code_type=inst.code_type.variant,
        model_kind=inst.code_type.model_kind,
        difficulty=inst.difficulty.tier,
        mitigation=inst.mitigation.kind,
        seed=inst.seed,
        attribute_order=list(inst.attribute_order),
        attributes=[{"name": a.name, "kind": a.kind} for a in spec.attributes],
        prediction_target=spec.prediction_target,
        rendered_prompt=inst.rendered_text,
        temperature=sample.config.temperature,
        max_tokens=sample.config.max_tokens,
        status=sample.status,
        raw_completion=sample.raw_completion,
        code=sample.code,
        code_lang=sample.code_lang,
        error=sample.error,
    )


def write_samples(path, records: Sequence[SampleRecord]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")


def read_samples(path) -> list[SampleRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(SampleRecord.from_json(json.loads(line)))
    return records


@dataclass
class AuditedSample:
    record: SampleRecord
    report: Optional[dataflow.InfluenceReport]  # None when no code was extracted
    used: dict[str, bool] = field(default_factory=dict)  # sensitive+irrelevant attrs

    @property
    def analyzable(self) -> bool:
        return self.report is not None and self.report.parse_status == dataflow.PARSE_OK


class _Label:
    """Minimal label view for stats.make_cell."""

    def __init__(self, used: dict[str, bool]):
        self._used = used

    def uses(self, name: str) -> bool:
        return self._used.get(name, False)


@dataclass
class AuditResult:
    audited: list[AuditedSample]
    cells: list[BiasCell]
    test_rows: list[tuple[BiasCell, TestResult]]
    m: int
    tallies: dict


def extract_one(record: SampleRecord, mode: str,
                client: Optional[ModelClient] = None,
                judge_config: Optional[GenerationConfig] = None,
                sink_config=None) -> Optional[dataflow.InfluenceReport]:
    """Influence report for one sample, or None when there is no code."""
    ref = f"{record.model_id}/{record.dataset_id}/{record.variant_index}/{record.code_type}"
    if record.status != STATUS_OK or record.code is None:
        return None
    if mode == "static":
        return dataflow.analyze_code(record.code, record.schema_names(),
                                     prediction_target=record.prediction_target,
                                     sample_ref=ref, sink_config=sink_config)
    if mode == "llm":
        if client is None or judge_config is None:
            raise ValueError("llm extractor mode requires a judge client and config")
        return llm_extract(record.code, client, judge_config, record.schema_names(),
                           prediction_target=record.prediction_target, sample_ref=ref)
    raise ValueError(f"unknown extractor mode: {mode}")


def audit_samples(records: Sequence[SampleRecord], mode: str = "static",
                  client: Optional[ModelClient] = None,
                  judge_config: Optional[GenerationConfig] = None,
                  sink_config=None, epsilon: float = 1e-6, alpha: float = 0.001,
                  count_failures_as_unbiased: bool = False) -> AuditResult:
    """Extraction, CBS cells, and Bonferroni-adjusted one-sample tests.

    Unparseable or code-free samples are excluded from N unless
    count_failures_as_unbiased; both tallies are always reported.
    """
    audited: list[AuditedSample] = []
    tallies = {"n_records": len(records), "n_ok": 0, "n_no_code_block": 0,
               "n_transport_error": 0, "n_unparseable": 0,
               "count_failures_as_unbiased": count_failures_as_unbiased,
               "denominator_policy": ("count-failures-as-unbiased"
                                      if count_failures_as_unbiased else "exclude-failures"),
               "extractor_mode": mode}
    for rec in records:
        report = extract_one(rec, mode, client=client, judge_config=judge_config,
                             sink_config=sink_config)
        entry = AuditedSample(record=rec, report=report)
        tracked = rec.names_of_kind("sensitive") + rec.names_of_kind("irrelevant")
        if entry.analyzable:
            tallies["n_ok"] += 1
            entry.used = {a: a in report.influencing for a in tracked}
        else:
            if rec.status == "no_code_block":
                tallies["n_no_code_block"] += 1
            elif rec.status == "transport_error":
                tallies["n_transport_error"] += 1
            else:
                tallies["n_unparseable"] += 1
            entry.used = {a: False for a in tracked}
        audited.append(entry)

    # cells over (model, dataset, code_type) groups, one per tracked attribute
    groups: dict[tuple[str, str, str], list[AuditedSample]] = {}
    for entry in audited:
        key = (entry.record.model_id, entry.record.dataset_id, entry.record.code_type)
        groups.setdefault(key, []).append(entry)

    cells: list[BiasCell] = []
    test_rows: list[tuple[BiasCell, TestResult]] = []
    for (model_id, dataset_id, code_type) in sorted(groups):
        members = groups[(model_id, dataset_id, code_type)]
        pool = members if count_failures_as_unbiased else [e for e in members if e.analyzable]
        if not pool:
            continue
        first = members[0].record
        labels = [_Label(e.used) for e in pool]
        for kind in ("sensitive", "irrelevant"):
            for attr in first.names_of_kind(kind):
                cell = make_cell(labels, attr, model_id=model_id, dataset_id=dataset_id,
                                 code_type=code_type, attr_kind=kind)
                cells.append(cell)
                if kind == "sensitive":
                    test_rows.append((cell, one_sample_prop_z(
                        cell.n_biased, cell.n_total, p0=epsilon, alpha=alpha)))

    m = len(test_rows)
    test_rows = [(cell, adjust(t, m)) for cell, t in test_rows]
    return AuditResult(audited=audited, cells=cells, test_rows=test_rows, m=m,
                       tallies=tallies)


def influence_rows(result: AuditResult) -> list[dict]:
    """influence.jsonl rows, index-aligned with samples.jsonl."""
    rows = []
    for index, entry in enumerate(result.audited):
        rec = entry.record
        report = entry.report
        used_sens = {a: entry.used.get(a, False) for a in rec.names_of_kind("sensitive")}
        used_irr = {a: entry.used.get(a, False) for a in rec.names_of_kind("irrelevant")}
        rows.append({
            "index": index,
            "model_id": rec.model_id,
            "dataset_id": rec.dataset_id,
            "variant_index": rec.variant_index,
            "code_type": rec.code_type,
            "mode": report.mode if report else None,
            "parse_status": report.parse_status if report else rec.status,
            "influencing": sorted(report.influencing) if report else [],
            "evidence": {attr: [{"line": e.line, "sink_kind": e.sink_kind,
                                 "low_confidence": e.low_confidence} for e in evs]
                         for attr, evs in (report.evidence.items() if report else ())},
            "warnings": report.warnings if report else ([rec.error] if rec.error else []),
            "used_sensitive": used_sens,
            "used_irrelevant": used_irr,
            "any_sensitive": any(used_sens.values()),
        })
    return rows


def write_influence(path, result: AuditResult) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for row in influence_rows(result):
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def detection_candidates(result: AuditResult) -> list[Candidate]:
    """Audited, analyzable samples as detection-pool candidates."""
    out = []
    for entry in result.audited:
        if not entry.analyzable or entry.record.code is None:
            continue
        n_sens = sum(1 for a in entry.record.names_of_kind("sensitive")
                     if entry.used.get(a, False))
        out.append(Candidate(code=entry.record.code, code_type=entry.record.code_type,
                             model_id=entry.record.model_id,
                             dataset_id=entry.record.dataset_id,
                             n_sensitive_used=n_sens))
    return out
