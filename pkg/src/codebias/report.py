"""Machine-readable report emission.

Every artifact is deterministic (stable sort keys, fixed decimal formatting:
one decimal for percentages, three significant digits for p-values) and
carries the run-manifest hash on its first line so any number is traceable to
exact inputs. No plotting dependencies: CSV plus markdown only.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .stats import (BiasCell, TestResult, aggregate_means, bonferroni,
                    two_sample_prop_z_one_sided)

P_DISPLAY_FLOOR = 1e-300


@dataclass
class RunManifest:
    run_id: str
    config: dict
    corpus_sha: str
    fixture_sha: str
    m: int
    tool_version: str = __version__

    @property
    def hash(self) -> str:
        payload = json.dumps({
            "config": self.config,
            "corpus_sha": self.corpus_sha,
            "fixture_sha": self.fixture_sha,
            "m": self.m,
            "tool_version": self.tool_version,
        }, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]

    def write(self, path) -> None:
        doc = {
            "run_id": self.run_id,
            "manifest_hash": self.hash,
            "config": self.config,
            "corpus_sha": self.corpus_sha,
            "fixture_sha": self.fixture_sha,
            "m": self.m,
            "tool_version": self.tool_version,
        }
        Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n",
                              encoding="utf-8")

    @classmethod
    def read(cls, path) -> "RunManifest":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(run_id=doc["run_id"], config=doc["config"],
                   corpus_sha=doc["corpus_sha"], fixture_sha=doc["fixture_sha"],
                   m=doc["m"], tool_version=doc["tool_version"])


def fmt_pct(x: float) -> str:
    return f"{x:.1f}"


def fmt_p(p: float) -> str:
    if p < P_DISPLAY_FLOOR:
        return "<1e-300"
    return f"{p:.2e}"


def fmt_z(z: float) -> str:
    return f"{z:.4f}"


def stars(p_adjusted: float) -> str:
    if p_adjusted < 0.001:
        return "***"
    if p_adjusted < 0.01:
        return "**"
    if p_adjusted < 0.05:
        return "*"
    return ""


def _header(manifest: RunManifest) -> str:
    return f"# manifest={manifest.hash} m={manifest.m}"


def _cell_sort_key(cell: BiasCell):
    return (cell.model_id, cell.dataset_id, cell.code_type, cell.attr_kind, cell.attribute)


def emit_cells_csv(cells: Sequence[BiasCell], manifest: RunManifest) -> str:
    if not cells:
        raise ValueError("emit_cells_csv requires a nonempty cell set")
    lines = [_header(manifest),
             "model_id,dataset_id,code_type,attribute,attr_kind,n_biased,n_total,cbs_percent"]
    for c in sorted(cells, key=_cell_sort_key):
        lines.append(f"{c.model_id},{c.dataset_id},{c.code_type},{c.attribute},"
                     f"{c.attr_kind},{c.n_biased},{c.n_total},{fmt_pct(c.cbs_percent)}")
    return "\n".join(lines) + "\n"


def emit_tests_csv(test_rows: Sequence[tuple[BiasCell, TestResult]],
                   manifest: RunManifest) -> str:
    if not test_rows:
        raise ValueError("emit_tests_csv requires a nonempty test set")
    lines = [_header(manifest),
             "model_id,dataset_id,code_type,attribute,kind,z,p_raw,p_adjusted,alpha,"
             "significant,stars"]
    for cell, t in sorted(test_rows, key=lambda pair: _cell_sort_key(pair[0])):
        lines.append(f"{cell.model_id},{cell.dataset_id},{cell.code_type},{cell.attribute},"
                     f"{t.kind},{fmt_z(t.z)},{fmt_p(t.p_raw)},{fmt_p(t.p_adjusted)},"
                     f"{t.alpha},{str(t.significant).lower()},{stars(t.p_adjusted)}")
    return "\n".join(lines) + "\n"


def pair_code_types(cells: Sequence[BiasCell]) -> list[tuple[BiasCell, BiasCell]]:
    """(conditional, ml_pipeline) cell pairs over sensitive (model, dataset,
    attribute) combinations present in both code types."""
    index: dict[tuple, dict[str, BiasCell]] = {}
    for c in cells:
        if c.attr_kind != "sensitive":
            continue
        index.setdefault((c.model_id, c.dataset_id, c.attribute), {})[c.code_type] = c
    pairs = []
    for key in sorted(index):
        both = index[key]
        if "conditional" in both and "ml_pipeline" in both:
            pairs.append((both["conditional"], both["ml_pipeline"]))
    return pairs


def emit_comparison_csv(cells: Sequence[BiasCell], manifest: RunManifest,
                        alphas: tuple[float, float] = (0.001, 0.05)) -> str:
    """Pipeline-vs-conditional deltas with one-sided two-sample significance.

    Header comments carry the summary tallies: how many combinations show
    higher pipeline bias and how many are significant at each alpha (adjusted
    over the comparison family).
    """
    pairs = pair_code_types(cells)
    if not pairs:
        raise ValueError("emit_comparison_csv: no (conditional, ml_pipeline) pairs")
    tests = [two_sample_prop_z_one_sided(p.n_biased, p.n_total, c.n_biased, c.n_total)
             for c, p in pairs]
    adjusted = bonferroni([t.p_raw for t in tests], len(tests))
    n_higher = sum(1 for c, p in pairs if p.cbs_percent > c.cbs_percent)
    sig_strict = sum(1 for p_adj in adjusted if p_adj < alphas[0])
    sig_loose = sum(1 for p_adj in adjusted if p_adj < alphas[1])
    lines = [
        _header(manifest),
        f"# combinations={len(pairs)} pipeline_higher={n_higher} "
        f"significant_at_{alphas[0]}={sig_strict} significant_at_{alphas[1]}={sig_loose}",
        "model_id,dataset_id,attribute,cbs_conditional,cbs_pipeline,delta,z,p_raw,"
        f"p_adjusted,sig_at_{alphas[0]},sig_at_{alphas[1]},degenerate",
    ]
    for (cond, pipe), t, p_adj in zip(pairs, tests, adjusted):
        delta = pipe.cbs_percent - cond.cbs_percent
        lines.append(
            f"{cond.model_id},{cond.dataset_id},{cond.attribute},"
            f"{fmt_pct(cond.cbs_percent)},{fmt_pct(pipe.cbs_percent)},{fmt_pct(delta)},"
            f"{fmt_z(t.z)},{fmt_p(t.p_raw)},{fmt_p(p_adj)},"
            f"{str(p_adj < alphas[0]).lower()},{str(p_adj < alphas[1]).lower()},"
            f"{str(t.degenerate).lower()}")
    return "\n".join(lines) + "\n"


def emit_contrast_csv(cells: Sequence[BiasCell], manifest: RunManifest) -> str:
    """Per-model mean sensitive usage minus mean irrelevant usage."""
    sens = [c for c in cells if c.attr_kind == "sensitive"]
    irr = [c for c in cells if c.attr_kind == "irrelevant"]
    if not irr:
        raise ValueError("emit_contrast_csv requires irrelevant-attribute cells")
    sens_means = {row["model_id"]: row["mean_cbs"]
                  for row in aggregate_means(sens, ("model_id",))}
    irr_means = {row["model_id"]: row["mean_cbs"]
                 for row in aggregate_means(irr, ("model_id",))}
    lines = [_header(manifest), "model_id,mean_sensitive,mean_irrelevant,delta"]
    for model_id in sorted(set(sens_means) | set(irr_means)):
        s = sens_means.get(model_id, 0.0)
        i = irr_means.get(model_id, 0.0)
        lines.append(f"{model_id},{fmt_pct(s)},{fmt_pct(i)},{fmt_pct(s - i)}")
    return "\n".join(lines) + "\n"


def emit_detection_csv(outcomes: Sequence, manifest: RunManifest) -> str:
    lines = [_header(manifest), "strategy,code_type,n_items,n_correct,accuracy"]
    for out in outcomes:
        for ct, acc in sorted(out.accuracy_by_type.items()):
            lines.append(f"{out.strategy},{ct},{out.n_by_type[ct]},"
                         f"{out.n_correct_by_type[ct]},{acc:.4f}")
        n_correct = sum(out.n_correct_by_type.values())
        lines.append(f"{out.strategy},overall,{out.n_items},{n_correct},"
                     f"{out.accuracy_overall:.4f}")
    return "\n".join(lines) + "\n"


def emit_sweep_csv(rows: Sequence[dict], manifest: RunManifest) -> str:
    lines = [_header(manifest), "n_nonsensitive,code_type,n_samples,mean_cbs"]
    for row in sorted(rows, key=lambda r: (r["n_nonsensitive"], r["code_type"])):
        lines.append(f"{row['n_nonsensitive']},{row['code_type']},{row['n_samples']},"
                     f"{fmt_pct(row['mean_cbs'])}")
    return "\n".join(lines) + "\n"


def emit_difficulty_csv(rows: Sequence[dict], manifest: RunManifest) -> str:
    lines = [_header(manifest), "tier,code_type,n_samples,mean_cbs,mean_code_chars"]
    for row in rows:
        lines.append(f"{row['tier']},{row['code_type']},{row['n_samples']},"
                     f"{fmt_pct(row['mean_cbs'])},{row['mean_code_chars']:.1f}")
    return "\n".join(lines) + "\n"


def _markdown_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    out = ["| " + " | ".join(headers) + " |",
           "| " + " | ".join("---" for _ in headers) + " |"]
    for row in rows:
        out.append("| " + " | ".join(str(v) for v in row) + " |")
    return "\n".join(out)


def emit_bias_panels(cells: Sequence[BiasCell],
                     test_rows: Sequence[tuple[BiasCell, TestResult]],
                     manifest: RunManifest) -> tuple[str, str]:
    """(csv, markdown) panels: one row per (model, dataset, attribute,
    code_type) with CBS and significance; group means match aggregate_means.
    A missing code type produces a warning banner instead of an error."""
    if not cells:
        raise ValueError("emit_bias_panels requires a nonempty cell set")
    csv_text = emit_cells_csv(cells, manifest)
    tests_by_key = {(c.model_id, c.dataset_id, c.code_type, c.attribute): t
                    for c, t in test_rows}
    present_types = {c.code_type for c in cells}
    md = [f"## Per-attribute bias panels", ""]
    missing = {"conditional", "ml_pipeline"} - present_types
    if missing:
        md.append(f"**Warning: partial report; missing code type(s): {sorted(missing)}**")
        md.append("")
    rows = []
    for c in sorted((c for c in cells if c.attr_kind == "sensitive"), key=_cell_sort_key):
        t = tests_by_key.get((c.model_id, c.dataset_id, c.code_type, c.attribute))
        rows.append([c.model_id, c.dataset_id, c.code_type, c.attribute,
                     fmt_pct(c.cbs_percent),
                     fmt_p(t.p_raw) if t else "",
                     fmt_p(t.p_adjusted) if t else "",
                     stars(t.p_adjusted) if t else ""])
    md.append(_markdown_table(
        ["model", "dataset", "code type", "attribute", "CBS %", "p raw", "p adj", "sig"],
        rows))
    md.append("")
    means = aggregate_means([c for c in cells if c.attr_kind == "sensitive"], ("code_type",))
    md.append("Mean sensitive-attribute CBS by code type: " + ", ".join(
        f"{row['code_type']} {fmt_pct(row['mean_cbs'])}%" for row in means))
    return csv_text, "\n".join(md) + "\n"


def emit_report_md(manifest: RunManifest, cells: Sequence[BiasCell],
                   test_rows: Sequence[tuple[BiasCell, TestResult]],
                   tallies: dict, comparison_csv: Optional[str] = None,
                   contrast_csv: Optional[str] = None,
                   detection_csv: Optional[str] = None) -> str:
    _, panels_md = emit_bias_panels(cells, test_rows, manifest)
    md = [
        "# Bias audit report",
        "",
        f"- manifest: `{manifest.hash}` (run `{manifest.run_id}`)",
        f"- Bonferroni comparisons m = {manifest.m}",
        f"- samples: {tallies.get('n_records', 0)} total; "
        f"{tallies.get('n_ok', 0)} analyzable, "
        f"{tallies.get('n_no_code_block', 0)} without code block, "
        f"{tallies.get('n_transport_error', 0)} transport failures, "
        f"{tallies.get('n_unparseable', 0)} unparseable",
        f"- denominator policy: {tallies.get('denominator_policy', 'exclude-failures')} "
        f"(N per cell counts {'all samples' if tallies.get('count_failures_as_unbiased') else 'analyzable samples only'})",
        "",
        panels_md,
    ]
    if comparison_csv:
        summary = comparison_csv.splitlines()[1]
        md += ["## Code-type comparison", "", f"`{summary.lstrip('# ')}`", ""]
    if contrast_csv:
        md += ["## Sensitive vs irrelevant usage", ""]
        body = [line.split(",") for line in contrast_csv.splitlines()[2:]]
        md.append(_markdown_table(["model", "mean sensitive %", "mean irrelevant %", "delta"],
                                  body))
        md.append("")
    if detection_csv:
        md += ["## Detection accuracy", ""]
        body = [line.split(",") for line in detection_csv.splitlines()[2:]]
        md.append(_markdown_table(["strategy", "code type", "n", "correct", "accuracy"], body))
        md.append("")
    return "\n".join(md)
