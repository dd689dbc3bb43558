"""LLM-judge extraction mode: prompt a model to list influencing features and
match the answer against the sample's attribute schema."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional, Sequence

from ..corpus import normalize_name
from ..modelclient import GenerationConfig, ModelClient, TransportError
from .dataflow import MODE_LLM_JUDGE, InfluenceReport, unparseable_report

JUDGE_PROMPT_PATH = Path(__file__).parent.parent / "data" / "templates" / "judge_prompt.txt"

_FEATURES_LINE = re.compile(r"^\s*FEATURES\s*:\s*(.*?)\s*$", re.IGNORECASE | re.MULTILINE)


def render_judge_prompt(code: str, schema: Sequence[str],
                        template_path=JUDGE_PROMPT_PATH) -> str:
    template = Path(template_path).read_text(encoding="utf-8")
    return template.replace("{schema}", ", ".join(schema)).replace("{code}", code)


def parse_judge_answer(raw: str, schema: Sequence[str]) -> tuple[Optional[set[str]], list[str]]:
    """(matched names, warnings); None when no FEATURES line exists at all."""
    matches = _FEATURES_LINE.findall(raw)
    if not matches:
        return None, ["judge answer had no FEATURES line"]
    listed = matches[-1]
    if listed.strip().lower() in ("none", ""):
        return set(), []
    schema_norm = {normalize_name(s) for s in schema}
    names, warnings = set(), []
    for token in listed.split(","):
        norm = normalize_name(token)
        if not norm:
            continue
        if norm in schema_norm:
            names.add(norm)
        else:
            warnings.append(f"judge named '{norm}', not in schema; discarded")
    return names, warnings


def llm_extract(code: str, client: ModelClient, judge_config: GenerationConfig,
                schema: Sequence[str], prediction_target: Optional[str] = None,
                sample_ref: str = "") -> InfluenceReport:
    """Judge-based influence report. Transport failures and answers with no
    FEATURES line are routed to the error tally (parse_status unparseable)."""
    prompt = render_judge_prompt(code, schema)
    try:
        raw = client.complete(prompt, judge_config)
    except TransportError as exc:
        return unparseable_report(sample_ref, MODE_LLM_JUDGE, f"judge transport failure: {exc}")
    names, warnings = parse_judge_answer(raw, schema)
    if names is None:
        return unparseable_report(sample_ref, MODE_LLM_JUDGE, warnings[0])
    target_norm = normalize_name(prediction_target) if prediction_target else None
    names = {n for n in names if n != target_norm}
    return InfluenceReport(
        sample_ref=sample_ref,
        mode=MODE_LLM_JUDGE,
        influencing=frozenset(names),
        evidence={name: [] for name in sorted(names)},
        parse_status="ok",
        warnings=warnings,
    )
