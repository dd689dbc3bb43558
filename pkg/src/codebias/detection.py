"""Sensitive-usage detection protocol: balanced set construction, three
prompting strategies, and accuracy scoring.

Biased items come from audited samples whose influence report contains at
least two sensitive attributes; unbiased items come from a pool generated
with sensitive attributes removed from the prompts. Sampling is quota-based
per (model, dataset) pair and seed-deterministic.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .modelclient import GenerationConfig, ModelClient, TransportError
from .seeding import SplitMix64, derive_seed

TEMPLATE_DIR = Path(__file__).parent / "data" / "templates"

STRATEGIES = ("specific", "specific_def", "specific_examples")

GOLD_BIASED = "biased"
GOLD_UNBIASED = "unbiased"


class DetectionBuildError(ValueError):
    """Quota unattainable; message lists the deficient pairs."""


@dataclass(frozen=True)
class DetectionItem:
    code: str
    code_type: str  # conditional | ml_pipeline
    gold: str       # biased | unbiased
    model_id: str
    dataset_id: str

    def to_json(self) -> dict:
        return {"code": self.code, "code_type": self.code_type, "gold": self.gold,
                "model_id": self.model_id, "dataset_id": self.dataset_id}

    @classmethod
    def from_json(cls, raw: dict) -> "DetectionItem":
        return cls(code=raw["code"], code_type=raw["code_type"], gold=raw["gold"],
                   model_id=raw["model_id"], dataset_id=raw["dataset_id"])


@dataclass
class DetectionSet:
    items: list[DetectionItem]

    def by_type(self, code_type: str, gold: Optional[str] = None) -> list[DetectionItem]:
        return [i for i in self.items if i.code_type == code_type
                and (gold is None or i.gold == gold)]

    def save(self, path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for item in self.items:
                fh.write(json.dumps(item.to_json(), ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path) -> "DetectionSet":
        items = []
        with Path(path).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    items.append(DetectionItem.from_json(json.loads(line)))
        return cls(items=items)


@dataclass(frozen=True)
class Candidate:
    """One audited sample eligible for the detection set."""
    code: str
    code_type: str
    model_id: str
    dataset_id: str
    n_sensitive_used: int


def _pick(pool: dict[tuple[str, str], list[Candidate]],
          pairs: Sequence[tuple[str, str]], code_type: str, gold: str,
          quota: int, seed: int, relax: bool,
          substitutions: list[str]) -> tuple[list[DetectionItem], list[str]]:
    chosen: list[DetectionItem] = []
    deficits: list[tuple[str, str, int]] = []
    leftovers: dict[str, list[Candidate]] = {}
    # first pass: fill each pair's quota from its own candidates
    for model_id, dataset_id in pairs:
        cands = pool.get((model_id, dataset_id), [])
        rng = SplitMix64(derive_seed(seed, "detect", gold, code_type, model_id, dataset_id))
        take = rng.sample(cands, min(quota, len(cands)))
        chosen.extend(DetectionItem(c.code, code_type, gold, c.model_id, c.dataset_id)
                      for c in take)
        taken_ids = set(map(id, take))
        leftovers.setdefault(model_id, []).extend(
            c for c in cands if id(c) not in taken_ids)
        if len(take) < quota:
            deficits.append((model_id, dataset_id, quota - len(take)))
    messages = [f"{m}/{d}/{code_type}/{gold}: short by {need}"
                for m, d, need in deficits]
    if not relax:
        return chosen, messages
    # second pass: fill deficits from the same model's other-dataset leftovers
    for model_id, dataset_id, need in deficits:
        fill_pool = leftovers.get(model_id, [])
        rng = SplitMix64(derive_seed(seed, "detect-relax", gold, code_type,
                                     model_id, dataset_id))
        fill = rng.sample(fill_pool, min(need, len(fill_pool)))
        for c in fill:
            substitutions.append(
                f"{model_id}/{dataset_id}/{code_type}/{gold} filled from {c.dataset_id}")
            chosen.append(DetectionItem(c.code, code_type, gold,
                                        c.model_id, c.dataset_id))
        fill_ids = set(map(id, fill))
        leftovers[model_id] = [c for c in fill_pool if id(c) not in fill_ids]
    return chosen, messages


def build_detection_set(biased_pool: Sequence[Candidate], unbiased_pool: Sequence[Candidate],
                        quota_per_pair: int = 20, seed: int = 0,
                        relax: bool = False) -> tuple[DetectionSet, list[str]]:
    """Build the balanced set: per (model, dataset) pair and code type,
    quota_per_pair biased snippets (>=2 sensitive attributes used) and
    quota_per_pair unbiased ones.

    Returns (set, substitution log). Raises DetectionBuildError listing
    deficient pairs when the quota is unattainable and relax is False.
    """
    biased_ok = [c for c in biased_pool if c.n_sensitive_used >= 2]
    items: list[DetectionItem] = []
    deficits: list[str] = []
    substitutions: list[str] = []
    all_candidates = list(biased_pool) + list(unbiased_pool)
    code_types = sorted({c.code_type for c in all_candidates})
    pairs = sorted({(c.model_id, c.dataset_id) for c in all_candidates})
    for code_type in code_types:
        for gold, source in ((GOLD_BIASED, biased_ok), (GOLD_UNBIASED, list(unbiased_pool))):
            pool: dict[tuple[str, str], list[Candidate]] = {}
            for c in source:
                if c.code_type == code_type:
                    pool.setdefault((c.model_id, c.dataset_id), []).append(c)
            got, missing = _pick(pool, pairs, code_type, gold, quota_per_pair, seed,
                                 relax, substitutions)
            items.extend(got)
            deficits.extend(missing)
    if deficits and not relax:
        raise DetectionBuildError(
            "detection quota unattainable for: " + "; ".join(deficits))
    for code_type in code_types:
        n_b = sum(1 for i in items if i.code_type == code_type and i.gold == GOLD_BIASED)
        n_u = sum(1 for i in items if i.code_type == code_type and i.gold == GOLD_UNBIASED)
        if n_b != n_u:
            # trim deterministically to keep the set balanced by construction
            keep = min(n_b, n_u)
            trimmed = []
            counts = {GOLD_BIASED: 0, GOLD_UNBIASED: 0}
            for item in items:
                if item.code_type == code_type:
                    if counts[item.gold] >= keep:
                        continue
                    counts[item.gold] += 1
                trimmed.append(item)
            items = trimmed
    return DetectionSet(items=items), substitutions


def render_detection_prompt(item: DetectionItem, strategy: str) -> str:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown detection strategy: {strategy}")
    template = (TEMPLATE_DIR / f"detect_{strategy}.txt").read_text(encoding="utf-8")
    return template.replace("{code}", item.code)


def parse_judgment(raw: str) -> Optional[str]:
    """YES/NO judgments: case-insensitive leading token after stripping
    punctuation; anything else is unparseable (None)."""
    token = raw.strip().split()[0] if raw.strip() else ""
    token = token.strip(string.punctuation + string.whitespace).upper()
    if token == "YES":
        return GOLD_BIASED
    if token == "NO":
        return GOLD_UNBIASED
    return None


@dataclass
class DetectionOutcome:
    strategy: str
    accuracy_by_type: dict[str, float]
    accuracy_overall: float
    n_items: int
    n_unparseable: int
    n_by_type: dict[str, int]
    n_correct_by_type: dict[str, int]
    log: list[dict]  # one entry per item: index, answer_raw, parsed, correct


def run_detection(det_set: DetectionSet, client: ModelClient, strategy: str,
                  judge_config: GenerationConfig) -> DetectionOutcome:
    """One binary judgment per item; unparseable answers count as incorrect
    and are logged, never dropped. Accuracy is reported per code type and
    overall; item order never affects the scores."""
    log: list[dict] = []
    correct_by_type: dict[str, int] = {}
    total_by_type: dict[str, int] = {}
    n_unparseable = 0
    for index, item in enumerate(det_set.items):
        prompt = render_detection_prompt(item, strategy)
        try:
            raw = client.complete(prompt, judge_config)
        except TransportError as exc:
            raw = f"<transport_error: {exc}>"
        parsed = parse_judgment(raw) if not raw.startswith("<transport_error") else None
        if parsed is None:
            n_unparseable += 1
        correct = parsed == item.gold
        total_by_type[item.code_type] = total_by_type.get(item.code_type, 0) + 1
        if correct:
            correct_by_type[item.code_type] = correct_by_type.get(item.code_type, 0) + 1
        log.append({"item_index": index, "answer_raw": raw, "parsed": parsed,
                    "correct": correct})
    accuracy_by_type = {ct: correct_by_type.get(ct, 0) / total
                        for ct, total in sorted(total_by_type.items())}
    n_total = len(det_set.items)
    n_correct = sum(1 for entry in log if entry["correct"])
    return DetectionOutcome(
        strategy=strategy,
        accuracy_by_type=accuracy_by_type,
        accuracy_overall=(n_correct / n_total) if n_total else 0.0,
        n_items=n_total,
        n_unparseable=n_unparseable,
        n_by_type=dict(sorted(total_by_type.items())),
        n_correct_by_type={ct: correct_by_type.get(ct, 0) for ct in sorted(total_by_type)},
        log=log,
    )
