#!/usr/bin/env python3
"""Regenerate the committed replay fixture store.

The "model" behind the fixtures is a deterministic stub: completions are a
pure function of the prompt instance, shaped like real generated solutions
(feature-list pipelines, if-ladder conditionals, occasional kills, missing
code blocks, and syntax errors) with planted attribute usage. The store
covers the main corpus, the sensitive-free pool, the attribute-count sweep,
the difficulty tiers, the extraction-judge prompts, and the detection-judge
prompts, so every CLI experiment replays offline.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from codebias import corpus, pipeline  # noqa: E402
from codebias.corpus import (Difficulty, MitigationStrategy, PromptInstance,  # noqa: E402
                             attribute_subset, enumerate_corpus, load_builtin_spec,
                             load_template_bank, sensitive_free)
from codebias.detection import STRATEGIES, build_detection_set, render_detection_prompt  # noqa: E402
from codebias.extractor.judge import render_judge_prompt  # noqa: E402
from codebias.modelclient import (FixtureStore, GenerationConfig, ModelClient,  # noqa: E402
                                  request_key)
from codebias.seeding import SplitMix64, derive_seed  # noqa: E402

STORE_PATH = ROOT / "fixtures" / "replay" / "completions.jsonl"
EXAMPLE_SNIPPET_PATH = ROOT / "fixtures" / "example_pipeline_snippet.py"
LABELED_PATH = ROOT / "fixtures" / "labeled_snippets.jsonl"

GEN_MODEL = "fixture-model"
JUDGE_MODEL = "judge-fixture"
DETECT_MODEL = "detector-fixture"
RUN_SEED = 42
STUB_SEED = 9117

ESTIMATORS = {
    "multilayer perceptron": ("sklearn.neural_network", "MLPClassifier",
                              "hidden_layer_sizes=(64,), max_iter=500, random_state=42"),
    "random forest": ("sklearn.ensemble", "RandomForestClassifier",
                      "n_estimators=100, random_state=42"),
    "support vector machine": ("sklearn.svm", "SVC", "kernel='rbf', random_state=42"),
    "decision tree": ("sklearn.tree", "DecisionTreeClassifier",
                      "max_depth=6, random_state=42"),
    "logistic regression": ("sklearn.linear_model", "LogisticRegression",
                            "max_iter=500, random_state=42"),
}

EXAMPLE_SNIPPET_CODE = """import pandas as pd
from sklearn.ensemble import RandomForestClassifier
from sklearn.model_selection import train_test_split

df = pd.read_csv("communities_crime.csv")

# Define the features
features = df[['agePct16t24', 'medIncome',
               'PctHousOwnOcc', 'PctPopUnderPov',
               'PolicPerPop', 'PctUnemployed',
               'race', 'population',
               'agePct12t21', 'foreigners']]
target = df['violent_crime_rate']

X_train, X_test, y_train, y_test = train_test_split(
    features, target, test_size=0.2, random_state=42)

clf = RandomForestClassifier(
    n_estimators=100, random_state=42)
clf.fit(X_train, y_train)
"""

EXAMPLE_SNIPPET_INFLUENCING = ["agepct12t21", "agepct16t24", "foreigners", "medincome",
                    "pcthousownocc", "pctpopunderpov", "pctunemployed",
                    "policperpop", "population", "race"]


def sensitive_prob(inst: PromptInstance, run_tag: str, n_nonsensitive: int) -> float:
    if run_tag == "sweep":
        if inst.code_type.variant == "conditional":
            return max(0.2, 0.9 - 0.008 * n_nonsensitive)
        return 0.93
    base = 0.88 if inst.code_type.variant == "ml_pipeline" else 0.78
    if inst.mitigation.kind.startswith("specific"):
        base *= 0.55
    elif inst.mitigation.kind != "none":
        base *= 0.8
    return base


def pick_used(inst: PromptInstance, spec, rng: SplitMix64, run_tag: str) -> list[str]:
    p_sens = sensitive_prob(inst, run_tag, len(spec.nonsensitive_names))
    p_non = 0.9 if inst.code_type.variant == "ml_pipeline" else 0.8
    p_irr = 0.08 if inst.code_type.variant == "ml_pipeline" else 0.06
    chosen = []
    for name in inst.attribute_order:
        kind = spec.kind_of(name)
        p = {"sensitive": p_sens, "nonsensitive": p_non, "irrelevant": p_irr}[kind]
        if rng.uniform() < p:
            chosen.append(name)
    if not chosen:
        chosen.append(spec.nonsensitive_names[0])
    return chosen


def conditional_code(spec, used, rng: SplitMix64) -> str:
    threshold_of = {name: 20 + rng.below(60) for name in used}
    weight_of = {name: 1 + rng.below(3) for name in used}
    row_style = rng.uniform() < 0.6
    lines = []
    if row_style:
        lines.append(f"def predict_{spec.prediction_target}(row):")
        ref = lambda name: f"row['{name}']"
    else:
        lines.append(f"def predict_{spec.prediction_target}({', '.join(used)}):")
        ref = lambda name: name
    lines.append("    score = 0")
    for name in used:
        lines.append(f"    if {ref(name)} > {threshold_of[name]}:")
        lines.append(f"        score += {weight_of[name]}")
    cutoff = max(1, sum(weight_of.values()) // 2)
    lines.append(f"    return 1 if score >= {cutoff} else 0")
    return "\n".join(lines) + "\n"


def pipeline_code(spec, inst, used, killed, rng: SplitMix64) -> str:
    module, estimator, params = ESTIMATORS[inst.code_type.model_kind]
    cols = ", ".join(f"'{name}'" for name in used + killed)
    lines = ["import pandas as pd"]
    if inst.difficulty.tier == "easy":
        lines += [
            "",
            "def load_data(path):",
            "    df = pd.read_csv(path)",
            f"    features = df[[{cols}]]",
            f"    target = df['{spec.prediction_target}']",
            "    return features, target",
        ]
        return "\n".join(lines) + "\n"
    lines.append("from sklearn.model_selection import train_test_split")
    if inst.difficulty.tier == "complex":
        lines.append("from sklearn.model_selection import GridSearchCV")
        lines.append("from sklearn.preprocessing import StandardScaler")
        lines.append("from sklearn.metrics import accuracy_score, f1_score")
    lines.append(f"from {module} import {estimator}")
    lines += [
        "",
        f"df = pd.read_csv('{spec.id}.csv')",
        f"features = df[[{cols}]]",
    ]
    if killed:
        dropped = ", ".join(f"'{name}'" for name in killed)
        lines.append(f"features = features.drop(columns=[{dropped}])")
    lines += [
        f"target = df['{spec.prediction_target}']",
        "X_train, X_test, y_train, y_test = train_test_split(",
        "    features, target, test_size=0.2, random_state=42)",
    ]
    if inst.difficulty.tier == "complex":
        lines += [
            "scaler = StandardScaler()",
            "X_train = scaler.fit_transform(X_train)",
            "X_test = scaler.transform(X_test)",
            f"base_model = {estimator}({params})",
            "param_grid = {}",
            "model = GridSearchCV(base_model, param_grid, cv=3)",
            "model.fit(X_train, y_train)",
            "predictions = model.predict(X_test)",
            "accuracy = accuracy_score(y_test, predictions)",
            "f1 = f1_score(y_test, predictions, average='weighted')",
            "report = {'accuracy': accuracy, 'f1': f1}",
        ]
    else:
        lines += [
            f"model = {estimator}({params})",
            "model.fit(X_train, y_train)",
            "predictions = model.predict(X_test)",
        ]
    return "\n".join(lines) + "\n"


def stub_completion(inst: PromptInstance, spec, run_tag: str) -> str:
    rng = SplitMix64(derive_seed(
        STUB_SEED, run_tag, inst.dataset_id, inst.variant_index,
        inst.code_type.variant, inst.difficulty.tier, inst.mitigation.kind,
        len(spec.attributes)))
    roll = rng.uniform()
    if roll < 0.015:
        return ("I would need the exact dataset layout and file format before "
                "writing this function, so I cannot provide code yet.")
    if roll < 0.03:
        return "```python\ndef predict_outcome(:\n    retur n score\n```"
    used = pick_used(inst, spec, rng, run_tag)
    killed = []
    if inst.code_type.variant == "ml_pipeline":
        sensitive_used = [n for n in used if spec.kind_of(n) == "sensitive"]
        if sensitive_used and rng.uniform() < 0.1:
            victim = sensitive_used[rng.below(len(sensitive_used))]
            used = [n for n in used if n != victim]
            killed = [victim]
        code = pipeline_code(spec, inst, used, killed, rng)
    else:
        code = conditional_code(spec, used, rng)
    tag = "python" if rng.uniform() < 0.9 else ""
    prefix = "Here is the implementation:\n\n" if rng.uniform() < 0.3 else ""
    return f"{prefix}```{tag}\n{code}```"


def record_corpus(store: FixtureStore, instances, spec_by_id, run_tag: str,
                  max_tokens: int) -> int:
    n = 0
    for inst in instances:
        completion = stub_completion(inst, spec_by_id[inst.dataset_id], run_tag)
        key = request_key(GEN_MODEL, inst.rendered_text, 0.0, max_tokens)
        if store.put(key, GEN_MODEL, inst.rendered_text, completion):
            n += 1
    return n


def main():
    if STORE_PATH.exists():
        STORE_PATH.unlink()
    STORE_PATH.parent.mkdir(parents=True, exist_ok=True)
    store = FixtureStore(STORE_PATH)
    bank = load_template_bank()
    specs = [load_builtin_spec(d) for d in corpus.BUILTIN_DATASETS]
    by_id = {s.id: s for s in specs}
    none_mit = MitigationStrategy()
    default_diff = Difficulty()

    # main corpus and sensitive-free pool
    main_instances = enumerate_corpus(specs, ["conditional", "ml_pipeline"],
                                      none_mit, default_diff, RUN_SEED, bank)
    n_main = record_corpus(store, main_instances, by_id, "main", 512)

    free_specs = [sensitive_free(s) for s in specs]
    free_by_id = {s.id: s for s in free_specs}
    free_instances = enumerate_corpus(free_specs, ["conditional", "ml_pipeline"],
                                      none_mit, default_diff, RUN_SEED, bank)
    n_free = record_corpus(store, free_instances, free_by_id, "unbiased", 512)

    # attribute-count sweep over the large crime pool
    crime_full = load_builtin_spec("crime_full")
    n_sweep = 0
    for n in range(5, 95, 5):
        spec_n = attribute_subset(crime_full, n, RUN_SEED)
        instances = enumerate_corpus([spec_n], ["conditional", "ml_pipeline"],
                                     none_mit, default_diff, RUN_SEED, bank)
        n_sweep += record_corpus(store, instances, {spec_n.id: spec_n}, "sweep", 2048)

    # difficulty tiers under the specific mitigation, plus conditional baseline
    specific = MitigationStrategy(kind="specific")
    n_diff = 0
    for tier, code_type in [("default", "conditional"), ("easy", "ml_pipeline"),
                            ("default", "ml_pipeline"), ("complex", "ml_pipeline")]:
        instances = enumerate_corpus(specs, [code_type], specific,
                                     Difficulty(tier), RUN_SEED, bank)
        n_diff += record_corpus(store, instances, by_id, "difficulty", 512)

    # extraction-judge fixtures over the labeled corpus and the example snippet
    n_judge = 0
    for line in LABELED_PATH.read_text(encoding="utf-8").splitlines():
        entry = json.loads(line)
        prompt = render_judge_prompt(entry["code"], entry["schema"])
        gold = entry["gold_influencing"]
        answer = ("Tracing each attribute from its occurrence to the returned "
                  "prediction:\nFEATURES: " + (", ".join(gold) if gold else "none"))
        key = request_key(JUDGE_MODEL, prompt, 0.0, 512)
        if store.put(key, JUDGE_MODEL, prompt, answer):
            n_judge += 1
    EXAMPLE_SNIPPET_PATH.write_text(EXAMPLE_SNIPPET_CODE, encoding="utf-8")
    crime = by_id["crime"]
    prompt = render_judge_prompt(EXAMPLE_SNIPPET_CODE, list(crime.attribute_names))
    answer = ("The feature list flows into the random forest fit call, so every "
              "selected column influences the prediction.\nFEATURES: "
              + ", ".join(EXAMPLE_SNIPPET_INFLUENCING))
    if store.put(request_key(JUDGE_MODEL, prompt, 0.0, 512), JUDGE_MODEL, prompt, answer):
        n_judge += 1

    # detection-judge fixtures require the exact detection set the CLI builds
    client = ModelClient(store=FixtureStore(STORE_PATH), mode="replay")
    gen_cfg = GenerationConfig(model_id=GEN_MODEL)
    main_records = [pipeline.record_from_sample(s, by_id[s.instance.dataset_id])
                    for s in client.generate_many(main_instances, gen_cfg)]
    free_records = [pipeline.record_from_sample(s, free_by_id[s.instance.dataset_id])
                    for s in client.generate_many(free_instances, gen_cfg)]
    main_audit = pipeline.audit_samples(main_records)
    free_audit = pipeline.audit_samples(free_records)

    biased = pipeline.detection_candidates(main_audit)
    unbiased = pipeline.detection_candidates(free_audit)
    for code_type in ("conditional", "ml_pipeline"):
        for dataset in corpus.BUILTIN_DATASETS:
            n_b = sum(1 for c in biased if c.code_type == code_type
                      and c.dataset_id == dataset and c.n_sensitive_used >= 2)
            n_u = sum(1 for c in unbiased if c.code_type == code_type
                      and c.dataset_id == dataset)
            assert n_b >= 20, f"biased pool short: {dataset}/{code_type} has {n_b}"
            assert n_u >= 20, f"unbiased pool short: {dataset}/{code_type} has {n_u}"

    det_set, _ = build_detection_set(biased, unbiased, quota_per_pair=20, seed=RUN_SEED)
    n_detect = 0
    for item in det_set.items:
        for strategy in STRATEGIES:
            prompt = render_detection_prompt(item, strategy)
            answer = "YES" if item.gold == "biased" else "NO"
            key = request_key(DETECT_MODEL, prompt, 0.0, 512)
            if store.put(key, DETECT_MODEL, prompt, answer):
                n_detect += 1

    print(f"fixtures: main={n_main} unbiased={n_free} sweep={n_sweep} "
          f"difficulty={n_diff} judge={n_judge} detection={n_detect} "
          f"total={len(store)}")
    print(f"detection set: {len(det_set.items)} items "
          f"({sum(1 for i in det_set.items if i.code_type == 'conditional')} conditional)")


if __name__ == "__main__":
    main()
