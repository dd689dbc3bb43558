import pytest

from codebias.detection import (Candidate, DetectionBuildError, DetectionSet,
                                GOLD_BIASED, GOLD_UNBIASED, build_detection_set,
                                parse_judgment, render_detection_prompt,
                                run_detection)
from codebias.modelclient import GenerationConfig

JUDGE_CONFIG = GenerationConfig(model_id="stub-judge")


def make_pool(code_type, n_per_pair, pairs, sensitive_count=2, tag="b"):
    out = []
    for model_id, dataset_id in pairs:
        for i in range(n_per_pair):
            out.append(Candidate(
                code=f"# {tag} {model_id} {dataset_id} {code_type} {i}",
                code_type=code_type, model_id=model_id, dataset_id=dataset_id,
                n_sensitive_used=sensitive_count))
    return out


PAIRS = [("m", "d1"), ("m", "d2")]


def pools(biased_sens=2, n=8):
    biased = (make_pool("conditional", n, PAIRS, biased_sens) +
              make_pool("ml_pipeline", n, PAIRS, biased_sens))
    unbiased = (make_pool("conditional", n, PAIRS, 0, tag="u") +
                make_pool("ml_pipeline", n, PAIRS, 0, tag="u"))
    return biased, unbiased


def test_build_balanced_and_quota():
    biased, unbiased = pools()
    det, subs = build_detection_set(biased, unbiased, quota_per_pair=5, seed=1)
    for ct in ("conditional", "ml_pipeline"):
        assert len(det.by_type(ct, GOLD_BIASED)) == 10  # 2 pairs x 5
        assert len(det.by_type(ct, GOLD_UNBIASED)) == 10
    assert not subs


def test_build_filters_single_sensitive_snippets():
    biased, unbiased = pools(biased_sens=1)
    with pytest.raises(DetectionBuildError, match="d1"):
        build_detection_set(biased, unbiased, quota_per_pair=5, seed=1)


def test_build_error_lists_deficient_pairs():
    biased, unbiased = pools()
    with pytest.raises(DetectionBuildError) as err:
        build_detection_set(biased, unbiased, quota_per_pair=50, seed=1)
    assert "m/d1" in str(err.value) and "m/d2" in str(err.value)


def test_build_relax_fills_and_logs():
    biased, unbiased = pools(n=8)
    # d1 has only 4 eligible biased conditionals; relax fills from d2 leftovers
    biased = [c for c in biased
              if not (c.dataset_id == "d1" and c.code_type == "conditional")]
    biased += make_pool("conditional", 4, [("m", "d1")])
    det, subs = build_detection_set(biased, unbiased, quota_per_pair=5, seed=1,
                                    relax=True)
    assert subs, "substitutions must be logged"
    assert len(det.by_type("conditional", GOLD_BIASED)) == 10


def test_build_deterministic():
    biased, unbiased = pools()
    a, _ = build_detection_set(biased, unbiased, quota_per_pair=5, seed=9)
    b, _ = build_detection_set(biased, unbiased, quota_per_pair=5, seed=9)
    c, _ = build_detection_set(biased, unbiased, quota_per_pair=5, seed=10)
    assert a.items == b.items
    assert a.items != c.items


def test_detection_set_roundtrip(tmp_path):
    biased, unbiased = pools()
    det, _ = build_detection_set(biased, unbiased, quota_per_pair=3, seed=2)
    path = tmp_path / "set.jsonl"
    det.save(path)
    assert DetectionSet.load(path).items == det.items


# -- judgment parsing -----------------------------------------------------------

@pytest.mark.parametrize("raw,expected", [
    ("YES", GOLD_BIASED),
    ("no", GOLD_UNBIASED),
    (" Yes, it does.", GOLD_BIASED),
    ("NO.", GOLD_UNBIASED),
    ("maybe", None),
    ("", None),
    ("The answer is yes", None),  # leading token only
])
def test_parse_judgment(raw, expected):
    assert parse_judgment(raw) == expected


def test_render_prompt_strategies_differ():
    item = next(iter(pools()[0]))
    base = render_detection_prompt(item, "specific")
    with_def = render_detection_prompt(item, "specific_def")
    with_ex = render_detection_prompt(item, "specific_examples")
    assert item.code in base
    assert "legally protected status" not in base
    assert "legally protected status" in with_def
    assert "'race', 'age', and 'sex'" not in with_def
    assert "'race', 'age', and 'sex'" in with_ex
    with pytest.raises(ValueError):
        render_detection_prompt(item, "zero_shot")


# -- scoring ----------------------------------------------------------------------

class MappedJudge:
    def __init__(self, mapping, fallback="YES"):
        self.mapping = mapping
        self.fallback = fallback

    def complete(self, prompt, config):
        return self.mapping.get(prompt, self.fallback)


def judge_for(det, strategy, answer_of):
    return MappedJudge({render_detection_prompt(item, strategy): answer_of(item)
                        for item in det.items})


def test_gold_stub_scores_one():
    biased, unbiased = pools()
    det, _ = build_detection_set(biased, unbiased, quota_per_pair=4, seed=3)
    judge = judge_for(det, "specific",
                      lambda item: "YES" if item.gold == GOLD_BIASED else "NO")
    outcome = run_detection(det, judge, "specific", JUDGE_CONFIG)
    assert outcome.accuracy_overall == 1.0
    assert outcome.accuracy_by_type == {"conditional": 1.0, "ml_pipeline": 1.0}


def test_inverted_stub_scores_zero():
    biased, unbiased = pools()
    det, _ = build_detection_set(biased, unbiased, quota_per_pair=4, seed=3)
    judge = judge_for(det, "specific",
                      lambda item: "NO" if item.gold == GOLD_BIASED else "YES")
    outcome = run_detection(det, judge, "specific", JUDGE_CONFIG)
    assert outcome.accuracy_overall == 0.0


def test_unparseable_counts_incorrect_and_is_logged():
    biased, unbiased = pools()
    det, _ = build_detection_set(biased, unbiased, quota_per_pair=2, seed=4)
    judge = MappedJudge({}, fallback="cannot say")
    outcome = run_detection(det, judge, "specific", JUDGE_CONFIG)
    assert outcome.accuracy_overall == 0.0
    assert outcome.n_unparseable == outcome.n_items
    assert len(outcome.log) == outcome.n_items
    assert all(entry["parsed"] is None and not entry["correct"]
               for entry in outcome.log)


def test_accuracy_invariant_to_item_order():
    biased, unbiased = pools()
    det, _ = build_detection_set(biased, unbiased, quota_per_pair=4, seed=5)
    judge = judge_for(det, "specific",
                      lambda item: "YES" if item.gold == GOLD_BIASED else "NO")
    forward = run_detection(det, judge, "specific", JUDGE_CONFIG)
    reversed_set = DetectionSet(items=list(reversed(det.items)))
    backward = run_detection(reversed_set, judge, "specific", JUDGE_CONFIG)
    assert forward.accuracy_overall == backward.accuracy_overall
    assert forward.accuracy_by_type == backward.accuracy_by_type
