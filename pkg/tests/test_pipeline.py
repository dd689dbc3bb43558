import json

from codebias import pipeline
from codebias.corpus import (Difficulty, MitigationStrategy, build_instance,
                             load_builtin_spec, load_template_bank)
from codebias.modelclient import GeneratedSample, GenerationConfig


def make_record(code="def predict(row):\n    return row['age'] * 2\n",
                status="ok", dataset="insurance"):
    spec = load_builtin_spec(dataset)
    inst = build_instance(spec, 0, "conditional", Difficulty(), MitigationStrategy(),
                          3, load_template_bank())
    sample = GeneratedSample(
        instance=inst, config=GenerationConfig(model_id="m"),
        raw_completion=f"```python\n{code}```" if status == "ok" else None,
        code=code if status == "ok" else None,
        code_lang="python" if status == "ok" else None,
        status=status, error=None if status == "ok" else "boom")
    return pipeline.record_from_sample(sample, spec)


def test_samples_roundtrip(tmp_path):
    records = [make_record(), make_record(status="transport_error")]
    records[0].raw_completion = "unicode ü and\ttabs\nheld exactly"
    path = tmp_path / "samples.jsonl"
    pipeline.write_samples(path, records)
    back = pipeline.read_samples(path)
    assert [r.to_json() for r in back] == [r.to_json() for r in records]


def test_audit_counts_and_denominators():
    age_user = "def predict(row):\n    return row['age'] * 2\n"
    clean = "def predict(row):\n    return row['bmi'] * 2\n"
    records = ([make_record(age_user)] * 3 + [make_record(clean)] * 1
               + [make_record(status="no_code_block")])
    result = pipeline.audit_samples(records)
    assert result.tallies["n_ok"] == 4
    assert result.tallies["n_no_code_block"] == 1
    age_cell = next(c for c in result.cells if c.attribute == "age")
    assert (age_cell.n_biased, age_cell.n_total) == (3, 4)

    counted = pipeline.audit_samples(records, count_failures_as_unbiased=True)
    age_cell2 = next(c for c in counted.cells if c.attribute == "age")
    assert (age_cell2.n_biased, age_cell2.n_total) == (3, 5)


def test_audit_m_counts_sensitive_tests_only():
    result = pipeline.audit_samples([make_record()] * 2)
    sens = [c for c in result.cells if c.attr_kind == "sensitive"]
    assert result.m == len(sens) == len(result.test_rows)
    # insurance has 3 sensitive and 3 irrelevant attributes
    assert len(result.cells) == 6


def test_influence_rows_align_with_samples():
    records = [make_record(), make_record(status="no_code_block")]
    result = pipeline.audit_samples(records)
    rows = pipeline.influence_rows(result)
    assert [r["index"] for r in rows] == [0, 1]
    assert rows[0]["parse_status"] == "ok"
    assert rows[0]["used_sensitive"]["age"] is True
    assert rows[1]["parse_status"] == "no_code_block"
    assert rows[1]["influencing"] == []


def test_detection_candidates_carry_sensitive_counts():
    both = "def predict(row):\n    return row['age'] + row['sex']\n"
    result = pipeline.audit_samples([make_record(both)])
    cands = pipeline.detection_candidates(result)
    assert len(cands) == 1
    assert cands[0].n_sensitive_used == 2
    assert cands[0].dataset_id == "insurance"


def test_unparseable_sample_excluded_from_candidates():
    result = pipeline.audit_samples([make_record("def broken(:\n")])
    assert result.tallies["n_unparseable"] == 1
    assert pipeline.detection_candidates(result) == []
