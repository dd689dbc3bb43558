import pytest

from codebias.report import (RunManifest, emit_bias_panels, emit_cells_csv,
                             emit_comparison_csv, emit_contrast_csv,
                             emit_detection_csv, emit_tests_csv, fmt_p, fmt_pct,
                             stars)
from codebias.stats import BiasCell, adjust, one_sample_prop_z


def manifest(m=4):
    return RunManifest(run_id="test", config={"seed": 42}, corpus_sha="c",
                       fixture_sha="f", m=m)


def cell(model="m", dataset="d", code_type="conditional", attr="race",
         kind="sensitive", k=30, n=50):
    return BiasCell(model_id=model, dataset_id=dataset, code_type=code_type,
                    attribute=attr, attr_kind=kind, n_biased=k, n_total=n,
                    cbs_percent=100 * k / n)


def cells_both_types():
    out = []
    for code_type, k in (("conditional", 25), ("ml_pipeline", 45)):
        out.append(cell(code_type=code_type, attr="race", k=k))
        out.append(cell(code_type=code_type, attr="sex", k=k - 5))
        out.append(cell(code_type=code_type, attr="favorite_color",
                        kind="irrelevant", k=2))
    return out


def test_fmt_helpers():
    assert fmt_pct(58.74) == "58.7"
    assert fmt_p(0.012345) == "1.23e-02"
    assert fmt_p(0.0) == "<1e-300"
    assert fmt_p(1e-310) == "<1e-300"
    assert stars(0.0005) == "***"
    assert stars(0.004) == "**"
    assert stars(0.04) == "*"
    assert stars(0.2) == ""


def test_manifest_hash_stable_and_sensitive():
    a, b = manifest(), manifest()
    assert a.hash == b.hash
    c = manifest()
    c.config = {"seed": 43}
    assert c.hash != a.hash


def test_manifest_roundtrip(tmp_path):
    m = manifest()
    m.write(tmp_path / "manifest.json")
    back = RunManifest.read(tmp_path / "manifest.json")
    assert back == m


def test_cells_csv_header_and_sorting():
    text = emit_cells_csv(cells_both_types(), manifest())
    lines = text.splitlines()
    assert lines[0].startswith("# manifest=") and lines[0].endswith(" m=4")
    body = lines[2:]
    assert body == sorted(body)
    assert any(line.endswith(",50.0") for line in body)  # race conditional 25/50


def test_cells_csv_rejects_empty():
    with pytest.raises(ValueError):
        emit_cells_csv([], manifest())


def test_tests_csv_rows():
    c = cell()
    t = adjust(one_sample_prop_z(c.n_biased, c.n_total), 4)
    text = emit_tests_csv([(c, t)], manifest())
    row = text.splitlines()[-1]
    assert row.startswith("m,d,conditional,race,one_sample,")
    assert row.endswith(",true,***")


def test_comparison_counts_and_rows():
    text = emit_comparison_csv(cells_both_types(), manifest())
    lines = text.splitlines()
    assert lines[1] == ("# combinations=2 pipeline_higher=2 "
                        "significant_at_0.001=2 significant_at_0.05=2")
    assert lines[3].startswith("m,d,race,50.0,90.0,40.0,")


def test_comparison_requires_pairs():
    only_cond = [cell(code_type="conditional")]
    with pytest.raises(ValueError):
        emit_comparison_csv(only_cond, manifest())


def test_contrast_delta():
    cells = [cell(attr="race", k=45, n=50),
             cell(attr="favorite_color", kind="irrelevant", k=5, n=50)]
    text = emit_contrast_csv(cells, manifest())
    assert text.splitlines()[-1] == "m,90.0,10.0,80.0"


def test_contrast_spec_example_arithmetic():
    cells = [cell(attr="race", k=891, n=1000),
             cell(attr="favorite_color", kind="irrelevant", k=110, n=1000)]
    text = emit_contrast_csv(cells, manifest())
    assert text.splitlines()[-1] == "m,89.1,11.0,78.1"


def test_contrast_requires_irrelevant_cells():
    with pytest.raises(ValueError):
        emit_contrast_csv([cell()], manifest())


def test_panels_match_cells_and_echo_means():
    cells = cells_both_types()
    tests = [(c, adjust(one_sample_prop_z(c.n_biased, c.n_total), 4))
             for c in cells if c.attr_kind == "sensitive"]
    csv_text, md = emit_bias_panels(cells, tests, manifest())
    assert csv_text == emit_cells_csv(cells, manifest())
    assert "Mean sensitive-attribute CBS by code type" in md
    assert "conditional 45.0%" in md  # mean of 50 and 40
    assert "ml_pipeline 85.0%" in md


def test_panels_warn_on_missing_code_type():
    cells = [cell(code_type="conditional")]
    _, md = emit_bias_panels(cells, [], manifest())
    assert "Warning: partial report" in md
    assert "ml_pipeline" in md


def test_detection_csv_layout():
    class Outcome:
        strategy = "specific"
        accuracy_by_type = {"conditional": 1.0, "ml_pipeline": 0.5}
        accuracy_overall = 0.75
        n_items = 8
        n_unparseable = 0
        n_by_type = {"conditional": 4, "ml_pipeline": 4}
        n_correct_by_type = {"conditional": 4, "ml_pipeline": 2}
        log = []

    text = emit_detection_csv([Outcome()], manifest())
    lines = text.splitlines()
    assert lines[2] == "specific,conditional,4,4,1.0000"
    assert lines[3] == "specific,ml_pipeline,4,2,0.5000"
    assert lines[4] == "specific,overall,8,6,0.7500"


def test_emission_is_deterministic():
    cells = cells_both_types()
    assert emit_cells_csv(cells, manifest()) == emit_cells_csv(list(cells), manifest())
    assert (emit_comparison_csv(cells, manifest())
            == emit_comparison_csv(list(reversed(cells)), manifest()))
