import json
from pathlib import Path

import pytest

from codebias.cli import main, load_config, parse_cells_csv
from codebias import pipeline


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def main_run(tmp_path_factory, main_config_path, replay_store_path):
    """One shared generate+audit+report chain over the bundled fixtures."""
    out = tmp_path_factory.mktemp("mainrun")
    assert run_cli("generate", "--config", str(main_config_path),
                   "--replay", str(replay_store_path), "--out", str(out)) == 0
    assert run_cli("audit", "--config", str(main_config_path), "--run", str(out)) == 0
    assert run_cli("report", "--run", str(out)) == 0
    return out


# -- config parsing ---------------------------------------------------------------

def test_load_config_defaults_and_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nseed = 7\ndatasets = crime\n", encoding="utf-8")
    cfg = load_config(str(path))
    assert cfg["seed"] == "7"
    assert cfg["datasets"] == "crime"
    assert cfg["code_types"] == "conditional,ml_pipeline"  # default preserved


def test_load_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("not_a_key = 1\n", encoding="utf-8")
    from codebias.cli import CliError
    with pytest.raises(CliError, match="unknown config key"):
        load_config(str(path))


def test_load_config_missing_file_is_io_error(tmp_path):
    from codebias.cli import CliError
    with pytest.raises(CliError) as err:
        load_config(str(tmp_path / "nope.cfg"))
    assert err.value.code == 2


# -- generate ----------------------------------------------------------------------

def test_generate_replay_writes_700_records(main_run):
    records = pipeline.read_samples(main_run / "samples.jsonl")
    assert len(records) == 700
    assert {r.code_type for r in records} == {"conditional", "ml_pipeline"}


def test_generate_empty_datasets_is_usage_error(tmp_path, replay_store_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("datasets =\n", encoding="utf-8")
    code = run_cli("generate", "--config", str(cfg),
                   "--replay", str(replay_store_path), "--out", str(tmp_path / "o"))
    assert code == 1


def test_generate_seed_repeat_identical(tmp_path, main_config_path, replay_store_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run_cli("generate", "--config", str(main_config_path), "--seed", "42",
                       "--replay", str(replay_store_path), "--out", str(out)) == 0
        outs.append((out / "samples.jsonl").read_bytes())
    assert outs[0] == outs[1]


def test_generate_live_endpoint_without_store_is_validation_error(tmp_path,
                                                                  main_config_path):
    code = run_cli("generate", "--config", str(main_config_path),
                   "--out", str(tmp_path / "o"))
    assert code == 1  # endpoint is replay but no --replay store given


# -- audit -------------------------------------------------------------------------

def test_audit_missing_samples_is_io_error(tmp_path):
    assert run_cli("audit", "--run", str(tmp_path)) == 2


def test_audit_llm_without_fixtures_is_validation_error(tmp_path, main_config_path,
                                                        replay_store_path, main_run):
    out = tmp_path / "llmrun"
    out.mkdir()
    (out / "samples.jsonl").write_bytes((main_run / "samples.jsonl").read_bytes())
    code = run_cli("audit", "--config", str(main_config_path), "--run", str(out),
                   "--extractor", "llm")
    assert code == 1


def test_audit_emits_manifest_m_and_headers(main_run):
    manifest = json.loads((main_run / "manifest.json").read_text())
    assert manifest["m"] == 40
    for name in ("cells.csv", "tests.csv"):
        first = (main_run / name).read_text().splitlines()[0]
        assert first == f"# manifest={manifest['manifest_hash']} m=40"


def test_audit_count_failures_flag_changes_denominator(tmp_path, main_config_path,
                                                       main_run):
    out = tmp_path / "flagged"
    out.mkdir()
    (out / "samples.jsonl").write_bytes((main_run / "samples.jsonl").read_bytes())
    assert run_cli("audit", "--config", str(main_config_path), "--run", str(out),
                   "--count-failures-as-unbiased") == 0
    flagged = parse_cells_csv((out / "cells.csv").read_text())
    default = parse_cells_csv((main_run / "cells.csv").read_text())
    assert sum(c.n_total for c in flagged) > sum(c.n_total for c in default)
    # every group now counts all 50 variants
    assert {c.n_total for c in flagged} == {50}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["count_failures_as_unbiased"] is True


def test_tallies_reports_both_denominators(main_run):
    tallies = json.loads((main_run / "tallies.json").read_text())
    assert tallies["n_records"] == 700
    assert tallies["n_records"] == (tallies["n_ok"] + tallies["n_no_code_block"]
                                    + tallies["n_transport_error"]
                                    + tallies["n_unparseable"])
    assert tallies["denominator_policy"] == "exclude-failures"


# -- compare / report -----------------------------------------------------------------

def test_compare_emits_comparison(main_run):
    assert run_cli("compare", "--run", str(main_run)) == 0
    text = (main_run / "comparison.csv").read_text()
    assert "# combinations=20" in text.splitlines()[1]


def test_report_md_mentions_tallies_and_m(main_run):
    md = (main_run / "report.md").read_text()
    assert "m = 40" in md
    assert "700 total" in md
    assert "Sensitive vs irrelevant usage" in md


# -- extract ----------------------------------------------------------------------------

def test_extract_subcommand_roundtrip(tmp_path, fixtures_dir):
    out = tmp_path / "influence.jsonl"
    assert run_cli("extract", "--snippets", str(fixtures_dir / "labeled_snippets.jsonl"),
                   "--out", str(out)) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 65
    assert all(row["parse_status"] == "ok" for row in rows)
    assert all(isinstance(row["influencing"], list) for row in rows)


def test_extract_missing_input_is_io_error(tmp_path):
    assert run_cli("extract", "--snippets", str(tmp_path / "nope.jsonl"),
                   "--out", str(tmp_path / "o.jsonl")) == 2


# -- failure budget ------------------------------------------------------------------------

def test_failure_budget_aborts_live_run(tmp_path, monkeypatch):
    cfg = tmp_path / "live.cfg"
    cfg.write_text("datasets = insurance\ncode_types = conditional\n"
                   "endpoint = http://127.0.0.1:1/v1\nfailure_budget = 0.05\n",
                   encoding="utf-8")
    import codebias.modelclient as mc
    monkeypatch.setattr(mc.ModelClient, "_http_transport",
                        lambda self, endpoint, body: (_ for _ in ()).throw(OSError("down")))
    monkeypatch.setattr(mc.ModelClient, "__init__", _fast_client_init(mc))
    code = run_cli("generate", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 3


def _fast_client_init(mc):
    original = mc.ModelClient.__init__

    def patched(self, *args, **kwargs):
        kwargs["backoff_base"] = 0.0
        original(self, *args, **kwargs)

    return patched
