"""Property-style guarantees of the static extractor: soundness on
straight-line feature lists, kill correctness, and monotonicity under
unrelated-statement injection."""

import ast

from hypothesis import given, settings
from hypothesis import strategies as st

from codebias.extractor.dataflow import analyze_code
from codebias.seeding import SplitMix64, derive_seed

SCHEMA = ["race", "sex", "age", "education", "occupation", "hours_per_week",
          "capital_gain", "id_number", "favorite_color", "favorite_prime_number"]
TARGET = "income_level"

subsets = st.lists(st.sampled_from(SCHEMA), min_size=1, max_size=8, unique=True)
noise_names = st.lists(st.sampled_from(["zipcode", "height", "shoe_size"]),
                       max_size=2, unique=True)


def straight_line_snippet(cols):
    quoted = ", ".join(f"'{c}'" for c in cols)
    return (
        "import pandas as pd\n"
        "df = pd.read_csv('data.csv')\n"
        f"features = df[[{quoted}]]\n"
        f"target = df['{TARGET}']\n"
        "model.fit(features, target)\n"
    )


@settings(max_examples=150, deadline=None)
@given(cols=subsets, noise=noise_names)
def test_soundness_single_literal_feature_list(cols, noise):
    # a literal list flowing unmodified into fit is recovered exactly;
    # names outside the schema never leak into the report
    rep = analyze_code(straight_line_snippet(cols + noise), SCHEMA,
                       prediction_target=TARGET)
    assert rep.parse_status == "ok"
    assert rep.influencing == set(cols)


@settings(max_examples=150, deadline=None)
@given(cols=subsets, data=st.data())
def test_kill_removes_exactly_the_dropped_column(cols, data):
    victim = data.draw(st.sampled_from(cols))
    quoted = ", ".join(f"'{c}'" for c in cols)
    code = (
        "import pandas as pd\n"
        "df = pd.read_csv('data.csv')\n"
        f"features = df[[{quoted}]]\n"
        f"features = features.drop(columns=['{victim}'])\n"
        f"model.fit(features, df['{TARGET}'])\n"
    )
    rep = analyze_code(code, SCHEMA, prediction_target=TARGET)
    assert victim not in rep.influencing
    assert rep.influencing == set(cols) - {victim}


NEUTRAL_STATEMENTS = [
    "aux_counter_unrelated = 1234",
    "import hashlib as _unused_hash_mod",
    "helper_note = 'bookkeeping only'",
    "_spare_list = [1, 2, 3]",
]


def inject_neutral(code: str, position: int, statement: str) -> str:
    """Insert a top-level statement at a top-level boundary."""
    tree = ast.parse(code)
    lines = code.splitlines()
    boundaries = [node.lineno - 1 for node in tree.body] + [len(lines)]
    cut = boundaries[position % len(boundaries)]
    return "\n".join(lines[:cut] + [statement] + lines[cut:]) + "\n"


def test_monotonicity_under_statement_injection(labeled_snippets):
    rng = SplitMix64(derive_seed("inject", 1))
    checked = 0
    for entry in labeled_snippets:
        base = analyze_code(entry["code"], entry["schema"],
                            prediction_target=entry["prediction_target"])
        for _ in range(3):
            stmt = NEUTRAL_STATEMENTS[rng.below(len(NEUTRAL_STATEMENTS))]
            mutated = inject_neutral(entry["code"], rng.below(10), stmt)
            rep = analyze_code(mutated, entry["schema"],
                               prediction_target=entry["prediction_target"])
            assert rep.influencing == base.influencing, entry["ref"]
            checked += 1
    assert checked >= 150


def test_extraction_does_not_mutate_input(labeled_snippets):
    entry = labeled_snippets[0]
    code = entry["code"]
    snapshot = str(code)
    analyze_code(code, entry["schema"], prediction_target=entry["prediction_target"])
    assert code == snapshot
