import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codebias import stats


class Label:
    def __init__(self, used):
        self._used = used

    def uses(self, name):
        return self._used.get(name, False)


def labels_from_bits(bits, attr="race"):
    return [Label({attr: bool(b)}) for b in bits]


# -- CBS ---------------------------------------------------------------------

def test_cbs_seven_of_ten():
    cells = stats.cbs(labels_from_bits([1] * 7 + [0] * 3), "race")
    assert cells.cbs_percent == 70.0
    assert cells.n_biased == 7 and cells.n_total == 10


def test_cbs_all_true():
    assert stats.cbs(labels_from_bits([1] * 4), "race").cbs_percent == 100.0


def test_cbs_empty_is_contract_error():
    with pytest.raises(ValueError):
        stats.cbs([], "race")


def test_cbs_exact_rational():
    # 1/3 is not representable; the percent must be the correctly rounded float
    cell = stats.cbs(labels_from_bits([1, 0, 0]), "race")
    assert cell.cbs_percent == pytest.approx(100 / 3)


# -- one-sample z -------------------------------------------------------------

def test_one_sample_zero_successes_not_significant():
    t = stats.one_sample_prop_z(0, 350, 1e-6)
    assert t.z < 0
    assert t.p_raw >= 0.5
    assert not t.significant


def test_one_sample_saturated_underflows():
    t = stats.one_sample_prop_z(350, 350, 1e-6)
    assert t.p_raw == 0.0  # reported as <1e-300 downstream


def test_one_sample_half_underflows_like_oracle():
    # z is ~9.3e3 here; any tail oracle agrees this is below double range
    t = stats.one_sample_prop_z(175, 350, 1e-6)
    assert t.z > 9000
    assert t.p_raw == 0.0


def test_one_sample_contract_errors():
    with pytest.raises(ValueError):
        stats.one_sample_prop_z(1, 0)
    with pytest.raises(ValueError):
        stats.one_sample_prop_z(5, 4)
    with pytest.raises(ValueError):
        stats.one_sample_prop_z(1, 10, p0=0.0)


# -- two-sample z -------------------------------------------------------------

def test_two_sample_extreme():
    t = stats.two_sample_prop_z_one_sided(100, 100, 0, 100)
    assert t.p_raw < 1e-20


def test_two_sample_equal_proportions():
    t = stats.two_sample_prop_z_one_sided(30, 60, 15, 30)
    assert t.z == 0.0
    assert t.p_raw == 0.5


def test_two_sample_94_vs_50_significant():
    t = stats.two_sample_prop_z_one_sided(94, 100, 50, 100)
    assert t.p_raw < 0.001
    assert t.significant


def test_two_sample_degenerate_flagged():
    t = stats.two_sample_prop_z_one_sided(0, 50, 0, 80)
    assert t.degenerate
    assert t.z == 0.0 and t.p_raw == 0.5 and not t.significant


# -- reference-oracle table ----------------------------------------------------

def test_ztests_match_arbitrary_precision_oracle(ztest_oracle_table):
    cases = ztest_oracle_table["cases"]
    assert len(cases) == 100
    for case in cases:
        if case["kind"] == "one_sample":
            t = stats.one_sample_prop_z(case["k"], case["n"], case["p0"])
        else:
            t = stats.two_sample_prop_z_one_sided(case["k1"], case["n1"],
                                                  case["k2"], case["n2"])
        expected = float(case["p"])
        assert expected > 0
        rel = abs(t.p_raw - expected) / expected
        assert rel <= 1e-9, (case, t.p_raw, expected, rel)


def test_normal_sf_absolute_accuracy_band():
    # sanity anchor points of the survival function
    assert stats.normal_sf(0.0) == pytest.approx(0.5, abs=1e-12)
    assert stats.normal_sf(1.959963984540054) == pytest.approx(0.025, abs=1e-12)
    assert stats.normal_sf(-5.0) == pytest.approx(1 - 2.866515718791939e-07, abs=1e-12)
    assert 0.0 < stats.normal_sf(37.0) < 1e-290


# -- bonferroni ----------------------------------------------------------------

def test_bonferroni_scales():
    assert stats.bonferroni([0.01], 3) == [0.03]


def test_bonferroni_clamps():
    assert stats.bonferroni([0.5], 4) == [1.0]


def test_bonferroni_contract_errors():
    with pytest.raises(ValueError):
        stats.bonferroni([0.5, 0.1], 1)
    with pytest.raises(ValueError):
        stats.bonferroni([1.5], 2)


@settings(max_examples=10_000, deadline=None)
@given(p1=st.floats(0.0, 1.0), p2=st.floats(0.0, 1.0), m=st.integers(2, 10_000))
def test_bonferroni_properties(p1, p2, m):
    lo, hi = sorted([p1, p2])
    adj_lo, adj_hi = stats.bonferroni([lo, hi], m)
    # never decreases, clamped to [0, 1], order preserving
    assert adj_lo >= lo and adj_hi >= hi
    assert 0.0 <= adj_lo <= 1.0 and 0.0 <= adj_hi <= 1.0
    assert adj_lo <= adj_hi


# -- analytic properties --------------------------------------------------------

@settings(deadline=None)
@given(n=st.integers(2, 2000), frac=st.floats(0.0, 1.0),
       p0=st.floats(1e-6, 0.999))
def test_one_sample_p_nonincreasing_in_k(n, frac, p0):
    k = min(int(frac * n), n - 1)
    p_low = stats.one_sample_prop_z(k, n, p0).p_raw
    p_high = stats.one_sample_prop_z(k + 1, n, p0).p_raw
    assert p_high <= p_low


@settings(deadline=None)
@given(n1=st.integers(1, 500), n2=st.integers(1, 500), data=st.data())
def test_two_sample_z_antisymmetric(n1, n2, data):
    k1 = data.draw(st.integers(0, n1))
    k2 = data.draw(st.integers(0, n2))
    a = stats.two_sample_prop_z_one_sided(k1, n1, k2, n2)
    b = stats.two_sample_prop_z_one_sided(k2, n2, k1, n1)
    assert a.z == -b.z


def test_adjust_updates_significance():
    t = stats.one_sample_prop_z(40, 50, 0.001, alpha=0.001)
    adj = stats.adjust(t, 100)
    assert adj.p_adjusted == min(1.0, 100 * t.p_raw)
    assert adj.p_adjusted >= adj.p_raw
    assert adj.significant == (adj.p_adjusted < adj.alpha)


# -- aggregation -----------------------------------------------------------------

def _cell(model, code_type, kind, k, n, dataset="d", attr="race"):
    return stats.BiasCell(model_id=model, dataset_id=dataset, code_type=code_type,
                          attribute=attr, attr_kind=kind, n_biased=k, n_total=n,
                          cbs_percent=100 * k / n)


def test_aggregate_means_two_cells():
    cells = [_cell("m", "conditional", "sensitive", 6, 10),
             _cell("m", "conditional", "sensitive", 8, 10, attr="sex")]
    rows = stats.aggregate_means(cells, ("code_type",))
    assert rows == [{"code_type": "conditional", "mean_cbs": 70.0, "n_cells": 2}]


def test_aggregate_means_grouping():
    cells = [_cell("m", "conditional", "sensitive", 5, 10),
             _cell("m", "ml_pipeline", "sensitive", 9, 10),
             _cell("m2", "ml_pipeline", "sensitive", 1, 10)]
    rows = stats.aggregate_means(cells, ("model_id", "code_type"))
    assert rows[0] == {"model_id": "m", "code_type": "conditional",
                       "mean_cbs": 50.0, "n_cells": 1}
    assert len(rows) == 3


def test_aggregate_means_empty_error():
    with pytest.raises(ValueError):
        stats.aggregate_means([], ("code_type",))
