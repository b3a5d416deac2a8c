import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from aztec.stats import StatReport, chi_square, ks_statistic, ks_two_sample, merge_bins


def normal_cdf(v):
    return 0.5 * math.erfc(-v / math.sqrt(2))


def test_ks_on_own_distribution():
    x = np.random.default_rng(0).normal(size=2000)
    d, pv = ks_statistic(x, normal_cdf)
    assert d < 1.36 / math.sqrt(2000)
    ref = sps.kstest(x, "norm")
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    assert pv == pytest.approx(ref.pvalue, rel=1e-6)


def test_ks_detects_shift():
    x = np.random.default_rng(1).normal(0.3, 1, size=2000)
    assert ks_statistic(x, normal_cdf)[1] < 1e-6
    assert ks_two_sample(x, np.random.default_rng(2).normal(size=2000))[1] < 1e-6
    with pytest.raises(ValueError):
        ks_statistic([], normal_cdf)


def test_chi_square_examples():
    stat, pv, df = chi_square([10, 20, 30], [10, 20, 30])
    assert stat == 0 and pv == 1 and df == 2
    # all the mass lands in the bin that expected almost none
    stat, pv, df = chi_square([0, 0, 100], [50, 45, 5])
    assert pv < 1e-12
    stat, pv, df = chi_square([7], [7])
    assert pv == 1 and df == 0


def test_merge_bins():
    c, e = merge_bins([1, 2, 3, 4], [2, 2, 6, 1], minimum=5)
    assert list(e) == [11]
    assert list(c) == [10]
    assert all(v >= 5 for v in e)


@given(st.lists(st.integers(0, 50), min_size=2, max_size=12))
def test_chi_square_matches_scipy_when_no_merging(counts):
    counts = np.array(counts, dtype=float) + 5
    expected = np.full(len(counts), counts.sum() / len(counts))
    stat, pv, df = chi_square(counts, expected)
    ref = sps.chisquare(counts, expected)
    assert stat == pytest.approx(ref.statistic)
    assert pv == pytest.approx(ref.pvalue, abs=1e-12)


def test_report_consistency():
    r = StatReport("x", 0.01, 0.05, 10, True)
    assert r.summary().startswith("PASS")
    assert StatReport.from_dict(r.to_dict()) == r
    with pytest.raises(ValueError):
        StatReport("x", 0.1, 0.05, 10, True)
    with pytest.raises(ValueError):
        StatReport("x", 0.5, 0.05, 10, True, direction="sideways")
    p = StatReport("p", 0.5, 1e-3, 10, True, direction="above")
    assert p.within_bound()
    nan = StatReport("n", float("nan"), 0.0, 1, False)
    assert nan.summary().startswith("FAIL")
    assert nan.to_dict()["statistic"] is None
