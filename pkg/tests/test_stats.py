import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from geolam.stats import Histogram, StatsDomainError, fmt, ks_statistic, restrict, sample_moments


def _uniform_cdf(x):
    return np.clip(x, 0.0, 1.0)


def test_ks_examples():
    n = 200
    q = (np.arange(1, n + 1) - 0.5) / n
    assert ks_statistic(q, _uniform_cdf) == pytest.approx(1 / (2 * n), rel=1e-12)
    assert ks_statistic([0.5], _uniform_cdf) == pytest.approx(0.5)
    x = np.arange(10) / 10 + 0.05
    assert ks_statistic(x, _uniform_cdf) == pytest.approx(0.05, rel=1e-12)
    # 10 equally spaced quantiles i/10 give the one-sided gap 1/10
    assert ks_statistic(np.arange(1, 11) / 10, _uniform_cdf) == pytest.approx(0.1, rel=1e-12)
    with pytest.raises(StatsDomainError):
        ks_statistic([], _uniform_cdf)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 300))
def test_ks_matches_scipy(seed, n):
    x = np.random.default_rng(seed).uniform(size=n)
    ref = sps.kstest(x, "uniform").statistic
    assert ks_statistic(x, _uniform_cdf) == pytest.approx(ref, rel=1e-12, abs=1e-15)
    # unsorted input is accepted
    assert ks_statistic(x[::-1], _uniform_cdf) == ks_statistic(np.sort(x), _uniform_cdf)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_weighted_ks_equals_repetition(seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(size=20)
    w = rng.integers(1, 5, size=20)
    rep = np.repeat(x, w)
    assert ks_statistic(x, _uniform_cdf, w) == pytest.approx(ks_statistic(rep, _uniform_cdf), abs=1e-12)


def test_weighted_ks_errors():
    with pytest.raises(StatsDomainError):
        ks_statistic([0.1, 0.2], _uniform_cdf, [1.0, -1.0])
    with pytest.raises(StatsDomainError):
        ks_statistic([0.1, 0.2], _uniform_cdf, [0.0, 0.0])


def test_restrict():
    x = np.array([0.1, 0.5, 1.0, 2.0, 3.0])
    r, w = restrict(x, 0.5, 2.0, x)
    assert r.tolist() == [0.5, 1.0, 2.0] and w.tolist() == [0.5, 1.0, 2.0]
    assert restrict(x, 0.5, 2.0)[1] is None


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 15, allow_nan=False), max_size=200), st.sampled_from(["count", "length"]))
def test_histogram_conservation(values, mode):
    h = Histogram(0.0, 10.0, 10, mode).add(values)
    assert h.conserved()
    expected = len(values) if mode == "count" else math.fsum(values)
    assert h.total == pytest.approx(expected, rel=1e-12, abs=1e-12)
    assert np.all(np.diff(h.edges) > 0)


def test_histogram_csv():
    h = Histogram(0.0, 1.0, 4).add([0.1, 0.3, 0.3, 0.99, 1.0, -1])
    text = h.to_csv()
    lines = text.split("\n")
    assert lines[0] == "bin_lo,bin_hi,weight"
    assert lines[1] == "0,0.25,1"
    assert lines[2] == "0.25,0.5,2"
    assert "\r" not in text and text.endswith("\n")
    assert h.underflow == 1 and h.overflow == 1
    with pytest.raises(StatsDomainError):
        Histogram(1.0, 1.0, 4)
    with pytest.raises(StatsDomainError):
        Histogram(0.0, 1.0, 4, "mass")


def test_fmt_roundtrip():
    for x in (0.1, 1 / 3, math.pi, 1e-300, 12345.678):
        assert float(fmt(x)) == x


def test_sample_moments():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    m = sample_moments(x, (1, 2))
    assert m[0].estimate == 2.5 and m[1].estimate == 7.5
    assert m[0].stderr == pytest.approx(np.std(x, ddof=1) / 2)
    with pytest.raises(StatsDomainError):
        sample_moments([1.0])
