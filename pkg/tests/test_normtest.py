import numpy as np
import pytest
from scipy import special

from co2dist.errors import InsufficientDataError, ParameterError
from co2dist.logic import dist, normtest
from co2dist.logic.dist import ModelId, ParamVector
from co2dist.logic.normtest import TestId


def test_reports_run_on_log_data(rng):
    x = dist.sample(dist.lognormal(2.0, 2.3), 200, rng=rng)
    for report in normtest.test_all(x):
        assert 0.0 <= report.p_value <= 1.0
        assert report.n == 200
        assert report.reject_05 == (report.p_value < 0.05)
        assert report.reject_01 == (report.p_value < 0.01)


def test_scale_equivariance(rng):
    x = dist.sample(dist.lognormal(1.0, 1.5), 150, rng=rng)
    for a, b in zip(normtest.test_all(x), normtest.test_all(x * 37.5)):
        assert a.test is b.test
        assert a.statistic == pytest.approx(b.statistic, rel=1e-10, abs=1e-12)
        assert a.p_value == pytest.approx(b.p_value, rel=1e-10, abs=1e-12)


def test_exponential_data_is_rejected():
    x = dist.sample(ParamVector(ModelId.EXP, (1.0,)), 200, seed=4)
    reports = {r.test: r for r in normtest.test_all(x)}
    assert reports[TestId.SW].reject_05
    assert reports[TestId.AD].reject_05


def test_shapiro_francia_on_exact_normal_scores_is_near_one():
    n = 100
    scores = special.ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    report = normtest.test_lognormality(TestId.SF, np.exp(scores))
    assert report.statistic == pytest.approx(1.0, abs=1e-12)
    assert report.p_value > 0.5


def test_jarque_bera_matches_moment_formula(rng):
    y = rng.normal(size=80)
    report = normtest.test_lognormality("JB", np.exp(y))
    centred = y - y.mean()
    m2 = np.mean(centred**2)
    s = np.mean(centred**3) / m2**1.5
    k = np.mean(centred**4) / m2**2
    assert report.statistic == pytest.approx(80 * (s**2 / 6 + (k - 3) ** 2 / 24))


def test_validity_ranges():
    x = np.exp(np.linspace(-1, 1, 10))
    with pytest.raises(InsufficientDataError):
        normtest.test_lognormality(TestId.DP, x)
    with pytest.raises(InsufficientDataError):
        normtest.test_lognormality(TestId.LL, x[:5])
    assert normtest.test_lognormality(TestId.SW, x[:3]).n == 3
    assert [r.test for r in normtest.test_all(x)] == [
        TestId.SW, TestId.SF, TestId.LL, TestId.CVM, TestId.AD, TestId.JB,
    ]


def test_bad_data_is_rejected():
    with pytest.raises(ParameterError):
        normtest.test_lognormality(TestId.SW, [1.0, 2.0, -3.0])
    with pytest.raises(InsufficientDataError):
        normtest.test_lognormality(TestId.SW, [2.0] * 10)


def test_colour_classes():
    assert normtest.colour_class(0.2) == "white"
    assert normtest.colour_class(0.05) == "white"
    assert normtest.colour_class(0.03) == "yellow"
    assert normtest.colour_class(0.01) == "yellow"
    assert normtest.colour_class(0.001) == "red"


@pytest.mark.slow
@pytest.mark.parametrize("test", list(TestId), ids=str)
def test_size_is_calibrated(test):
    rejections = 0
    for seed in range(2000):
        x = dist.sample(dist.lognormal(2.0, 2.3), 200, seed=seed)
        rejections += normtest.test_lognormality(test, x).reject_05
    assert 0.03 <= rejections / 2000 <= 0.07


def test_size_is_roughly_calibrated_on_fewer_replicates():
    rejections = 0
    for seed in range(200):
        x = dist.sample(dist.lognormal(2.0, 2.3), 200, seed=1000 + seed)
        rejections += normtest.test_lognormality(TestId.SW, x).reject_05
    assert rejections / 200 <= 0.12
