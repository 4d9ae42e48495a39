import numpy as np
import pytest

from co2dist.errors import DegenerateRegressorError, InsufficientDataError, ParameterError
from co2dist.logic import dist, gibrat, normtest
from co2dist.logic.gibrat import GibratMethod, GrowthSample
from co2dist.logic.ingest import EmissionsPanel
from co2dist.logic.normtest import TestId


def _sample(before, after):
    before = np.asarray(before, dtype=float)
    countries = tuple(f"C{i}" for i in range(before.size))
    return GrowthSample(countries, before, np.asarray(after, dtype=float), 2000, 2001)


def test_noiseless_proportionate_growth():
    before = np.array([1.0, 3.0, 7.5, 20.0, 150.0, 900.0])
    sample = _sample(before, 1.03 * before)

    m1 = gibrat.fit_gibrat(GibratMethod.M1, sample)
    assert m1.beta == pytest.approx(1.0, abs=1e-12)
    assert m1.alpha == pytest.approx(np.log(1.03), abs=1e-12)

    m3 = gibrat.fit_gibrat(GibratMethod.M3, sample)
    assert m3.beta == pytest.approx(0.0, abs=1e-12)
    assert m3.alpha == pytest.approx(1.03, abs=1e-12)


@pytest.mark.parametrize("growth", [0.97, 1.0, 1.03])
def test_noiseless_growth_never_rejects_any_null(growth):
    rng = np.random.default_rng(50)
    for _ in range(50):
        before = dist.sample(dist.lognormal(2.5, 2.4), 50, rng=rng)
        fits = gibrat.fit_all_methods(_sample(before, growth * before))
        for result in fits:
            assert result.p_value == 1.0, (result.method, result.beta, result.se_beta)
            assert result.t_statistic == 0.0
            assert not result.rejects(0.10)


def test_exact_fit_off_the_null_is_rejected():
    before = np.array([1.0, 3.0, 7.5, 20.0, 150.0, 900.0])
    result = gibrat.fit_gibrat(GibratMethod.M1, _sample(before, 2.0 * before**0.8))
    assert result.beta == pytest.approx(0.8, abs=1e-12)
    assert result.p_value == 0.0


def _noisy_sample(rng, n=200):
    before = dist.sample(dist.lognormal(2.0, 1.5), n, rng=rng)
    after = before * np.exp(rng.normal(0.0, 0.1, size=n))
    return before, after


def test_m1_slope_is_invariant_to_rescaling(rng):
    before, after = _noisy_sample(rng)
    plain = gibrat.fit_gibrat(GibratMethod.M1, _sample(before, after))
    scaled = gibrat.fit_gibrat(GibratMethod.M1, _sample(1000.0 * before, 1000.0 * after))
    assert scaled.beta == pytest.approx(plain.beta, rel=1e-9)
    assert scaled.p_value == pytest.approx(plain.p_value, rel=1e-6)


@pytest.mark.parametrize("method", [GibratMethod.M2, GibratMethod.M3, GibratMethod.M4])
def test_level_slopes_scale_inversely_with_rescaling(rng, method):
    before, after = _noisy_sample(rng)
    c = 250.0
    plain = gibrat.fit_gibrat(method, _sample(before, after))
    scaled = gibrat.fit_gibrat(method, _sample(c * before, c * after))
    assert scaled.beta == pytest.approx(plain.beta / c, rel=1e-9)
    assert scaled.t_statistic == pytest.approx(plain.t_statistic, rel=1e-8)
    assert scaled.p_value == pytest.approx(plain.p_value, rel=1e-6)


def test_regression_variables():
    sample = _sample([2.0, 4.0, 8.0], [3.0, 4.0, 6.0])
    y, x = gibrat.regression_variables("M2", sample)
    np.testing.assert_allclose(y, [1.5, 1.0, 0.75])
    np.testing.assert_allclose(x, [2.5, 4.0, 7.0])
    y, x = gibrat.regression_variables("M4", sample)
    np.testing.assert_allclose(y, np.log([1.5, 1.0, 0.75]))
    np.testing.assert_allclose(x, [2.0, 4.0, 8.0])


def test_size_dependent_growth_rejects_m1_null(rng):
    before = dist.sample(dist.lognormal(2.0, 1.5), 200, rng=rng)
    after = before**0.8 * np.exp(rng.normal(0.0, 0.05, size=200))
    result = gibrat.fit_gibrat(GibratMethod.M1, _sample(before, after))
    assert result.beta == pytest.approx(0.8, abs=0.02)
    assert result.rejects(0.01)


def test_robust_errors_keep_the_point_estimate(gibrat_panel):
    sample = gibrat.build_growth_sample(gibrat_panel, 1990, 1991)
    plain = gibrat.fit_gibrat("M4", sample)
    robust = gibrat.fit_gibrat("M4", sample, robust=True)
    assert robust.beta == pytest.approx(plain.beta)
    assert robust.robust and not plain.robust


def test_constant_regressor_is_degenerate():
    with pytest.raises(DegenerateRegressorError):
        gibrat.fit_gibrat(GibratMethod.M3, _sample([5.0, 5.0, 5.0], [5.0, 6.0, 7.0]))


def test_growth_sample_drops_missing_pairs(small_panel):
    sample = gibrat.build_growth_sample(small_panel, 2000, 2002)
    assert sample.countries == ("AAA", "BBB", "CCC")
    assert sample.label == "2000-2002"
    with pytest.raises(InsufficientDataError):
        gibrat.build_growth_sample(small_panel, 2000, 2001)


def test_consecutive_year_fits(gibrat_panel):
    results = gibrat.consecutive_year_fits(gibrat_panel)
    assert len(results) == 11
    sample, fits = results[0]
    assert sample.label == "1985-1986"
    assert [f.method for f in fits] == list(GibratMethod)
    assert all(f.n == 60 for f in fits)


def test_consecutive_year_fits_skip_gaps(gibrat_panel):
    results = gibrat.consecutive_year_fits(gibrat_panel, years=[1985, 1986, 1990, 1991])
    assert [s.label for s, _ in results] == ["1985-1986", "1990-1991"]


def test_format_beta():
    assert gibrat.format_beta("M1", 0.98765) == "0.99"
    assert gibrat.format_beta("M3", -0.000123) == "-1e-04"
    assert gibrat.format_beta(GibratMethod.M2, 3.0e-5) == "3e-05"


def test_simulation_is_deterministic():
    initial = dist.lognormal(1.0, 1.0)
    a = gibrat.simulate_gibrat(20, 5, initial, 0.1, seed=3)
    b = gibrat.simulate_gibrat(20, 5, initial, 0.1, seed=3)
    assert a.equals(b)
    assert a.countries[0] == "C001"
    assert a.years == (1970, 1971, 1972, 1973, 1974)


def test_simulation_without_shocks_is_flat():
    panel = gibrat.simulate_gibrat(10, 4, dist.lognormal(1.0, 1.0), 0.0, seed=1)
    for column in range(1, 4):
        np.testing.assert_allclose(panel.values[:, column], panel.values[:, 0])


def test_simulation_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        gibrat.simulate_gibrat(10, 1, dist.lognormal(1.0, 1.0), 0.1, seed=1)
    with pytest.raises(ParameterError):
        gibrat.simulate_gibrat(10, 5, dist.lognormal(1.0, 1.0), -0.1, seed=1)


def test_fit_on_panel_built_by_hand():
    panel = EmissionsPanel(
        ("A", "B", "C", "D"),
        (2000, 2001),
        np.array([[1.0, 1.1], [2.0, 2.1], [4.0, 4.5], [8.0, 7.9]]),
    )
    fits = gibrat.fit_all_methods(gibrat.build_growth_sample(panel, 2000, 2001))
    assert [f.null_value for f in fits] == [1.0, 0.0, 0.0, 0.0]
    assert all(0.0 <= f.p_value <= 1.0 for f in fits)


@pytest.mark.slow
def test_m1_size_under_proportionate_growth():
    rng = np.random.default_rng(404)
    rejections = 0
    replicates = 1000
    for _ in range(replicates):
        before, after = _noisy_sample(rng, n=100)
        rejections += gibrat.fit_gibrat(GibratMethod.M1, _sample(before, after)).rejects(0.05)
    assert 25 <= rejections <= 75


@pytest.mark.slow
def test_simulated_cross_sections_become_lognormal():
    initial = dist.lognormal(2.5, 2.4)
    shock_sd = 0.1
    passes = 0
    variances = []
    for seed in range(200):
        panel = gibrat.simulate_gibrat(500, 100, initial, shock_sd, seed=seed)
        logs = np.log(panel.values)
        variances.append(logs.var(axis=0))
        passes += not normtest.test_lognormality(TestId.SW, panel.values[:, -1]).reject_05
    assert passes >= 180

    mean_variance = np.mean(variances, axis=0)
    steps = np.arange(100)
    expected = mean_variance[0] + steps * shock_sd**2
    np.testing.assert_allclose(mean_variance, expected, rtol=0.05)
    slope = np.polyfit(steps, mean_variance, 1)[0]
    assert slope == pytest.approx(shock_sd**2, rel=0.05)
