import numpy as np
import pytest

from co2dist.errors import DegenerateRegressorError, InsufficientDataError
from co2dist.logic import policy, trend

YEARS = np.arange(1970, 2022)


def test_exact_line_is_recovered():
    mu = 0.03 * YEARS - 57.0
    model = trend.fit_trend(YEARS, mu, "mu")
    assert model.beta == pytest.approx(0.03, abs=1e-10)
    assert model.predict(2030) == pytest.approx(3.9, abs=1e-7)
    assert model.r_squared == pytest.approx(1.0)
    assert (model.first_year, model.last_year, model.n) == (1970, 2021, 52)


def test_newey_west_lag():
    assert trend.newey_west_lag(52) == 3
    assert trend.newey_west_lag(100) == 4
    assert trend.newey_west_lag(10) == 2


def test_default_lag_follows_sample_size(rng):
    model = trend.fit_trend(YEARS, rng.normal(size=YEARS.size), "sigma")
    assert model.hac_lag == trend.newey_west_lag(YEARS.size)


def test_hac_with_zero_lag_equals_ols(rng):
    t = np.arange(2000, 2030, dtype=float)
    y = 0.5 + 0.01 * t + rng.normal(scale=0.1 + 0.01 * (t - 2000))
    model = trend.fit_trend(t, y, "mu", hac_lag=0)
    assert model.se_alpha_hac == model.se_alpha
    assert model.se_beta_hac == model.se_beta

    X = np.column_stack([np.ones_like(t), t])
    bread = np.linalg.inv(X.T @ X)
    residuals = y - X @ (bread @ X.T @ y)
    s2 = residuals @ residuals / (t.size - 2)
    assert model.se_beta == pytest.approx(np.sqrt(s2 * bread[1, 1]), rel=1e-6)


def test_positive_lag_differs_from_ols(rng):
    t = np.arange(1970, 2022, dtype=float)
    y = np.cumsum(rng.normal(scale=0.05, size=t.size))
    model = trend.fit_trend(t, y, "mu", hac_lag=3)
    assert model.se_beta_hac != pytest.approx(model.se_beta, rel=1e-6)


def test_shifting_years_keeps_slope_and_predictions(rng):
    y = 2.0 + 0.02 * (YEARS - 1970) + rng.normal(scale=0.05, size=YEARS.size)
    model = trend.fit_trend(YEARS, y, "mu")
    shifted = trend.fit_trend(YEARS - 1970, y, "mu")
    assert shifted.beta == pytest.approx(model.beta, rel=1e-9)
    assert shifted.se_beta == pytest.approx(model.se_beta, rel=1e-6)
    assert shifted.se_beta_hac == pytest.approx(model.se_beta_hac, rel=1e-6)
    assert shifted.f_p_value == pytest.approx(model.f_p_value, rel=1e-6)
    assert shifted.predict(2030 - 1970) == pytest.approx(model.predict(2030), abs=1e-8)


@pytest.mark.slow
def test_f_test_size_on_trendless_noise():
    rng = np.random.default_rng(2024)
    rejections = 0
    replicates = 1000
    for _ in range(replicates):
        model = trend.fit_trend(YEARS, rng.normal(size=YEARS.size), "mu")
        rejections += model.f_p_value < 0.05
    # Binomial(1000, 0.05) sd is about 7.
    assert 25 <= rejections <= 75


def test_constant_years_are_degenerate():
    with pytest.raises(DegenerateRegressorError):
        trend.fit_trend([2000, 2000, 2000], [1.0, 2.0, 3.0])


def test_needs_three_distinct_years():
    with pytest.raises(InsufficientDataError):
        trend.fit_trend([2000, 2001], [1.0, 2.0])


def test_rejects_unknown_response():
    with pytest.raises(ValueError):
        trend.fit_trend(YEARS, YEARS, "nu")


def test_parameter_series_and_trends(gibrat_panel):
    series = trend.lognormal_parameter_series(gibrat_panel)
    assert list(series.columns) == ["year", "n", "mu", "sigma", "se_mu", "se_sigma"]
    assert list(series["year"]) == list(gibrat_panel.years)
    assert (series["n"] == 60).all()
    mu_model, sigma_model = trend.fit_parameter_trends(series)
    assert mu_model.response == "mu" and sigma_model.response == "sigma"
    assert mu_model.n == 12


def test_forecast_table_adds_global_ratio():
    mu_model = trend.fit_trend(YEARS, 0.03 * YEARS - 57.0, "mu")
    sigma_model = trend.fit_trend(YEARS, np.full(YEARS.size, 2.0) + 1e-4 * (YEARS - 1970), "sigma")
    base = np.array([1.0, 5.0, 20.0, 80.0])

    table = trend.forecast_table(mu_model, sigma_model, [2025, 2030], base_emissions=base)
    assert list(table.columns) == ["year", "mu_t", "sigma_t", "R"]
    row = table.iloc[1]
    assert row["mu_t"] == pytest.approx(3.9, abs=1e-7)
    assert row["R"] == pytest.approx(policy.compute_R(row["mu_t"], row["sigma_t"], base))

    assert "R" not in trend.forecast_table(mu_model, sigma_model, [2030]).columns
