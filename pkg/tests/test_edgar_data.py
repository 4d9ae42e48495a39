"""Checks against the EDGAR national CO2 panel; skipped unless CO2DIST_EDGAR_CSV points at a long CSV."""
import os

import pytest

from co2dist.logic import fit, ingest, normtest, policy, trend
from co2dist.logic.dist import ModelId
from co2dist.logic.normtest import TestId

EDGAR_CSV = os.getenv("CO2DIST_EDGAR_CSV")

pytestmark = pytest.mark.skipif(not EDGAR_CSV, reason="CO2DIST_EDGAR_CSV not set")


@pytest.fixture(scope="module")
def edgar():
    return ingest.load_panel(EDGAR_CSV)


def test_lognormal_is_always_among_the_best_fits(edgar):
    for year in edgar.years:
        _, values = ingest.cross_section(edgar, year)
        ranking = fit.rank_models(fit.fit_all(values))
        assert ranking.group_of(ModelId.LOG) == fit.BEST_FIT, year


def test_shapiro_and_jarque_bera_never_reject(edgar):
    for year in edgar.years:
        _, values = ingest.cross_section(edgar, year)
        for test in (TestId.SW, TestId.SF, TestId.JB):
            assert not normtest.test_lognormality(test, values).reject_05, (year, test)


def test_mu_trend_forecast_for_2030(edgar):
    series = trend.lognormal_parameter_series(edgar)
    mu_model, sigma_model = trend.fit_parameter_trends(series)
    assert mu_model.predict(2030) == pytest.approx(2.7850, abs=0.02)
    assert sigma_model.predict(2030) == pytest.approx(2.3474, abs=0.02)


def test_reduction_scenario_mu(edgar):
    _, base = ingest.cross_section(edgar, 1990)
    assert policy.solve_parameter("mu", 2.3474, 0.45, base) == pytest.approx(1.5053, abs=0.005)
