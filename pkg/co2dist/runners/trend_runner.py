"""TrendRunner - Yearly lognormal parameters, their linear trends and forecasts."""
import dataclasses
import logging
from pathlib import Path
from typing import List

import pandas as pd

from co2dist.logic import trend
from co2dist.logic.ingest import EmissionsPanel, cross_section
from co2dist.runners.base import Runner

logger = logging.getLogger(__name__)


class TrendRunner(Runner):
    """Regresses mu and sigma on the year and forecasts both, with the implied global ratio."""

    name = "trend"

    def run_trends(self, panel: EmissionsPanel) -> List[Path]:
        series = trend.lognormal_parameter_series(panel, self.selected_years(panel))
        self.write(series, "trend_params.csv")

        mu_model, sigma_model = trend.fit_parameter_trends(series, hac_lag=self.config.hac_lag)
        models = pd.DataFrame([dataclasses.asdict(mu_model), dataclasses.asdict(sigma_model)])
        self.write(models, "trend_models.csv")
        for model in (mu_model, sigma_model):
            logger.info(
                "%s = %.4f + %.6f * year (R2=%.4f, HAC lag %d)",
                model.response, model.alpha, model.beta, model.r_squared, model.hac_lag,
            )

        base_emissions = None
        if self.config.base_year in panel.years:
            _, base_emissions = cross_section(panel, self.config.base_year)
        else:
            logger.warning("Base year %s not in panel; forecast table has no R column", self.config.base_year)

        forecast = trend.forecast_table(mu_model, sigma_model, self.config.forecast_years, base_emissions)
        self.write(forecast, "trend_forecast.csv")
        return list(self.written)
