"""PolicyRunner - National targets for a global reduction scenario."""
import logging
from pathlib import Path
from typing import List, Optional

import pandas as pd

from co2dist.config import Scenario
from co2dist.errors import ParameterError
from co2dist.logic import fit, plots, policy, trend
from co2dist.logic.dist import ModelId
from co2dist.logic.ingest import EmissionsPanel, cross_section
from co2dist.runners.base import Runner

logger = logging.getLogger(__name__)

TARGET_COLUMNS = ["country", "rank", "reference_emissions", "r_i", "group", "allocated_emissions"]


class PolicyRunner(Runner):
    """Solves the free lognormal parameter and allocates national ratios r_i."""

    name = "policy"

    def resolve_fixed_value(self, scenario: Scenario, panel: EmissionsPanel) -> float:
        """The scenario's fixed value, or the trend forecast for the target year."""
        if not scenario.from_trend:
            return float(scenario.fixed_value)

        start = scenario.trend_start if scenario.trend_start is not None else panel.years[0]
        end = scenario.trend_end if scenario.trend_end is not None else panel.years[-1]
        years = [year for year in panel.years if start <= year <= end]
        series = trend.lognormal_parameter_series(panel, years)
        model = trend.fit_trend(series["year"], series[scenario.fix], scenario.fix, hac_lag=self.config.hac_lag)
        value = model.predict(scenario.target_year)
        logger.info("%s_t from the %s-%s trend: %.4f", scenario.fix, start, end, value)
        if scenario.fix == "sigma" and not value > 0:
            raise ParameterError(f"trend forecast of sigma for {scenario.target_year} is not positive: {value}")
        return value

    def allocate(self, panel: EmissionsPanel, scenario: Optional[Scenario] = None) -> List[Path]:
        """Targets table, one-row scenario summary and r_i profile data."""
        scenario = scenario or Scenario.from_file(self.config.scenario)
        fixed_value = self.resolve_fixed_value(scenario, panel)

        _, base = cross_section(panel, scenario.base_year)
        base_sigma = fit.fit_mle(ModelId.LOG, base).params["sigma"]
        result = policy.run_scenario(
            panel,
            base_year=scenario.base_year,
            reference_year=scenario.reference_year,
            target_year=scenario.target_year,
            R_target=scenario.R_target,
            fix=scenario.fix,
            fixed_value=fixed_value,
            base_sigma=base_sigma,
        )

        targets = pd.DataFrame(
            [
                {
                    "country": item.country,
                    "rank": item.rank,
                    "reference_emissions": item.reference_emissions,
                    "r_i": item.r_i,
                    "group": item.group,
                    "allocated_emissions": item.allocated_emissions,
                }
                for item in result.targets
            ],
            columns=TARGET_COLUMNS,
        )
        self.write(targets, "policy_targets.csv")
        self.write(self._summary(result, scenario, targets), "policy_summary.csv")

        profile = plots.targets_profile_data(targets["r_i"], targets["rank"], scenario.R_target)
        self.write(profile, "policy_profile.csv")
        svg = self.svg_path("policy_profile.svg")
        if svg is not None:
            plots.targets_profile_svg(profile, svg)
        return list(self.written)

    @staticmethod
    def _summary(result: policy.PolicyResult, scenario: Scenario, targets: pd.DataFrame) -> pd.DataFrame:
        groups = targets["group"].value_counts()
        row = {
            "base_year": scenario.base_year,
            "reference_year": scenario.reference_year,
            "target_year": scenario.target_year,
            "n": result.scenario.n,
            "R_target": scenario.R_target,
            "R_achieved": result.R_achieved,
            "fix": scenario.fix,
            "mu_t": result.scenario.mu_t,
            "sigma_t": result.scenario.sigma_t,
            "theil": result.theil,
            "base_sigma": result.base_sigma,
            "delta_theil": result.delta_theil,
            policy.LOW: int(groups.get(policy.LOW, 0)),
            policy.MIDDLE: int(groups.get(policy.MIDDLE, 0)),
            policy.HIGH: int(groups.get(policy.HIGH, 0)),
        }
        return pd.DataFrame([row])
