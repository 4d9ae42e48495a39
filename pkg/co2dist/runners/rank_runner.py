"""RankRunner - Six-model fits and information-criterion rankings per year."""
import logging
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

from co2dist.errors import ConvergenceError, InsufficientDataError
from co2dist.logic import fit
from co2dist.logic.dist import ModelId
from co2dist.logic.ingest import EmissionsPanel, cross_section
from co2dist.runners.base import Runner

logger = logging.getLogger(__name__)

GROUPS = (fit.BEST_FIT, fit.LITTLE_SUPPORT, fit.NO_SUPPORT)


class RankRunner(Runner):
    """Fits EXP, FSK, GAM, LOG, PA2 and WEI to every cross-section and ranks them."""

    name = "rank"

    def rank(self, panel: EmissionsPanel) -> List[Path]:
        """Per-year ranking table plus how often each model lands in each support group."""
        criterion = self.config.criterion
        rows = []
        counts = {model: dict.fromkeys(GROUPS, 0) for model in ModelId}

        for year in self.selected_years(panel):
            _, values = cross_section(panel, year)
            try:
                fits = fit.fit_all(values)
                ranking = fit.rank_models(fits, criterion)
            except (InsufficientDataError, ConvergenceError) as exc:
                logger.warning("Skipping year %s: %s", year, exc)
                continue
            agree = fit.information_criteria_agree(fits)
            for position, entry in enumerate(ranking.entries, start=1):
                result = fits[entry.model]
                theta = list(result.params.theta) + [np.nan] * (2 - len(result.params.theta))
                se = list(result.se) + [np.nan] * (2 - len(result.se))
                rows.append(
                    {
                        "year": year,
                        "rank": position,
                        "model": entry.model.value,
                        criterion: entry.value,
                        "delta": entry.delta,
                        "group": entry.group,
                        "boundary": entry.boundary,
                        "loglik": result.loglik,
                        "param1": theta[0],
                        "param2": theta[1],
                        "se1": se[0],
                        "se2": se[1],
                        "criteria_agree": agree,
                    }
                )
                counts[entry.model][entry.group] += 1
            logger.info("%s: best %s by %s", year, ranking.best, criterion.upper())

        columns = [
            "year", "rank", "model", criterion, "delta", "group", "boundary",
            "loglik", "param1", "param2", "se1", "se2", "criteria_agree",
        ]
        self.write(pd.DataFrame(rows, columns=columns), f"rank_{criterion}.csv")

        groups = pd.DataFrame(
            [{"model": model.value, **counts[model]} for model in ModelId],
            columns=["model", *GROUPS],
        )
        self.write(groups, "rank_groups.csv")
        return list(self.written)
