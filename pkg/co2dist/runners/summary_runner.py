"""SummaryRunner - Descriptive statistics per dataset and year."""
import logging
from pathlib import Path
from typing import Dict, List

import pandas as pd

from co2dist.logic import ingest
from co2dist.runners.base import Runner

logger = logging.getLogger(__name__)

COLUMNS = ["dataset", "year", "n", "max", "min", "mean", "sd", "skewness", "kurtosis"]


class SummaryRunner(Runner):
    """Builds the dataset comparison table (N, max, min, mean, sd, skewness, kurtosis)."""

    name = "summarize"

    def summarize(self, panels: Dict[str, ingest.EmissionsPanel]) -> List[Path]:
        """One row per dataset and selected year, datasets in input order."""
        rows = []
        for key, panel in panels.items():
            for summary in ingest.summarize_panel(panel, self.selected_years(panel)):
                rows.append({"dataset": key, **summary.as_row()})
            logger.info("%s: summarised %d years", key, sum(1 for row in rows if row["dataset"] == key))
        self.write(pd.DataFrame(rows, columns=COLUMNS), "summary.csv")
        return list(self.written)
