"""GibratRunner - Size-growth regressions M1-M4 for consecutive years."""
import logging
from pathlib import Path
from typing import List

import pandas as pd

from co2dist.logic import gibrat, plots
from co2dist.logic.ingest import EmissionsPanel
from co2dist.runners.base import Runner

logger = logging.getLogger(__name__)

METHOD_COLUMNS = [method.value for method in gibrat.GibratMethod]


class GibratRunner(Runner):
    """Tests the law of proportionate effect on every pair of consecutive years."""

    name = "gibrat"

    def run_regressions(self, panel: EmissionsPanel) -> List[Path]:
        """Formatted slope table and p-value grid, one row per year pair."""
        results = gibrat.consecutive_year_fits(
            panel, self.selected_years(panel), robust=self.config.robust
        )

        beta_rows, p_rows = [], []
        for sample, fits in results:
            beta_row = {"period": sample.label, "n": sample.n}
            p_row = {"period": sample.label, "n": sample.n}
            for result in fits:
                beta_row[result.method.value] = gibrat.format_beta(result.method, result.beta)
                p_row[result.method.value] = result.p_value
            beta_rows.append(beta_row)
            p_rows.append(p_row)
        logger.info("Fitted %d year pairs (robust=%s)", len(results), self.config.robust)

        self.write(pd.DataFrame(beta_rows, columns=["period", "n", *METHOD_COLUMNS]), "gibrat_beta.csv")
        p_values = pd.DataFrame(p_rows, columns=["period", "n", *METHOD_COLUMNS])
        self.write(p_values, "gibrat_pvalues.csv")
        colours = plots.colour_grid(p_values, METHOD_COLUMNS)
        self.write(colours, "gibrat_colours.csv")

        heatmap = self.svg_path("gibrat_pvalues.svg")
        if heatmap is not None:
            plots.pvalue_heatmap_svg(colours.set_index("period")[METHOD_COLUMNS], heatmap, title="Gibrat's law")
        return list(self.written)
