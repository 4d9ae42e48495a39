"""NormalityRunner - Seven-test lognormality battery and the diagnostic plot data."""
import logging
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

from co2dist.errors import InsufficientDataError
from co2dist.logic import fit, normtest, plots
from co2dist.logic.dist import ModelId
from co2dist.logic.ingest import EmissionsPanel, cross_section
from co2dist.runners.base import Runner

logger = logging.getLogger(__name__)

TEST_COLUMNS = [test.value for test in normtest.TestId]


class NormalityRunner(Runner):
    """Runs SW, SF, LL, CVM, AD, DP and JB on log emissions year by year."""

    name = "test"

    def run_tests(self, panel: EmissionsPanel) -> List[Path]:
        """p-value grid, rejection counts per significance level, optional heatmap and plot data."""
        rows = []
        for year in self.selected_years(panel):
            _, values = cross_section(panel, year)
            row = {"year": year, "n": int(values.size)}
            row.update(dict.fromkeys(TEST_COLUMNS, np.nan))
            try:
                reports = normtest.test_all(values)
            except InsufficientDataError as exc:
                logger.warning("Skipping year %s: %s", year, exc)
                continue
            for report in reports:
                row[report.test.value] = report.p_value
            rows.append(row)

        grid = pd.DataFrame(rows, columns=["year", "n", *TEST_COLUMNS])
        self.write(grid, "normality_pvalues.csv")
        self.write(self._rejection_counts(grid), "normality_counts.csv")
        colours = plots.colour_grid(grid, TEST_COLUMNS)
        self.write(colours, "normality_colours.csv")

        heatmap = self.svg_path("normality_pvalues.svg")
        if heatmap is not None:
            plots.pvalue_heatmap_svg(
                colours.set_index("year")[TEST_COLUMNS], heatmap, title="Normality of log emissions"
            )

        for year in self.config.plot_years:
            self._plot_year(panel, year)
        return list(self.written)

    def _rejection_counts(self, grid: pd.DataFrame) -> pd.DataFrame:
        rows = []
        for test in TEST_COLUMNS:
            p_values = grid[test].dropna()
            for alpha in self.config.alphas:
                rows.append(
                    {
                        "test": test,
                        "alpha": alpha,
                        "years": int(p_values.size),
                        "rejections": int((p_values < alpha).sum()),
                    }
                )
        return pd.DataFrame(rows, columns=["test", "alpha", "years", "rejections"])

    def _plot_year(self, panel: EmissionsPanel, year: int) -> None:
        """Q-Q and rank-size data for one year."""
        _, values = cross_section(panel, year)
        qq = plots.qq_plot_data(values)
        self.write(qq.to_frame(), f"qq_{year}.csv")
        fitted = fit.fit_mle(ModelId.LOG, values).params
        rank_size = plots.rank_size_plot_data(values, fitted)
        self.write(rank_size.to_frame(), f"rank_size_{year}.csv")

        for series, name in ((qq, f"qq_{year}.svg"), (rank_size, f"rank_size_{year}.svg")):
            path = self.svg_path(name)
            if path is not None:
                plots.write_series_svg(series, path, title=str(year))
