"""Shared plumbing for the pipeline runners."""
import logging
from pathlib import Path
from typing import List, Optional

import pandas as pd

from co2dist.config import DatasetSpec, RunConfig
from co2dist.logic import ingest, storage

logger = logging.getLogger(__name__)


def load_dataset(spec: DatasetSpec) -> ingest.EmissionsPanel:
    """Load one input panel, converting carbon units when the dataset asks for it."""
    panel = ingest.load_panel(spec.path, format=spec.format)
    if spec.convert_carbon:
        logger.info("%s: converting MtC to MtCO2 (x%.3f)", spec.key, ingest.CARBON_TO_CO2)
        panel = ingest.convert_carbon_to_co2(panel)
    return panel


class Runner:
    """Base class: holds the run configuration and the files written so far."""

    name = "runner"

    def __init__(self, config: RunConfig):
        self.config = config
        self.out_dir = storage.get_report_dir(config.out_dir)
        self.written: List[Path] = []

    def selected_years(self, panel: ingest.EmissionsPanel) -> List[int]:
        """Panel years inside --years (all years when no range was given)."""
        if self.config.years is None:
            return list(panel.years)
        start, end = self.config.years
        return [year for year in panel.years if start <= year <= end]

    def write(self, frame: pd.DataFrame, name: str) -> Path:
        return storage.write_table(frame, self.out_dir, name, written=self.written)

    def svg_path(self, name: str) -> Optional[Path]:
        """Path for an SVG companion, or None when --svg is off."""
        if not self.config.svg:
            return None
        return storage.reserve_path(self.out_dir, name, written=self.written)
