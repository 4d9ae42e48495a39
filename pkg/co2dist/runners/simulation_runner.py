"""SimulationRunner - Synthetic proportionate-growth panels."""
import logging
from pathlib import Path
from typing import List

from co2dist.config import SimulationConfig
from co2dist.logic import dist, gibrat, ingest, storage

logger = logging.getLogger(__name__)


class SimulationRunner:
    """Writes a seeded Gibrat panel as a long CSV, ready for `--input`."""

    name = "simulate"

    def __init__(self, config: SimulationConfig):
        self.config = config
        self.written: List[Path] = []

    def simulate(self) -> List[Path]:
        cfg = self.config
        panel = gibrat.simulate_gibrat(
            n_countries=cfg.countries,
            n_years=cfg.years,
            initial=dist.lognormal(cfg.mu, cfg.sigma),
            shock_sd=cfg.shock_sd,
            seed=cfg.seed,
            start_year=cfg.start_year,
        )
        path = storage.reserve_path(cfg.out_dir, "panel.csv", written=self.written)
        ingest.write_panel(panel, path)
        logger.info("Simulated %d countries x %d years (seed %d)", cfg.countries, cfg.years, cfg.seed)
        return list(self.written)
