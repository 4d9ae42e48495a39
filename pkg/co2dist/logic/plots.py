"""Plot data (Q-Q, rank-size, target profiles, p-value grids) and minimal SVG output."""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib.colors import ListedColormap
from scipy import special

from co2dist.errors import InsufficientDataError, ParameterError
from co2dist.logic import dist, normtest
from co2dist.logic.dist import ModelId, ParamVector

logger = logging.getLogger(__name__)

CURVE_POINTS = 200
COLOUR_CODES = {"white": 0, "yellow": 1, "red": 2}


@dataclass(frozen=True)
class PlotSeries:
    """Empirical points plus a reference line (qq) or fitted curve (rank_size)."""

    kind: str
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    reference_x: np.ndarray = field(repr=False)
    reference_y: np.ndarray = field(repr=False)
    reference: Dict[str, float] = field(default_factory=dict)

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def to_frame(self) -> pd.DataFrame:
        """Rows `x,y,series` with series in {empirical, reference}."""
        empirical = pd.DataFrame({"x": self.x, "y": self.y, "series": "empirical"})
        reference = pd.DataFrame(
            {"x": self.reference_x, "y": self.reference_y, "series": "reference"}
        )
        return pd.concat([empirical, reference], ignore_index=True)


def _positive(data) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise InsufficientDataError("plot data needs at least one value")
    if np.any(~(x > 0)):
        raise ParameterError("all data must be > 0")
    return x


def blom_positions(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.375) / (n + 0.25)


def qq_plot_data(data) -> PlotSeries:
    """Normal quantiles at Blom positions against sorted log data.

    The reference line is the least-squares line through the points; it is
    omitted for a single point.
    """
    logs = np.sort(np.log(_positive(data)))
    theoretical = special.ndtri(blom_positions(logs.size))

    if logs.size < 2:
        return PlotSeries("qq", theoretical, logs, np.empty(0), np.empty(0))

    slope, intercept = np.polyfit(theoretical, logs, 1)
    return PlotSeries(
        kind="qq",
        x=theoretical,
        y=logs,
        reference_x=theoretical,
        reference_y=intercept + slope * theoretical,
        reference={"intercept": float(intercept), "slope": float(slope)},
    )


def rank_size_plot_data(data, fitted: ParamVector, points: int = CURVE_POINTS) -> PlotSeries:
    """Empirical (x_(i), N+1-i) pairs and the fitted (N+1)(1-F(x)) curve on a log grid."""
    if fitted.model is not ModelId.LOG:
        raise ParameterError(f"rank-size plots use a LOG fit, got {fitted.model}")

    x = np.sort(_positive(data))
    n = x.size
    ranks = (n + 1.0) - np.arange(1, n + 1)
    if x[0] == x[-1]:
        grid = np.array([x[0]])
    else:
        grid = np.geomspace(x[0], x[-1], points)
    curve = (n + 1.0) * np.asarray(dist.survival(fitted, grid))
    return PlotSeries(
        kind="rank_size",
        x=x,
        y=ranks,
        reference_x=grid,
        reference_y=curve,
        reference={"mu": fitted.theta[0], "sigma": fitted.theta[1]},
    )


def write_series_csv(series: PlotSeries, path: Union[str, Path]) -> None:
    series.to_frame().to_csv(path, index=False, float_format="%.10g", lineterminator="\n")


def write_series_svg(series: PlotSeries, path: Union[str, Path], title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    try:
        if series.kind == "rank_size":
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.set_xlabel("emissions (MtCO2/year)")
            ax.set_ylabel("rank")
        else:
            ax.set_xlabel("standard normal quantile")
            ax.set_ylabel("log emissions")
        ax.plot(series.x, series.y, "o", markersize=2.5, color="black")
        if series.reference_x.size:
            ax.plot(series.reference_x, series.reference_y, "-", color="tab:red")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save_svg(fig, path)
    finally:
        plt.close(fig)


def colour_grid(p_values: pd.DataFrame, columns: Sequence[str]) -> pd.DataFrame:
    """The p-value grid with each listed column replaced by its colour class; missing cells stay missing."""
    colours = p_values.copy()
    for column in columns:
        colours[column] = [
            normtest.colour_class(p) if p is not None and np.isfinite(p) else None for p in p_values[column]
        ]
    return colours


def pvalue_heatmap_svg(
    grid: pd.DataFrame,
    path: Union[str, Path],
    title: str = "",
) -> None:
    """Heatmap of colour classes; `grid` has years as rows and tests/methods as columns."""
    codes = grid.apply(lambda column: column.map(COLOUR_CODES)).to_numpy(dtype=float)
    cmap = ListedColormap(["white", "gold", "firebrick"])
    height = max(3.0, 0.18 * len(grid.index) + 1.0)
    fig, ax = plt.subplots(figsize=(1.0 + 0.7 * len(grid.columns), height))
    try:
        ax.imshow(codes, cmap=cmap, vmin=0, vmax=2, aspect="auto", interpolation="nearest")
        ax.set_xticks(range(len(grid.columns)))
        ax.set_xticklabels([str(c) for c in grid.columns])
        ax.set_yticks(range(len(grid.index)))
        ax.set_yticklabels([str(i) for i in grid.index], fontsize=6)
        ax.set_xticks(np.arange(-0.5, len(grid.columns)), minor=True)
        ax.set_yticks(np.arange(-0.5, len(grid.index)), minor=True)
        ax.grid(which="minor", color="grey", linewidth=0.3)
        ax.tick_params(which="minor", length=0)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save_svg(fig, path)
    finally:
        plt.close(fig)


def targets_profile_data(
    r: Sequence[float],
    ranks: Sequence[int],
    r_target: float,
) -> pd.DataFrame:
    """r_i against country rank, with the global target and r = 1 as reference levels."""
    frame = pd.DataFrame({"rank": np.asarray(ranks, dtype=int), "r_i": np.asarray(r, dtype=float)})
    frame = frame.sort_values("rank", kind="stable").reset_index(drop=True)
    frame["R_target"] = float(r_target)
    frame["unity"] = 1.0
    return frame


def targets_profile_svg(profile: pd.DataFrame, path: Union[str, Path], zoom: Optional[float] = None) -> None:
    """Log-scale r_i profile; `zoom` restricts the y-range to [R/zoom, R*zoom]."""
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        ax.plot(profile["rank"], profile["r_i"], "o", markersize=2.5, color="black")
        r_target = float(profile["R_target"].iloc[0])
        ax.axhline(r_target, color="tab:red", linewidth=0.8)
        ax.axhline(1.0, color="tab:blue", linewidth=0.8)
        ax.set_yscale("log")
        ax.set_xlabel("rank (1 = largest emitter)")
        ax.set_ylabel("r_i")
        if zoom:
            ax.set_ylim(r_target / zoom, r_target * zoom)
        fig.tight_layout()
        _save_svg(fig, path)
    finally:
        plt.close(fig)


def _save_svg(fig, path: Union[str, Path]) -> None:
    # A fixed hashsalt and no date keep SVG output byte-identical across runs.
    matplotlib.rcParams["svg.hashsalt"] = "co2dist"
    fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info("Wrote %s", path)
