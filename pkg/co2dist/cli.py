"""Command-line pipeline: summarize, rank, test, gibrat, trend, policy, all, simulate."""
import argparse
import logging
import sys
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from co2dist import config as cfg
from co2dist.config import DatasetSpec, RunConfig, Scenario, SimulationConfig
from co2dist.errors import Co2DistError, ConfigError, PanelLookupError
from co2dist.logic import sanitizer, storage
from co2dist.logic.ingest import EmissionsPanel
from co2dist.runners.base import load_dataset
from co2dist.runners.gibrat_runner import GibratRunner
from co2dist.runners.normality_runner import NormalityRunner
from co2dist.runners.policy_runner import PolicyRunner
from co2dist.runners.rank_runner import RankRunner
from co2dist.runners.simulation_runner import SimulationRunner
from co2dist.runners.summary_runner import SummaryRunner
from co2dist.runners.trend_runner import TrendRunner

logger = logging.getLogger(__name__)

PIPELINE = ("summarize", "rank", "test", "gibrat", "trend", "policy")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--input",
        action="append",
        default=[],
        metavar="KEY=PATH",
        help="input panel CSV per dataset key (edgar, gcb, cdiac); repeatable",
    )
    parser.add_argument("--dataset", help="dataset key the command runs on (default: first --input)")
    parser.add_argument("--format", choices=("long", "wide"), default="long", help="panel CSV layout")
    parser.add_argument(
        "--convert-carbon",
        action="append",
        nargs="?",
        const="cdiac",
        default=[],
        metavar="KEY",
        help="convert this dataset from MtC to MtCO2 (default key: cdiac); repeatable",
    )
    parser.add_argument("--years", help="inclusive year range A:B")
    parser.add_argument("--alpha", default="0.05,0.01", help="significance levels, comma separated")
    parser.add_argument("--criterion", choices=("aic", "bic", "hqc"), default="aic")
    parser.add_argument("--robust", action="store_true", help="heteroskedasticity-robust Gibrat t-tests")
    parser.add_argument("--hac-lag", type=int, help="Newey-West lag for the trend regressions")
    parser.add_argument("--forecast-years", default="2025,2030,2035", help="years for the forecast table")
    parser.add_argument("--base-year", type=int, default=cfg.DEFAULT_BASE_YEAR, help="base year of the R column")
    parser.add_argument("--plot-years", default="", help="years for Q-Q and rank-size plot data")
    parser.add_argument("--scenario", type=Path, help="policy scenario file (KEY=value)")
    parser.add_argument("--svg", action="store_true", help="also write SVG figures")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="random seed (default: CO2DIST_SEED or 20240101)")
    parser.add_argument("--out", type=Path, help="output directory (default: CO2DIST_OUT_DIR or reports)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="co2dist",
        description="Lognormal analysis of national CO2 emissions panels.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    helps = {
        "summarize": "descriptive statistics per dataset and year",
        "rank": "six-model fits ranked by an information criterion",
        "test": "seven normality tests on log emissions",
        "gibrat": "Gibrat's law regressions M1-M4",
        "trend": "trends and forecasts of the lognormal parameters",
        "policy": "national targets for a scenario file",
        "all": "every pipeline command (policy only with --scenario)",
    }
    for name in PIPELINE + ("all",):
        command = commands.add_parser(name, help=helps[name])
        _add_run_flags(command)
        _add_common_flags(command)

    simulate = commands.add_parser("simulate", help="write a synthetic proportionate-growth panel")
    simulate.add_argument("--countries", type=int, default=500)
    simulate.add_argument("--n-years", type=int, default=52)
    simulate.add_argument("--shock-sd", type=float, default=0.1)
    simulate.add_argument("--mu", type=float, default=2.5, help="initial lognormal mu")
    simulate.add_argument("--sigma", type=float, default=2.4, help="initial lognormal sigma")
    simulate.add_argument("--start-year", type=int, default=1970)
    _add_common_flags(simulate)
    return parser


def parse_inputs(entries: Sequence[str], fmt: str, convert: Sequence[str]) -> Dict[str, DatasetSpec]:
    """`KEY=PATH` entries to dataset specs, in the order given."""
    datasets: Dict[str, DatasetSpec] = {}
    for entry in entries:
        key, sep, path = entry.partition("=")
        key = key.strip().lower()
        if not sep or not path.strip():
            raise ConfigError(f"--input must look like KEY=PATH, got {entry!r}")
        if key not in cfg.DATASET_KEYS:
            raise PanelLookupError(f"unknown dataset key {key!r} (expected one of {', '.join(cfg.DATASET_KEYS)})")
        if key in datasets:
            raise ConfigError(f"dataset {key!r} given twice")
        datasets[key] = DatasetSpec(key=key, path=Path(path.strip()), format=fmt, convert_carbon=key in convert)
    for key in convert:
        if key not in datasets:
            raise ConfigError(f"--convert-carbon {key}: no --input for that dataset")
    return datasets


def build_config(args: argparse.Namespace) -> RunConfig:
    try:
        years = sanitizer.parse_year_range(args.years)
        alphas = tuple(sanitizer.parse_float_list(args.alpha))
        forecast_years = tuple(sanitizer.parse_int_list(args.forecast_years))
        plot_years = tuple(sanitizer.parse_int_list(args.plot_years))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if args.dataset is not None and args.dataset.lower() not in cfg.DATASET_KEYS:
        raise PanelLookupError(f"unknown dataset key {args.dataset!r}")

    return RunConfig.build(
        datasets=parse_inputs(args.input, args.format, [key.lower() for key in args.convert_carbon]),
        dataset=args.dataset.lower() if args.dataset else None,
        years=years,
        seed=args.seed if args.seed is not None else cfg.env_seed(),
        alphas=alphas,
        out_dir=args.out or cfg.env_out_dir(),
        scenario=args.scenario,
        criterion=args.criterion,
        robust=args.robust,
        hac_lag=args.hac_lag,
        forecast_years=forecast_years,
        base_year=args.base_year,
        plot_years=plot_years,
        svg=args.svg,
    )


def run_command(command: str, config: RunConfig, panels: Dict[str, EmissionsPanel]) -> List[Path]:
    """Run one pipeline command; on failure its partial outputs are removed and the error re-raised."""
    active = panels[config.active_dataset.key]
    if command == "summarize":
        runner = SummaryRunner(config)
        action = partial(runner.summarize, panels)
    elif command == "rank":
        runner = RankRunner(config)
        action = partial(runner.rank, active)
    elif command == "test":
        runner = NormalityRunner(config)
        action = partial(runner.run_tests, active)
    elif command == "gibrat":
        runner = GibratRunner(config)
        action = partial(runner.run_regressions, active)
    elif command == "trend":
        runner = TrendRunner(config)
        action = partial(runner.run_trends, active)
    elif command == "policy":
        if config.scenario is None:
            raise ConfigError("policy needs --scenario FILE")
        scenario = Scenario.from_file(config.scenario)
        key = scenario.dataset.lower() if scenario.dataset else config.active_dataset.key
        if key not in panels:
            raise PanelLookupError(f"scenario dataset {key!r} has no --input")
        runner = PolicyRunner(config)
        action = partial(runner.allocate, panels[key], scenario)
    else:
        raise ConfigError(f"unknown command {command!r}")

    logger.info("Running %s", command)
    try:
        return action()
    except Exception:
        storage.remove_files(runner.written)
        raise


def _run_pipeline(args: argparse.Namespace) -> List[Path]:
    config = build_config(args)
    panels = {key: load_dataset(spec) for key, spec in config.datasets.items()}
    if not panels:
        raise ConfigError("no input dataset given (use --input KEY=PATH)")

    if args.command == "all":
        commands = [c for c in PIPELINE if c != "policy" or config.scenario is not None]
    else:
        commands = [args.command]

    written: List[Path] = []
    for command in commands:
        written.extend(run_command(command, config, panels))
    return written


def _run_simulation(args: argparse.Namespace) -> List[Path]:
    config = SimulationConfig.build(
        countries=args.countries,
        years=args.n_years,
        shock_sd=args.shock_sd,
        mu=args.mu,
        sigma=args.sigma,
        start_year=args.start_year,
        seed=args.seed if args.seed is not None else cfg.env_seed(),
        out_dir=args.out or cfg.env_out_dir(),
    )
    runner = SimulationRunner(config)
    try:
        return runner.simulate()
    except Exception:
        storage.remove_files(runner.written)
        raise


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg.load_environment()
    args = build_parser().parse_args(argv)

    try:
        cfg.configure_logging(args.log_level)
        if args.command == "simulate":
            written = _run_simulation(args)
        else:
            written = _run_pipeline(args)
    except (Co2DistError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        return 1

    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
