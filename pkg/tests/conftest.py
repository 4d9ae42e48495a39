import numpy as np
import pytest

from co2dist.logic import dist, gibrat
from co2dist.logic.ingest import EmissionsPanel


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-size Monte Carlo checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_panel():
    """Three countries, three years, one missing cell."""
    return EmissionsPanel(
        countries=("AAA", "BBB", "CCC"),
        years=(2000, 2001, 2002),
        values=np.array(
            [
                [1.0, 1.1, 1.2],
                [10.0, np.nan, 12.0],
                [100.0, 104.0, 110.0],
            ]
        ),
    )


@pytest.fixture
def gibrat_panel():
    """60 countries over 12 years of proportionate growth from LOG(2.5, 2.4)."""
    return gibrat.simulate_gibrat(
        n_countries=60,
        n_years=12,
        initial=dist.lognormal(2.5, 2.4),
        shock_sd=0.05,
        seed=7,
        start_year=1985,
    )


@pytest.fixture
def long_csv(tmp_path):
    def write(text: str, name: str = "panel.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
