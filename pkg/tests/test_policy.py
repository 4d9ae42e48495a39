import numpy as np
import pytest
from numpy.testing import assert_allclose

from co2dist.errors import BracketError, ParameterError, SampleMismatchError
from co2dist.logic import dist, policy
from co2dist.logic.policy import PolicyScenario


@pytest.fixture
def base_vector():
    return dist.sample(dist.lognormal(2.5, 2.4), 208, seed=1990)


def test_scale_law_links_printed_scenario_values(base_vector):
    assert np.exp(2.7850 - 1.5053) == pytest.approx(1.6180 / 0.45, rel=2.5e-3)
    ratio = policy.compute_R(2.7850, 2.3474, base_vector) / policy.compute_R(1.5053, 2.3474, base_vector)
    assert ratio == pytest.approx(np.exp(2.7850 - 1.5053), rel=1e-12)


def test_solved_mu_shifts_with_log_target(base_vector):
    high = policy.solve_parameter("mu", 2.3474, 1.6180, base_vector)
    low = policy.solve_parameter("mu", 2.3474, 0.45, base_vector)
    assert high - low == pytest.approx(np.log(1.6180 / 0.45), abs=1e-12)


def test_solve_then_compute_recovers_target():
    rng = np.random.default_rng(208)
    for _ in range(20):
        base = dist.sample(dist.lognormal(2.5, 2.4), 208, rng=rng)
        R_target = rng.uniform(0.1, 3.0)

        sigma_t = rng.uniform(0.5, 3.0)
        mu_t = policy.solve_parameter("mu", sigma_t, R_target, base)
        assert policy.compute_R(mu_t, sigma_t, base) == pytest.approx(R_target, rel=1e-10)

        # Keep the sigma -> 0 floor of R below the target so a root exists.
        mu_fixed = np.log(base.sum() / base.size) + np.log(R_target) - 1.0
        sigma_solved = policy.solve_parameter("sigma", mu_fixed, R_target, base)
        assert policy.compute_R(mu_fixed, sigma_solved, base) == pytest.approx(R_target, rel=1e-10)


def test_unreachable_target_raises_bracket_error():
    with pytest.raises(BracketError):
        policy.solve_parameter("sigma", 5.0, 0.5, [1.0, 2.0, 3.0])


def test_solve_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        policy.solve_parameter("mu", 2.0, 0.0, [1.0, 2.0])
    with pytest.raises(ParameterError):
        policy.solve_parameter("mu", -1.0, 0.5, [1.0, 2.0])
    with pytest.raises(ValueError):
        policy.solve_parameter("beta", 1.0, 0.5, [1.0, 2.0])


def test_plotting_scores_are_symmetric():
    scores = policy.plotting_scores(7)
    np.testing.assert_allclose(scores, -scores[::-1], atol=1e-12)
    assert scores[3] == 0.0


def test_group_boundaries():
    assert policy.group_for(1.2, 0.45) == policy.LOW
    assert policy.group_for(1.0, 0.45) == policy.MIDDLE
    assert policy.group_for(0.45, 0.45) == policy.MIDDLE
    assert policy.group_for(0.3, 0.45) == policy.HIGH


def test_allocation_pairs_quantiles_with_ranked_countries():
    scenario = PolicyScenario(
        base_year=1990,
        reference_year=2020,
        target_year=2030,
        base_countries=("A", "B", "C"),
        base_emissions=np.array([5.0, 1.0, 20.0]),
        reference_countries=("A", "B", "C"),
        reference_emissions=np.array([4.0, 2.0, 30.0]),
        mu_t=1.0,
        sigma_t=1.0,
        R_target=0.5,
    )
    targets = policy.allocate_targets(scenario)
    quantiles = policy.lognormal_quantiles(1.0, 1.0, 3)

    assert [t.country for t in targets] == ["C", "A", "B"]
    assert [t.rank for t in targets] == [1, 2, 3]
    assert targets[0].allocated_emissions == pytest.approx(quantiles[2])
    assert targets[2].r_i == pytest.approx(quantiles[0] / 2.0)


def test_scenario_breaks_ties_by_country():
    scenario = PolicyScenario(
        1990, 1990, 2030, ("B", "A"), np.array([3.0, 3.0]), ("B", "A"), np.array([3.0, 3.0]), 1.0, 1.0, 0.5
    )
    assert scenario.reference_countries == ("A", "B")


def test_scenario_rejects_different_country_counts():
    with pytest.raises(SampleMismatchError):
        PolicyScenario(
            1990, 2020, 2030, ("A", "B", "C"), np.array([1.0, 2.0, 3.0]),
            ("A", "B"), np.array([1.0, 2.0]), 1.0, 1.0, 0.5,
        )


def test_run_scenario_with_missing_reference_cell(small_panel):
    with pytest.raises(SampleMismatchError):
        policy.run_scenario(small_panel, 2000, 2001, 2030, 0.5, fix="sigma", fixed_value=1.0)


def test_run_scenario_reaches_target(gibrat_panel):
    result = policy.run_scenario(
        gibrat_panel, 1985, 1996, 2030, 0.45, fix="sigma", fixed_value=2.3474, base_sigma=2.4
    )
    assert result.R_achieved == pytest.approx(0.45, rel=1e-10)
    assert len(result.targets) == 60
    references = [t.reference_emissions for t in result.targets]
    assert references == sorted(references, reverse=True)
    assert result.theil == pytest.approx(2.3474**2 / 2)
    assert result.delta_theil == pytest.approx(2.3474**2 / 2 - 2.4**2 / 2)
    assert {t.group for t in result.targets} <= {policy.LOW, policy.MIDDLE, policy.HIGH}


def test_aggregate_identity_when_reference_is_base(gibrat_panel):
    result = policy.run_scenario(gibrat_panel, 1990, 1990, 2030, 0.8, fix="mu", fixed_value=2.0)
    base_total = result.scenario.base_emissions.sum()
    allocated = sum(t.r_i * t.reference_emissions for t in result.targets)
    assert allocated / base_total == pytest.approx(result.R_achieved, rel=1e-12)
    assert result.R_achieved == pytest.approx(0.8, rel=1e-10)
    assert np.isnan(result.delta_theil)


def test_inequality_index():
    assert policy.inequality_index(2.3474) == pytest.approx(2.7551, abs=1e-4)
    assert policy.inequality_change(2.0, 1.0) == pytest.approx(-1.5)
    with pytest.raises(ParameterError):
        policy.inequality_index(0.0)


def test_numeric_theil_matches_closed_form():
    assert policy.theil_index_numeric(1.5, 2.3474) == pytest.approx(2.3474**2 / 2, abs=1e-6)
    rng = np.random.default_rng(6)
    for mu, sigma in zip(rng.uniform(-3, 6, 20), rng.uniform(0.1, 3.0, 20)):
        assert policy.theil_index_numeric(mu, sigma) == pytest.approx(sigma**2 / 2, abs=1e-6)
        assert policy.mean_log_deviation_numeric(mu, sigma) == pytest.approx(sigma**2 / 2, abs=1e-6)


def test_numeric_theil_stays_finite_for_wide_distributions():
    for sigma in (2.3474, 4.0, 6.0):
        value = policy.theil_index_numeric(0.0, sigma)
        assert np.isfinite(value)
        assert value == pytest.approx(sigma**2 / 2, rel=1e-8)


def test_single_country_ratio_is_the_median():
    assert policy.compute_R(0.0, 1.0, [1.0]) == pytest.approx(1.0, rel=1e-15)
    assert policy.compute_R(np.log(5.0), 1.0, [2.0]) == pytest.approx(2.5, rel=1e-14)


def test_compute_r_is_log_linear_in_mu(base_vector):
    mus = np.linspace(-2.0, 4.0, 7)
    logs = np.log([policy.compute_R(mu, 2.0, base_vector) for mu in mus])
    assert_allclose(np.diff(logs), np.diff(mus), rtol=1e-12)


def test_allocated_emissions_follow_the_ranking(base_vector):
    rng = np.random.default_rng(31)
    countries = tuple(f"K{i:03d}" for i in range(base_vector.size))
    reference = dist.sample(dist.lognormal(2.8, 2.3), base_vector.size, rng=rng)
    scenario = PolicyScenario(1990, 2021, 2030, countries, base_vector, countries, reference, 1.5053, 2.3474, 0.45)
    targets = policy.allocate_targets(scenario)
    allocated = np.array([t.r_i * t.reference_emissions for t in reversed(targets)])
    assert np.all(np.diff(allocated) >= 0)


def test_reference_equal_to_the_model_quantiles_allocates_one_everywhere(base_vector):
    n = base_vector.size
    countries = tuple(f"K{i:03d}" for i in range(n))
    reference = policy.lognormal_quantiles(1.2, 2.0, n)[::-1]
    scenario = PolicyScenario(1990, 2021, 2030, countries, base_vector, countries, reference, 1.2, 2.0, 0.45)
    targets = policy.allocate_targets(scenario)
    assert_allclose([t.r_i for t in targets], 1.0, rtol=1e-12)
    assert {t.group for t in targets} == {policy.MIDDLE}
