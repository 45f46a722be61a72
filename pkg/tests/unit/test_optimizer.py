"""Tests for the B, alpha and eta grid searches."""

import pytest

from mlbgg.core.exceptions import EmptyGridError
from mlbgg.optimization.optimizer import (
    layer0_for_eta,
    optimize_alpha,
    optimize_backup,
    optimize_eta,
)
from tests.fixtures.scenarios import scenario_dict, small_scenario


def _with_costs(**costs):
    base = scenario_dict()["costs"]
    return small_scenario(n_trials=100, costs={**base, **costs})


class TestOptimizeBackup:
    def test_curve_spans_range_and_argmin_is_first_minimum(self, scenario):
        result = optimize_backup(scenario, n_trials=100)
        costs = result.curve.costs

        assert result.curve.values == list(range(0, 11))
        assert result.b_star == costs.index(min(costs))
        assert result.n_trials == 100
        assert 0.0 <= result.rho1 <= 1.0

    def test_burst_rate_nonincreasing_in_backup(self, scenario):
        rates = [p.burst_rate for p in optimize_backup(scenario, n_trials=100).curve.points]

        assert all(b <= a for a, b in zip(rates, rates[1:]))

    def test_free_backups_never_raise_cost(self):
        result = optimize_backup(_with_costs(backup_unit_cost=0.0))
        costs = result.curve.costs

        assert all(b <= a for a, b in zip(costs, costs[1:]))
        assert result.curve.argmin().mean_cost == costs[-1]

    def test_worthless_network_needs_no_backups(self):
        result = optimize_backup(_with_costs(network_value=1e-9))

        assert result.b_star == 0

    def test_explicit_range(self, scenario):
        result = optimize_backup(scenario, b_range=(2, 4), n_trials=50)

        assert result.curve.values == [2, 3, 4]
        assert 2 <= result.b_star <= 4

    def test_empty_range(self, scenario):
        with pytest.raises(EmptyGridError):
            optimize_backup(scenario, b_range=(3, 2))

    def test_seed_override_is_recorded(self, scenario):
        assert optimize_backup(scenario, n_trials=20, seed=99).seed == 99

    def test_same_seed_same_curve(self, scenario):
        a = optimize_backup(scenario, n_trials=60)
        b = optimize_backup(scenario, n_trials=60)

        assert a.curve == b.curve


class TestOptimizeAlpha:
    def test_alpha_star_never_exceeds_rho1(self, scenario):
        result = optimize_alpha(scenario, n_trials=100)

        assert [s.eta for s in result.sweeps] == [5, 11]
        for sweep in result.sweeps:
            assert sweep.alpha_star <= result.rho1
            expected = result.rho1 if sweep.alpha0 is None else min(result.rho1, sweep.alpha0)
            assert sweep.alpha_star == expected

    def test_free_alliance_pays_at_first_positive_alpha(self):
        result = optimize_alpha(_with_costs(alliance_unit_cost=0.0))

        for sweep in result.sweeps:
            assert sweep.alpha0 == 0.1

    def test_expensive_alliance_falls_back_to_rho1(self):
        result = optimize_alpha(_with_costs(alliance_unit_cost=1e9))

        for sweep in result.sweeps:
            assert sweep.alpha0 is None
            assert sweep.alpha_star == result.rho1

    def test_given_rho1_is_used(self, scenario):
        result = optimize_alpha(scenario, n_trials=50, rho1=0.05)

        assert result.rho1 == 0.05
        assert all(s.alpha_star <= 0.05 for s in result.sweeps)

    def test_burst_rate_nonincreasing_in_alpha(self, scenario):
        sweep = optimize_alpha(scenario, n_trials=100).for_eta(11)
        rates = [p.burst_rate for p in sweep.curve.points]

        assert all(b <= a for a, b in zip(rates, rates[1:]))
        assert rates[0] == pytest.approx(sweep.r0)

    def test_spread_and_lookup(self, scenario):
        result = optimize_alpha(scenario, n_trials=50)
        stars = [s.alpha_star for s in result.sweeps]

        assert result.alpha_star_spread == max(stars) - min(stars)
        with pytest.raises(KeyError):
            result.for_eta(7)

    def test_empty_grid(self, scenario):
        with pytest.raises(EmptyGridError):
            optimize_alpha(scenario, alpha_grid=[], rho1=0.5)


class TestOptimizeEta:
    def test_eta_star_is_smaller_optimum(self, scenario):
        result = optimize_eta(scenario, n_trials=100)

        assert result.eta_star == min(result.eta1, result.eta0)
        assert result.layer1_curve.values == [5, 11]
        assert result.layer0_curve.values == [5, 11]

    def test_singleton_grid(self, scenario):
        result = optimize_eta(scenario, eta_grid=[5], n_trials=40)

        assert (result.eta1, result.eta0, result.eta_star) == (5, 5, 5)

    def test_empty_grid(self, scenario):
        with pytest.raises(EmptyGridError):
            optimize_eta(scenario, eta_grid=[])


class TestLayer0ForEta:
    def test_rates_fixed_by_default(self, scenario):
        cfg = layer0_for_eta(scenario, 22)

        assert cfg.eta == 22
        assert cfg.lambda_corrupted == scenario.layer0.lambda_corrupted

    def test_rates_scaled_when_configured(self):
        document = scenario_dict()
        document["sweep"] = {**document["sweep"], "scale_rates_with_eta": True}
        scenario = small_scenario(sweep=document["sweep"])

        cfg = layer0_for_eta(scenario, 22)

        assert cfg.lambda_corrupted == pytest.approx(2.0)
        assert cfg.lambda_genuine == pytest.approx(2.0)
        assert cfg.alpha == scenario.layer0.alpha
