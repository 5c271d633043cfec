"""Rate process and competitiveness map: closed forms, recursions, config IO."""

import math

import numpy as np
import pytest

from fxrca.errors import ConfigError, DomainError
from fxrca.model import (
    CONFIG_KEYS,
    SimParams,
    derived_k,
    draw_cost_world,
    log_rca,
    optimal_export_price,
    policy_indicator,
    read_sim_config,
    simulate_path,
    step_rate,
    volatility_at,
    write_sim_config,
)


def test_derived_k_closed_form():
    # -eps * ln(eps / (eps - 1)), recomputed here from scratch
    assert math.isclose(derived_k(2.0), -2.0 * math.log(2.0), rel_tol=1e-15)
    assert derived_k(2.0) == pytest.approx(-1.3862943611198906, abs=1e-15)
    assert math.isclose(derived_k(3.0), -3.0 * math.log(1.5), rel_tol=1e-15)
    # large elasticity limit: -eps*ln(1 + 1/(eps-1)) -> -1
    assert math.isclose(derived_k(1e6), -1.0, abs_tol=1e-5)


def test_derived_k_is_log_of_markup_power():
    for eps in (1.5, 2.0, 4.0, 11.0):
        markup = eps / (eps - 1.0)
        assert math.isclose(math.exp(derived_k(eps)), markup**-eps, rel_tol=1e-12)


def test_derived_k_rejects_inelastic_demand():
    for eps in (1.0, 0.5, -2.0):
        with pytest.raises(DomainError):
            derived_k(eps)


def test_policy_indicator_switches_at_the_shock_period():
    assert policy_indicator(4, 5) == 0
    assert policy_indicator(5, 5) == 1
    assert policy_indicator(6, 5) == 1
    assert policy_indicator(0, 0) == 1


def test_volatility_damping():
    params = SimParams(init_vol=0.2, policy_gamma=1.5, shock_time=10)
    assert volatility_at(9, params) == 0.2
    assert math.isclose(volatility_at(10, params), 0.2 * math.exp(-1.5), rel_tol=1e-15)
    flat = SimParams(init_vol=0.2, policy_gamma=0.0, shock_time=10)
    assert volatility_at(10, flat) == volatility_at(0, flat) == 0.2


def test_step_rate_hand_value():
    params = SimParams(persistence=0.5, mean_log_rate=2.0, shock_time=300)
    assert step_rate(4.0, 1, params, 0.25) == pytest.approx(3.25, abs=1e-15)
    additive = SimParams(
        persistence=0.5, mean_log_rate=2.0, shock_time=1, additive_policy=True
    )
    assert step_rate(4.0, 0, additive, 0.25) == pytest.approx(3.25, abs=1e-15)
    assert step_rate(4.0, 1, additive, 0.25) == pytest.approx(4.25, abs=1e-15)


def test_simulate_path_matches_scalar_recursion():
    params = SimParams(
        total_time=40,
        shock_time=15,
        persistence=0.7,
        mean_log_rate=0.4,
        init_vol=0.2,
        policy_gamma=1.5,
    )
    path = simulate_path(params, seed=42)
    rng = np.random.default_rng(42)
    vols = np.array([volatility_at(t, params) for t in range(40)])
    draws = rng.standard_normal(39) * vols[1:]
    expected = np.empty(40)
    expected[0] = params.mean_log_rate
    for t in range(1, 40):
        expected[t] = step_rate(expected[t - 1], t, params, draws[t - 1])
    np.testing.assert_allclose(path.log_rates, expected, rtol=0, atol=1e-12)
    np.testing.assert_allclose(path.vols, vols, rtol=0, atol=0)
    assert path.policy.tolist() == [0] * 15 + [1] * 25


def test_simulate_path_burn_in_consumes_draws_first():
    params = SimParams(total_time=10, shock_time=5)
    path = simulate_path(params, seed=7, burn_in=3)
    rng = np.random.default_rng(7)
    x0 = 0.0
    for shock in rng.standard_normal(3) * params.init_vol:
        x0 = params.persistence * x0 + shock
    vols = np.array([volatility_at(t, params) for t in range(10)])
    draws = rng.standard_normal(9) * vols[1:]
    expected = np.empty(10)
    expected[0] = params.mean_log_rate + x0
    for t in range(1, 10):
        expected[t] = step_rate(expected[t - 1], t, params, draws[t - 1])
    np.testing.assert_allclose(path.log_rates, expected, rtol=0, atol=1e-12)


def test_simulate_path_deterministic_and_seed_sensitive():
    params = SimParams(total_time=50, shock_time=20)
    one = simulate_path(params, seed=9)
    two = simulate_path(params, seed=9)
    other = simulate_path(params, seed=10)
    np.testing.assert_array_equal(one.log_rates, two.log_rates)
    assert one.seed == 9
    assert not np.array_equal(one.log_rates, other.log_rates)
    with pytest.raises(ConfigError):
        simulate_path(params, seed=0, burn_in=-1)


def test_additive_policy_moves_the_level():
    # zero volatility makes the recursion deterministic
    params = SimParams(
        total_time=8,
        shock_time=4,
        init_vol=0.0,
        persistence=0.5,
        mean_log_rate=1.0,
        additive_policy=True,
    )
    path = simulate_path(params, seed=0)
    expected = np.empty(8)
    expected[0] = 1.0
    for t in range(1, 8):
        expected[t] = step_rate(expected[t - 1], t, params, 0.0)
    np.testing.assert_allclose(path.log_rates, expected, rtol=0, atol=1e-12)
    assert np.all(path.log_rates[:4] == 1.0)
    # the indicator keeps pushing the level toward mean + 1/(1-rho) = 3
    assert np.all(np.diff(path.log_rates[3:]) > 0)
    assert path.log_rates[-1] < 3.0


def test_policy_damping_shrinks_variance():
    params = SimParams(total_time=4000, shock_time=2000)
    path = simulate_path(params, seed=1, burn_in=400)
    pre = path.log_rates[:2000]
    post = path.log_rates[2400:]  # skip the regime transition
    assert np.var(post, ddof=1) < 0.1 * np.var(pre, ddof=1)


def test_draw_cost_world_is_affine_in_the_draws():
    params = SimParams(cost_level=0.8, cost_vol=0.05, world_index=0.02)
    mc, y_i = draw_cost_world(params, 2.0, -1.5)
    assert mc == pytest.approx(0.8 + 0.05 * 2.0, abs=1e-15)
    assert y_i == pytest.approx(0.02 * -1.5, abs=1e-15)


def test_log_rca_hand_value():
    params = SimParams(
        elasticity=2.0, foreign_log_price=0.02, world_log_export=1.2
    )
    point = log_rca(s=0.1, mc=0.3, y_i=0.05, params=params)
    expected = -2.0 * math.log(2.0) + (1.2 - 0.05) - 2.0 * (0.3 - 0.1 - 0.02)
    assert point.log_rca == pytest.approx(expected, abs=1e-15)
    assert point.rca == pytest.approx(math.exp(expected), rel=1e-15)
    assert point.draws.marginal_cost == 0.3
    assert point.draws.demand_index == 0.05


def test_log_rca_slopes_are_affine():
    params = SimParams(elasticity=3.0)
    base = log_rca(0.1, 0.4, 0.0, params).log_rca
    assert log_rca(0.1 + 1.0, 0.4, 0.0, params).log_rca - base == pytest.approx(
        3.0, abs=1e-12
    )
    assert log_rca(0.1, 0.4 + 1.0, 0.0, params).log_rca - base == pytest.approx(
        -3.0, abs=1e-12
    )
    assert log_rca(0.1, 0.4, 1.0, params).log_rca - base == pytest.approx(
        -1.0, abs=1e-12
    )


def test_optimal_export_price():
    assert optimal_export_price(3.0, 1.5, 2.0) == pytest.approx(4.0, abs=1e-15)
    with pytest.raises(DomainError):
        optimal_export_price(3.0, 1.5, 1.0)
    with pytest.raises(DomainError):
        optimal_export_price(0.0, 1.5, 2.0)
    with pytest.raises(DomainError):
        optimal_export_price(3.0, 0.0, 2.0)


def test_price_markup_agrees_with_derived_constant():
    # exp(-k/eps) is the markup the price rule applies
    for eps in (1.5, 2.0, 5.0):
        markup = optimal_export_price(1.0, 1.0, eps)
        assert math.isclose(math.exp(-derived_k(eps) / eps), markup, rel_tol=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"total_time": 0},
        {"total_time": -5},
        {"shock_time": -1},
        {"total_time": 100, "shock_time": 101},
        {"elasticity": 1.0},
        {"elasticity": 0.3},
        {"persistence": 0.0},
        {"persistence": 1.0},
        {"persistence": -0.2},
        {"init_vol": -0.1},
        {"policy_gamma": -1.0},
        {"world_index": -0.01},
        {"cost_vol": -0.5},
    ],
)
def test_sim_params_validation(kwargs):
    with pytest.raises(ConfigError):
        SimParams(**kwargs)


def test_sim_params_boundary_shock_times_are_legal():
    SimParams(total_time=10, shock_time=0)
    SimParams(total_time=10, shock_time=10)


def test_config_keys_cover_every_field():
    assert set(CONFIG_KEYS) == set(SimParams.__dataclass_fields__)


def test_config_round_trip(tmp_path):
    params = SimParams(
        total_time=123,
        shock_time=45,
        elasticity=2.5,
        persistence=0.77,
        mean_log_rate=-0.3,
        init_vol=0.07,
        policy_gamma=1.25,
        world_index=0.04,
        cost_level=0.9,
        cost_vol=0.06,
        foreign_log_price=0.01,
        world_log_export=1.1,
        additive_policy=True,
    )
    path = tmp_path / "params.cfg"
    write_sim_config(params, path)
    assert read_sim_config(path) == params


def test_config_reader_tolerates_comments_and_defaults(tmp_path):
    path = tmp_path / "sparse.cfg"
    path.write_text(
        "# comment line\n\ntotal_time = 77\nshock_time = 40\n"
        "additive_policy = 1  # inline\n",
        encoding="utf-8",
    )
    params = read_sim_config(path)
    assert params.total_time == 77
    assert params.shock_time == 40
    assert params.additive_policy is True
    assert params.elasticity == SimParams().elasticity


@pytest.mark.parametrize(
    "text",
    [
        "unknown_key = 3\n",
        "total_time = 77\ntotal_time = 78\n",
        "total_time = many\n",
        "elasticity 2.0\n",
        "additive_policy = maybe\n",
    ],
)
def test_config_reader_rejects_malformed_lines(tmp_path, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        read_sim_config(path)
