"""Censored-normal likelihood: analytic pieces, gradient, and recovery."""

import math

import numpy as np
import pytest
from scipy.stats import norm

from fxrca.data import SynthConfig, synth_panel
from fxrca.econometrics import INTERCEPT, ols, tobit_mle, tobit_negll_grad
from fxrca.errors import ComputationError, ConfigError
from fxrca.workflows import fit_tobit


@pytest.fixture(scope="module")
def censored_synth():
    # clips roughly a sixth of the cells at each end
    return synth_panel(SynthConfig(censor_lower=1.1, censor_upper=1.4, seed=13))


def test_negll_matches_per_observation_terms():
    # one uncensored, one at the floor, one at the ceiling
    y = np.array([1.0, 0.0, 2.0])
    X = np.array([[1.0, 0.5], [1.0, -1.0], [1.0, 2.0]])
    theta = np.array([0.3, 0.4, math.log(0.7)])
    sigma = 0.7
    xb = X @ theta[:2]
    expected = (
        norm.logpdf(y[0], loc=xb[0], scale=sigma)
        + norm.logcdf((0.0 - xb[1]) / sigma)
        + norm.logcdf((xb[2] - 2.0) / sigma)
    )
    value, _ = tobit_negll_grad(theta, y, X, lower=0.0, upper=2.0)
    assert value == pytest.approx(-expected, rel=1e-12)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(31)
    n = 80
    X = np.column_stack([np.ones(n), rng.standard_normal((n, 2))])
    latent = X @ np.array([0.5, 0.8, -0.4]) + 0.6 * rng.standard_normal(n)
    y = np.clip(latent, -0.3, 1.2)
    theta = np.array([0.4, 0.7, -0.3, math.log(0.5)])

    _, grad = tobit_negll_grad(theta, y, X, lower=-0.3, upper=1.2)
    step = 1e-6
    for j in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[j] += step
        dn[j] -= step
        f_up, _ = tobit_negll_grad(up, y, X, lower=-0.3, upper=1.2)
        f_dn, _ = tobit_negll_grad(dn, y, X, lower=-0.3, upper=1.2)
        numeric = (f_up - f_dn) / (2.0 * step)
        assert grad[j] == pytest.approx(numeric, rel=1e-6, abs=1e-8)


def test_uncensored_sample_reproduces_least_squares():
    rng = np.random.default_rng(8)
    n = 150
    X = np.column_stack([np.ones(n), rng.standard_normal((n, 2))])
    y = X @ np.array([1.0, 0.5, -0.7]) + 0.3 * rng.standard_normal(n)
    names = [INTERCEPT, "a", "b"]
    fit = tobit_mle(y, X, names, lower=-100.0, upper=100.0)
    ref = ols(y, X, names)
    for name in names:
        assert fit.coefficients[name] == pytest.approx(ref.coefficients[name], abs=1e-4)
    # ML variance divides by n, not by residual degrees of freedom
    sigma_ml = math.sqrt(ref.info["ssr"] / n)
    assert fit.coefficients["sigma"] == pytest.approx(sigma_ml, rel=1e-3)
    assert fit.info["n_left_censored"] == 0
    assert fit.info["n_right_censored"] == 0
    assert fit.info["n_uncensored"] == n
    assert fit.info["se_type"] == "observed_information"
    assert fit.converged
    assert fit.estimator == "tobit"
    assert math.isnan(fit.r_squared)
    assert fit.df_resid == n - 4


def test_censored_panel_recovery(censored_synth):
    panel, truth = censored_synth
    assert truth.n_left_censored > 0
    assert truth.n_right_censored > 0
    fit = fit_tobit(panel, lower=1.1, upper=1.4)
    assert fit.converged
    assert fit.info["n_left_censored"] == truth.n_left_censored
    assert fit.info["n_right_censored"] == truth.n_right_censored
    est, se = fit.coefficients["exrate"], fit.std_errors["exrate"]
    assert abs(est - truth.coefficients["exrate"]) < 4.0 * se
    assert fit.std_errors["sigma"] > 0.0


def test_censored_fit_beats_naive_least_squares(censored_synth):
    # clipping shrinks the naive slope; the likelihood undoes it
    panel, truth = censored_synth
    frame = panel.frame
    X = np.column_stack([np.ones(len(frame)), frame["exrate"].to_numpy()])
    naive = ols(frame["rca"].to_numpy(), X, [INTERCEPT, "exrate"])
    fit = fit_tobit(panel, lower=1.1, upper=1.4)
    target = truth.coefficients["exrate"]
    assert abs(fit.coefficients["exrate"] - target) < abs(
        naive.coefficients["exrate"] - target
    )


def test_limit_ordering_is_checked():
    y = np.array([0.5, 0.6, 0.7, 0.8])
    X = np.ones((4, 1))
    with pytest.raises(ConfigError):
        tobit_mle(y, X, ["const"], lower=2.0, upper=1.0)
    with pytest.raises(ConfigError):
        tobit_mle(y, X, ["const"], lower=1.0, upper=1.0)


def test_fully_censored_sample_is_rejected():
    y = np.array([0.0, 0.0, 2.0, 2.0, 0.0, 2.0])
    X = np.column_stack([np.ones(6), np.arange(6.0)])
    with pytest.raises(ComputationError):
        tobit_mle(y, X, ["const", "x"], lower=0.0, upper=2.0)


def test_needs_spare_observations():
    with pytest.raises(ComputationError):
        tobit_mle(np.array([0.5, 0.6]), np.ones((2, 1)), ["const"])
