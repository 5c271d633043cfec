"""Two-stage least squares and instrument-strength diagnostics."""

import numpy as np
import pytest

from fxrca.econometrics import iv_diagnostics, ols, two_sls
from fxrca.errors import CollinearityError, ConfigError
from fxrca.workflows import fit_fe, fit_iv


def _toy_system(seed, n=120, pi=1.0):
    rng = np.random.default_rng(seed)
    W = np.column_stack([np.ones(n), rng.standard_normal(n)])
    z = rng.standard_normal(n)
    x = pi * z + 0.4 * W[:, 1] + 0.8 * rng.standard_normal(n)
    y = 0.5 * x + W @ np.array([0.2, -0.3]) + rng.standard_normal(n)
    return y, x, z, W


def test_instrumenting_with_the_regressor_reproduces_ols():
    y, x, _, W = _toy_system(3)
    fit, diag = two_sls(y, x, x, W, endog_name="x", exog_names=["const", "w"])
    ref = ols(y, np.column_stack([x, W]), ["x", "const", "w"])
    for name in ("x", "const", "w"):
        assert fit.coefficients[name] == pytest.approx(ref.coefficients[name], abs=1e-10)
        assert fit.std_errors[name] == pytest.approx(ref.std_errors[name], abs=1e-10)
    assert fit.estimator == "two_sls"
    assert fit.info["n_instruments"] == 1
    # the first stage is exact, so relevance statistics hit the cap
    assert diag.cragg_donald_f == 1e12
    assert diag.kp_wald_rk_f == 1e12


def test_just_identified_fit_matches_closed_form():
    y, x, z, W = _toy_system(4)
    fit, _ = two_sls(y, x, z, W, endog_name="x", exog_names=["const", "w"])
    Z_full = np.column_stack([z, W])
    X_full = np.column_stack([x, W])
    closed = np.linalg.solve(Z_full.T @ X_full, Z_full.T @ y)
    for got, want in zip((fit.coefficients[c] for c in ("x", "const", "w")), closed):
        assert got == pytest.approx(want, abs=1e-10)


def test_forced_homoskedastic_variance_reproduces_classical_statistics():
    rng = np.random.default_rng(5)
    n = 150
    W = np.column_stack([np.ones(n), rng.standard_normal(n)])
    Z = rng.standard_normal((n, 2))
    x = Z @ np.array([0.7, -0.4]) + 0.5 * W[:, 1] + rng.standard_normal(n)
    diag = iv_diagnostics(x, Z, W, force_homoskedastic=True)
    assert diag.kp_rk_lm == pytest.approx(diag.anderson_lm, rel=1e-10)
    assert diag.kp_wald_rk_f == pytest.approx(diag.cragg_donald_f, rel=1e-10)


def test_single_instrument_f_is_the_first_stage_t_squared():
    y, x, z, W = _toy_system(6)
    diag = iv_diagnostics(x, z, W)
    t = diag.first_stage.t_stat("instrument_0")
    assert diag.cragg_donald_f == pytest.approx(t * t, rel=1e-10)

    # independent recomputation after partialling out the exogenous block
    def resid_on(M, v):
        return v - M @ np.linalg.lstsq(M, v, rcond=None)[0]

    x_t = resid_on(W, x)
    z_t = resid_on(W, z)
    pi_hat = float(z_t @ x_t) / float(z_t @ z_t)
    u = x_t - pi_hat * z_t
    sigma2 = float(u @ u) / (len(x) - W.shape[1] - 1)
    explained = float(x_t @ x_t) - float(u @ u)
    assert diag.cragg_donald_f == pytest.approx(explained / sigma2, rel=1e-10)
    assert diag.anderson_lm == pytest.approx(
        len(x) * explained / float(x_t @ x_t), rel=1e-10
    )


def test_noise_instrument_reads_as_weak():
    rng = np.random.default_rng(9)
    n = 200
    W = np.column_stack([np.ones(n), rng.standard_normal(n)])
    x = 0.5 * W[:, 1] + rng.standard_normal(n)
    z = rng.standard_normal(n)
    diag = iv_diagnostics(x, z, W)
    assert diag.cragg_donald_f < 10.0
    assert diag.anderson_lm_pvalue > 0.001


def test_instrument_inside_the_exogenous_span_is_rejected():
    rng = np.random.default_rng(10)
    n = 80
    W = np.column_stack([np.ones(n), rng.standard_normal(n)])
    x = W[:, 1] + rng.standard_normal(n)
    z = 2.0 * W[:, 1] - 3.0
    with pytest.raises(CollinearityError):
        iv_diagnostics(x, z, W)


def test_multiple_endogenous_columns_are_rejected():
    y, x, z, W = _toy_system(11)
    with pytest.raises(ConfigError):
        two_sls(y, np.column_stack([x, x]), z, W)


def test_endogenous_panel_is_rescued_by_the_lagged_instrument(endog_synth):
    panel, truth = endog_synth
    target = truth.coefficients["exrate"]
    assert target == 0.1

    biased = fit_fe(panel)
    assert abs(biased.coefficients["exrate"] - target) > 5.0 * biased.std_errors["exrate"]

    fit, diag = fit_iv(panel)
    est, se = fit.coefficients["exrate"], fit.std_errors["exrate"]
    assert abs(est - target) < 4.0 * se
    assert diag.cragg_donald_f > 10.0
    assert fit.n_obs == 420
    assert fit.info["n_instruments"] == 1


def test_rebuilt_instrument_loses_each_provinces_first_year(endog_synth):
    panel, _ = endog_synth
    stripped = panel.with_frame(panel.frame.drop(columns=["tool", "l_tool"]))
    fit, _ = fit_iv(stripped)
    assert fit.n_obs == 390


def test_diagnostics_serialize():
    y, x, z, W = _toy_system(12)
    _, diag = two_sls(y, x, z, W)
    payload = diag.to_json_dict()
    assert set(payload) == {
        "anderson_lm",
        "anderson_lm_pvalue",
        "kp_rk_lm",
        "kp_rk_lm_pvalue",
        "cragg_donald_f",
        "kp_wald_rk_f",
        "first_stage",
    }
    assert payload["first_stage"]["estimator"] == "first_stage"
