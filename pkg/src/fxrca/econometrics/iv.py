"""Two-stage least squares with instrument-strength diagnostics.

The estimator supports a single endogenous regressor and one or more
excluded instruments. Second-stage standard errors use residuals formed
with the original endogenous regressor, per the usual 2SLS convention.

Diagnostics are computed after partialling the included exogenous
columns out of both the endogenous regressor and the instruments:

* Cragg-Donald F: the homoskedastic first-stage F statistic on the
  excluded instruments.
* Anderson LM: n times the squared canonical correlation between the
  partialled endogenous regressor and instruments (chi-squared, df = L).
* Rank-based Wald F and LM: the same two tests built on a robust
  (heteroskedasticity- or cluster-consistent) variance. Forcing the
  robust variance to its homoskedastic form reproduces the Cragg-Donald
  and Anderson statistics exactly, which is how the pairs are validated.

A first stage that fits perfectly drives the F statistics to infinity;
those are reported capped at F_CAP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import chi2

from fxrca.errors import CollinearityError, ComputationError, ConfigError
from fxrca.econometrics.base import RegressionFit, ols, solve_least_squares

__all__ = ["F_CAP", "IvDiagnostics", "two_sls", "iv_diagnostics"]

F_CAP = 1e12


@dataclass(frozen=True)
class IvDiagnostics:
    """Instrument relevance statistics plus the full first-stage fit."""

    anderson_lm: float
    anderson_lm_pvalue: float
    kp_rk_lm: float
    kp_rk_lm_pvalue: float
    cragg_donald_f: float
    kp_wald_rk_f: float
    first_stage: RegressionFit

    def to_json_dict(self) -> dict:
        return {
            "anderson_lm": self.anderson_lm,
            "anderson_lm_pvalue": self.anderson_lm_pvalue,
            "kp_rk_lm": self.kp_rk_lm,
            "kp_rk_lm_pvalue": self.kp_rk_lm_pvalue,
            "cragg_donald_f": self.cragg_donald_f,
            "kp_wald_rk_f": self.kp_wald_rk_f,
            "first_stage": self.first_stage.to_json_dict(),
        }


def _as_matrix(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ComputationError(f"{what} must be a vector or matrix")
    return arr


def _partial_out(W: np.ndarray, M: np.ndarray, names) -> np.ndarray:
    out = np.empty_like(M)
    for j in range(M.shape[1]):
        bj, _ = solve_least_squares(W, M[:, j], names)
        out[:, j] = M[:, j] - W @ bj
    return out


def iv_diagnostics(
    endog,
    instruments,
    exog,
    clusters=None,
    force_homoskedastic: bool = False,
    first_stage: RegressionFit | None = None,
) -> IvDiagnostics:
    """Instrument-strength diagnostics for a single endogenous regressor."""
    x = np.asarray(endog, dtype=float).ravel()
    Z = _as_matrix(instruments, "instruments")
    W = _as_matrix(exog, "exog")
    n = x.size
    L = Z.shape[1]
    k_w = W.shape[1]
    w_names = [f"w{j}" for j in range(k_w)]

    x_t = _partial_out(W, x[:, None], w_names)[:, 0]
    Z_t = _partial_out(W, Z, w_names)
    ztz = Z_t.T @ Z_t
    raw_scale = float(np.trace(Z.T @ Z)) / L
    if float(np.trace(ztz)) / L <= 1e-12 * max(raw_scale, np.finfo(float).eps):
        raise CollinearityError("instrument is collinear with the included exogenous columns")

    xtx = float(x_t @ x_t)
    if xtx <= 0.0:
        raise ComputationError("endogenous regressor has no variation after partialling")

    pi, ztz_inv = solve_least_squares(Z_t, x_t, [f"z{j}" for j in range(L)])
    u = x_t - Z_t @ pi
    ssr = float(u @ u)
    df_u = n - k_w - L
    if df_u <= 0:
        raise ComputationError("not enough observations for first-stage diagnostics")
    sigma2_u = ssr / df_u

    explained = xtx - ssr
    r2 = max(0.0, min(1.0, explained / xtx))
    anderson_lm = n * r2
    anderson_p = float(chi2.sf(anderson_lm, L))

    def meat_of(resid: np.ndarray, correction: float) -> np.ndarray:
        scores = Z_t * resid[:, None]
        if clusters is None:
            return (scores.T @ scores) * correction
        codes, _ = pd.factorize(np.asarray(clusters))
        n_groups = int(codes.max()) + 1
        m = np.zeros((L, L))
        for g in range(n_groups):
            sg = scores[codes == g].sum(axis=0)
            m += np.outer(sg, sg)
        return m * (n_groups / (n_groups - 1.0))

    if force_homoskedastic:
        meat_wald = sigma2_u * ztz
        meat_lm = (xtx / n) * ztz
    else:
        # Wald meat gets the HC1-style n/df factor; the LM meat uses the
        # null-restricted residuals (x_t itself) with no correction.
        meat_wald = meat_of(u, n / df_u)
        meat_lm = meat_of(x_t, 1.0)

    degenerate = ssr <= n * np.finfo(float).eps * xtx
    if degenerate:
        cragg_donald_f = F_CAP
        kp_wald_rk_f = F_CAP
    else:
        cragg_donald_f = min((explained / L) / sigma2_u, F_CAP)
        v_pi = ztz_inv @ meat_wald @ ztz_inv
        try:
            kp_wald_rk_f = min(float(pi @ np.linalg.solve(v_pi, pi)) / L, F_CAP)
        except np.linalg.LinAlgError:
            kp_wald_rk_f = F_CAP

    score = Z_t.T @ x_t
    try:
        kp_rk_lm = min(float(score @ np.linalg.solve(meat_lm, score)), F_CAP)
    except np.linalg.LinAlgError:
        kp_rk_lm = F_CAP
    kp_p = float(chi2.sf(kp_rk_lm, L))

    if first_stage is None:
        X1 = np.column_stack([Z, W])
        first_stage = ols(
            x,
            X1,
            [f"instrument_{j}" for j in range(L)] + w_names,
            estimator="first_stage",
        )

    return IvDiagnostics(
        anderson_lm=float(anderson_lm),
        anderson_lm_pvalue=anderson_p,
        kp_rk_lm=float(kp_rk_lm),
        kp_rk_lm_pvalue=kp_p,
        cragg_donald_f=float(cragg_donald_f),
        kp_wald_rk_f=float(kp_wald_rk_f),
        first_stage=first_stage,
    )


def two_sls(
    y,
    endog,
    instruments,
    exog,
    endog_name: str = "endog",
    instrument_names=None,
    exog_names=None,
    se_type: str = "homoskedastic",
    clusters=None,
) -> tuple[RegressionFit, IvDiagnostics]:
    """Two-stage least squares with one endogenous regressor.

    Returns the second-stage fit (coefficient order: endogenous regressor
    first, then the included exogenous columns) and the diagnostics
    bundle. When the instrument set equals the endogenous regressor the
    estimates collapse to OLS; in the just-identified case they equal the
    closed-form instrumental-variables solution.
    """
    y = np.asarray(y, dtype=float).ravel()
    x = np.asarray(endog, dtype=float)
    if x.ndim != 1:
        if x.ndim == 2 and x.shape[1] == 1:
            x = x[:, 0]
        else:
            raise ConfigError("only one endogenous regressor is supported")
    Z = _as_matrix(instruments, "instruments")
    W = _as_matrix(exog, "exog")
    n = y.size
    L = Z.shape[1]
    k_w = W.shape[1]
    if instrument_names is None:
        instrument_names = [f"instrument_{j}" for j in range(L)]
    if exog_names is None:
        exog_names = [f"exog_{j}" for j in range(k_w)]
    instrument_names = list(instrument_names)
    exog_names = list(exog_names)

    full_z = np.column_stack([Z, W])
    first_names = instrument_names + exog_names
    first_stage = ols(x, full_z, first_names, estimator="first_stage")
    b1 = np.array([first_stage.coefficients[name] for name in first_names])
    fitted = full_z @ b1

    X_hat = np.column_stack([fitted, W])
    names2 = [endog_name] + exog_names
    beta, xhx_inv = solve_least_squares(X_hat, y, names2)

    X_orig = np.column_stack([x, W])
    resid = y - X_orig @ beta
    ssr = float(resid @ resid)
    k = X_hat.shape[1]
    df = n - k
    if df <= 0:
        raise ComputationError(f"not enough observations: n={n}, parameters={k}")
    if se_type == "cluster":
        if clusters is None:
            raise ConfigError("cluster labels required for cluster-robust errors")
        codes, _ = pd.factorize(np.asarray(clusters))
        n_groups = int(codes.max()) + 1
        scores = X_hat * resid[:, None]
        meat = np.zeros((k, k))
        for g in range(n_groups):
            sg = scores[codes == g].sum(axis=0)
            meat += np.outer(sg, sg)
        correction = (n_groups / (n_groups - 1.0)) * ((n - 1.0) / df)
        cov = correction * xhx_inv @ meat @ xhx_inv
        df_infer = n_groups - 1
    else:
        cov = (ssr / df) * xhx_inv
        df_infer = df
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    centered = y - y.mean()
    sst = float(centered @ centered)
    fit = RegressionFit(
        estimator="two_sls",
        coefficients=dict(zip(names2, map(float, beta))),
        std_errors=dict(zip(names2, map(float, se))),
        n_obs=n,
        df_resid=df_infer,
        r_squared=1.0 - ssr / sst if sst > 0.0 else float("nan"),
        info={"ssr": ssr, "se_type": se_type, "n_instruments": L},
    )
    diagnostics = iv_diagnostics(
        x, Z, W, clusters=clusters if se_type == "cluster" else None, first_stage=first_stage
    )
    return fit, diagnostics
