"""Least-squares core and the shared regression-fit record.

The solver uses a column-pivoted QR decomposition so rank deficiency is
detected exactly and the offending columns can be named. Standard errors
are homoskedastic by default; cluster-robust errors use the standard
sandwich with cluster-summed scores and the usual finite-sample factor
G/(G-1) * (n-1)/(n-k).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping

import numpy as np
import pandas as pd
from scipy.linalg import qr, solve_triangular
from scipy.stats import t as student_t

from fxrca.errors import (
    CollinearityError,
    ComputationError,
    ConfigError,
    DomainError,
    SchemaError,
)

if TYPE_CHECKING:  # structural only; estimators access panel.frame / panel.with_frame
    from fxrca.data.panel import PanelDataset

__all__ = [
    "TREND",
    "INTERCEPT",
    "SE_TYPES",
    "ModelSpec",
    "RegressionFit",
    "significance_stars",
    "solve_least_squares",
    "ols",
    "within_fe",
    "lsdv_design",
    "build_design",
    "drop_missing",
    "abs_first_difference",
    "split_by_threshold",
]

TREND = "trend"
INTERCEPT = "const"
SE_TYPES = ("homoskedastic", "cluster")


@dataclass(frozen=True)
class ModelSpec:
    """Names a regression on panel columns.

    ``regressors`` are column names; ``fixed_effect`` names the grouping
    column whose means are absorbed (None for pooled fits); ``time_trend``
    adds the year column as a linear trend regressor.
    """

    outcome: str
    regressors: tuple[str, ...]
    fixed_effect: str | None = None
    time_trend: bool = False
    se_type: str = "homoskedastic"
    cluster: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "regressors", tuple(self.regressors))
        if not self.regressors:
            raise ConfigError("at least one regressor is required")
        if len(set(self.regressors)) != len(self.regressors):
            raise ConfigError("duplicate regressor names in model spec")
        if self.se_type not in SE_TYPES:
            raise ConfigError(f"se_type must be one of {SE_TYPES}, got {self.se_type!r}")
        if self.se_type == "cluster" and not self.cluster:
            raise ConfigError("cluster column required when se_type='cluster'")


@dataclass(frozen=True)
class RegressionFit:
    """Coefficients with inference metadata, shared by every estimator."""

    estimator: str
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    n_obs: int
    df_resid: int
    r_squared: float
    log_likelihood: float | None = None
    converged: bool = True
    info: dict = field(default_factory=dict)

    @property
    def terms(self) -> tuple[str, ...]:
        return tuple(self.coefficients)

    def t_stat(self, name: str) -> float:
        se = self.std_errors[name]
        if se == 0.0:
            return float("nan")
        return self.coefficients[name] / se

    def p_value(self, name: str) -> float:
        stat = self.t_stat(name)
        if not np.isfinite(stat):
            return float("nan")
        return float(2.0 * student_t.sf(abs(stat), self.df_resid))

    def conf_int(self, name: str, level: float = 0.95) -> tuple[float, float]:
        crit = float(student_t.ppf(0.5 + level / 2.0, self.df_resid))
        est, se = self.coefficients[name], self.std_errors[name]
        return est - crit * se, est + crit * se

    def to_csv_rows(self):
        """Rows (term, estimate, std_error, stat, p_value)."""
        for name in self.terms:
            yield (
                name,
                self.coefficients[name],
                self.std_errors[name],
                self.t_stat(name),
                self.p_value(name),
            )

    def to_json_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "n_obs": self.n_obs,
            "df_resid": self.df_resid,
            "r_squared": None if np.isnan(self.r_squared) else self.r_squared,
            "log_likelihood": self.log_likelihood,
            "converged": self.converged,
            "coefficients": {
                name: {
                    "estimate": self.coefficients[name],
                    "std_error": self.std_errors[name],
                    "stat": _none_if_nan(self.t_stat(name)),
                    "p_value": _none_if_nan(self.p_value(name)),
                }
                for name in self.terms
            },
            "info": _jsonable(self.info),
        }


def _none_if_nan(value: float):
    return None if not np.isfinite(value) else float(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def significance_stars(p_value: float) -> str:
    """Stars at the 1, 5 and 10 percent levels."""
    if not np.isfinite(p_value):
        return ""
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.10:
        return "*"
    return ""


def solve_least_squares(X: np.ndarray, y: np.ndarray, names) -> tuple[np.ndarray, np.ndarray]:
    """Solve min ||y - Xb|| via pivoted QR; returns (beta, (X'X)^-1).

    Raises CollinearityError naming the pivoted-out columns when the
    design is rank deficient.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, k = X.shape
    if n != y.size:
        raise ComputationError(f"X has {n} rows but y has {y.size}")
    names = list(names)
    if len(names) != k:
        raise ComputationError(f"{k} columns but {len(names)} names")
    Q, R, piv = qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = max(n, k) * np.finfo(float).eps * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < k:
        offending = ", ".join(names[j] for j in piv[rank:])
        raise CollinearityError(f"design matrix is rank deficient; collinear column(s): {offending}")
    qty = Q.T @ y
    beta_pivoted = solve_triangular(R, qty)
    beta = np.empty(k)
    beta[piv] = beta_pivoted
    r_inv = solve_triangular(R, np.eye(k))
    xtx_inv = np.empty((k, k))
    xtx_inv[np.ix_(piv, piv)] = r_inv @ r_inv.T
    return beta, xtx_inv


def _cluster_cov(
    X: np.ndarray, resid: np.ndarray, xtx_inv: np.ndarray, clusters: np.ndarray, df_model: int
) -> tuple[np.ndarray, int]:
    codes, _ = pd.factorize(clusters)
    n_groups = int(codes.max()) + 1
    if n_groups < 2:
        raise ComputationError("cluster-robust errors need at least two clusters")
    n, k = X.shape
    scores = X * resid[:, None]
    meat = np.zeros((k, k))
    for g in range(n_groups):
        sg = scores[codes == g].sum(axis=0)
        meat += np.outer(sg, sg)
    correction = (n_groups / (n_groups - 1.0)) * ((n - 1.0) / (n - df_model))
    cov = correction * xtx_inv @ meat @ xtx_inv
    return cov, n_groups - 1


def ols(
    y,
    X,
    names,
    se_type: str = "homoskedastic",
    clusters=None,
    estimator: str = "ols",
    df_absorbed: int = 0,
) -> RegressionFit:
    """Ordinary least squares on an explicit design matrix.

    ``df_absorbed`` counts parameters estimated implicitly outside the
    design (absorbed group means in the within estimator), so the residual
    variance uses n - k - df_absorbed degrees of freedom.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    names = list(names)
    if se_type not in SE_TYPES:
        raise ConfigError(f"se_type must be one of {SE_TYPES}, got {se_type!r}")
    n, k = X.shape
    df = n - k - df_absorbed
    if df <= 0:
        raise ComputationError(
            f"not enough observations: n={n}, parameters={k + df_absorbed}"
        )
    beta, xtx_inv = solve_least_squares(X, y, names)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    centered = y - y.mean()
    sst = float(centered @ centered)
    r_squared = 1.0 - ssr / sst if sst > 0.0 else float("nan")
    if se_type == "cluster":
        if clusters is None:
            raise ConfigError("cluster labels required for cluster-robust errors")
        cov, df_infer = _cluster_cov(X, resid, xtx_inv, np.asarray(clusters), k + df_absorbed)
    else:
        sigma2 = ssr / df
        cov = sigma2 * xtx_inv
        df_infer = df
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return RegressionFit(
        estimator=estimator,
        coefficients=dict(zip(names, map(float, beta))),
        std_errors=dict(zip(names, map(float, se))),
        n_obs=n,
        df_resid=df_infer,
        r_squared=r_squared,
        info={"ssr": ssr, "se_type": se_type, "df_absorbed": df_absorbed},
    )


def drop_missing(frame: pd.DataFrame, columns) -> pd.DataFrame:
    """Rows where every named column is present; base columns never have gaps."""
    return frame.dropna(subset=list(columns))


def build_design(
    frame: pd.DataFrame,
    regressors,
    time_trend: bool = False,
    add_intercept: bool = False,
) -> tuple[np.ndarray, list[str]]:
    """Assemble a design matrix from panel columns, in a fixed column order."""
    names: list[str] = []
    cols: list[np.ndarray] = []
    if add_intercept:
        names.append(INTERCEPT)
        cols.append(np.ones(len(frame)))
    for name in regressors:
        if name not in frame.columns:
            raise SchemaError(f"model references unknown column {name!r}")
        cols.append(frame[name].to_numpy(dtype=float))
        names.append(name)
    if time_trend:
        cols.append(frame["year"].to_numpy(dtype=float))
        names.append(TREND)
    X = np.column_stack(cols) if cols else np.empty((len(frame), 0))
    return X, names


def within_fe(panel: "PanelDataset", spec: ModelSpec) -> RegressionFit:
    """Within (fixed-effects) estimator: group means absorbed by demeaning.

    Slopes coincide with the dummy-variable regression; the residual
    degrees of freedom subtract one per absorbed group so standard errors
    coincide as well. Groups with a single usable observation carry no
    within variation and are dropped with a warning. The reported
    r_squared is the within R-squared, computed on demeaned data.
    """
    if spec.fixed_effect is None:
        raise ConfigError("within_fe requires a fixed_effect column in the model spec")
    frame = panel.frame
    used = [spec.outcome, *spec.regressors, spec.fixed_effect]
    if spec.time_trend:
        used.append("year")
    if spec.se_type == "cluster":
        used.append(spec.cluster)
    for name in used:
        if name not in frame.columns:
            raise SchemaError(f"model references unknown column {name!r}")
    data = drop_missing(frame, dict.fromkeys(used))
    sizes = data.groupby(spec.fixed_effect)[spec.outcome].transform("size")
    singles = sorted(data.loc[sizes == 1, spec.fixed_effect].unique().tolist())
    if singles:
        warnings.warn(
            f"dropping {len(singles)} singleton group(s) with no within variation: "
            + ", ".join(map(str, singles)),
            stacklevel=2,
        )
        data = data[sizes > 1]
    if data.empty:
        raise ComputationError("no usable observations after dropping singleton groups")
    X, names = build_design(data, spec.regressors, time_trend=spec.time_trend)
    y = data[spec.outcome].to_numpy(dtype=float)
    groups = data[spec.fixed_effect]
    n_groups = groups.nunique()
    y_w = y - data.groupby(spec.fixed_effect)[spec.outcome].transform("mean").to_numpy()
    X_w = np.empty_like(X)
    for j in range(X.shape[1]):
        col = pd.Series(X[:, j], index=data.index)
        X_w[:, j] = (col - col.groupby(groups).transform("mean")).to_numpy()
    clusters = data[spec.cluster].to_numpy() if spec.se_type == "cluster" else None
    fit = ols(
        y_w,
        X_w,
        names,
        se_type=spec.se_type,
        clusters=clusters,
        estimator="within_fe",
        df_absorbed=n_groups,
    )
    fit.info.update(
        {"n_groups": int(n_groups), "dropped_singleton_groups": singles, "fixed_effect": spec.fixed_effect}
    )
    return fit


def lsdv_design(frame: pd.DataFrame, group_column: str, drop_first: bool = True) -> tuple[np.ndarray, list[str]]:
    """Group indicator columns for dummy-variable regressions."""
    levels = sorted(frame[group_column].unique().tolist())
    if drop_first:
        levels = levels[1:]
    values = frame[group_column].to_numpy()
    cols = [(values == level).astype(float) for level in levels]
    names = [f"{group_column}[{level}]" for level in levels]
    X = np.column_stack(cols) if cols else np.empty((len(frame), 0))
    return X, names


def abs_first_difference(series: Mapping[int, float]) -> dict[int, float]:
    """Absolute forward difference of a year-indexed series.

    The value at year t is ``|x[t+1] - x[t]|``; the final year has no
    forward neighbor and is absent from the result. Gaps in the year
    sequence are an error.
    """
    if not series:
        raise DomainError("empty series")
    years = sorted(series)
    for prev, nxt in zip(years, years[1:]):
        if nxt != prev + 1:
            raise DomainError(f"year gap between {prev} and {nxt}; series must be contiguous")
    return {year: abs(series[year + 1] - series[year]) for year in years[:-1]}


def split_by_threshold(panel: "PanelDataset", variable: str, threshold: float):
    """Partition panel rows by a variable: ties go to the 'below' side.

    Rows where the variable is missing belong to neither side and are
    dropped from both.
    """
    frame = panel.frame
    if variable not in frame.columns:
        raise SchemaError(f"unknown column {variable!r}")
    values = frame[variable]
    below = panel.with_frame(frame[values <= threshold])
    above = panel.with_frame(frame[values > threshold])
    return below, above
