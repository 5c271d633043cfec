"""Canned estimation batteries over a validated panel.

Each fit_* function wires one benchmark model: pooled least
squares, within fixed effects with a yearly trend, the lagged-rate
variant, a censored (tobit) fit with province indicators, the
volatility-split pair, and two-stage least squares on the lagged
instrument. `run_models` executes a requested subset and
`table_csv_text` lays the results out side by side, estimates starred at
the 10/5/1 percent levels with standard errors in a paired row.
"""

from __future__ import annotations

import numpy as np

from fxrca.errors import SchemaError
from fxrca.econometrics import (
    INTERCEPT,
    TREND,
    IvDiagnostics,
    ModelSpec,
    RegressionFit,
    build_design,
    lsdv_design,
    ols,
    significance_stars,
    split_by_threshold,
    tobit_mle,
    two_sls,
    within_fe,
)
from fxrca.data.panel import (
    CONTROL_COLUMNS,
    PanelDataset,
    add_exrate_features,
    build_instrument,
)

__all__ = [
    "MODEL_NAMES",
    "fit_ols",
    "fit_fe",
    "fit_lag",
    "fit_tobit",
    "fit_split",
    "fit_iv",
    "run_models",
    "table_csv_text",
    "fits_json_dict",
]

MODEL_NAMES = ("ols", "fe", "lag", "tobit", "split")

_OUTCOME = "rca"
_RATE = "exrate"


def _drop_missing_rows(panel: PanelDataset, columns) -> PanelDataset:
    frame = panel.frame
    keep = np.ones(len(frame), dtype=bool)
    for column in columns:
        keep &= ~frame[column].isna().to_numpy()
    return panel.with_frame(frame[keep])


def _ensure_features(panel: PanelDataset) -> PanelDataset:
    if "l_exrate" not in panel.frame.columns or "d_exrate" not in panel.frame.columns:
        return add_exrate_features(panel)
    return panel


def fit_ols(panel: PanelDataset, se_type: str = "homoskedastic") -> RegressionFit:
    """Pooled regression of the index on the rate and all controls."""
    frame = panel.frame
    X, names = build_design(frame, (_RATE, *CONTROL_COLUMNS), add_intercept=True)
    clusters = frame["province"].to_numpy() if se_type == "cluster" else None
    return ols(frame[_OUTCOME].to_numpy(dtype=float), X, names, se_type=se_type, clusters=clusters)


def fit_fe(panel: PanelDataset, se_type: str = "homoskedastic") -> RegressionFit:
    """Within estimator with province effects and a yearly trend."""
    spec = ModelSpec(
        outcome=_OUTCOME,
        regressors=(_RATE, *CONTROL_COLUMNS),
        fixed_effect="province",
        time_trend=True,
        se_type=se_type,
        cluster="province" if se_type == "cluster" else None,
    )
    return within_fe(panel, spec)


def fit_lag(panel: PanelDataset, se_type: str = "homoskedastic") -> RegressionFit:
    """Same as the within fit but with last year's rate as the regressor."""
    panel = _ensure_features(panel)
    panel = _drop_missing_rows(panel, ["l_exrate"])
    spec = ModelSpec(
        outcome=_OUTCOME,
        regressors=("l_exrate", *CONTROL_COLUMNS),
        fixed_effect="province",
        time_trend=True,
        se_type=se_type,
        cluster="province" if se_type == "cluster" else None,
    )
    return within_fe(panel, spec)


def fit_tobit(panel: PanelDataset, lower: float = 0.0, upper: float = 2.0) -> RegressionFit:
    """Censored fit with explicit province indicators.

    The outcome index is bounded below by zero, and values beyond two
    are conventionally truncated, hence the default limits. On a sample
    with no cells at the limits this reproduces least squares.
    """
    frame = panel.frame
    X, names = build_design(frame, (_RATE, *CONTROL_COLUMNS), add_intercept=True)
    dummies, dummy_names = lsdv_design(frame, "province", drop_first=True)
    X = np.column_stack([X, dummies])
    names = names + dummy_names
    return tobit_mle(
        frame[_OUTCOME].to_numpy(dtype=float), X, names, lower=lower, upper=upper
    )


def fit_split(
    panel: PanelDataset, threshold: float = 0.2, se_type: str = "homoskedastic"
) -> dict[str, RegressionFit]:
    """Within fits on the low- and high-volatility subsamples.

    Splitting is on the absolute year-over-year rate change; ties go to
    the low side.
    """
    panel = _ensure_features(panel)
    panel = _drop_missing_rows(panel, ["d_exrate"])
    low, high = split_by_threshold(panel, "d_exrate", threshold)
    spec = ModelSpec(
        outcome=_OUTCOME,
        regressors=("d_exrate", *CONTROL_COLUMNS),
        fixed_effect="province",
        time_trend=False,
        se_type=se_type,
        cluster="province" if se_type == "cluster" else None,
    )
    return {"split_low": within_fe(low, spec), "split_high": within_fe(high, spec)}


def fit_iv(
    panel: PanelDataset, se_type: str = "homoskedastic"
) -> tuple[RegressionFit, IvDiagnostics]:
    """Two-stage least squares: rate instrumented by the lagged tool.

    Province indicators, the trend, and all controls are included
    exogenous columns; rows without a lagged instrument (each province's
    first year) are dropped.
    """
    if "l_tool" not in panel.frame.columns:
        panel = build_instrument(panel)
    panel = _drop_missing_rows(panel, ["l_tool"])
    frame = panel.frame
    W, w_names = build_design(frame, CONTROL_COLUMNS, time_trend=True, add_intercept=True)
    dummies, dummy_names = lsdv_design(frame, "province", drop_first=True)
    W = np.column_stack([W, dummies])
    w_names = w_names + dummy_names
    clusters = frame["province"].to_numpy() if se_type == "cluster" else None
    return two_sls(
        frame[_OUTCOME].to_numpy(dtype=float),
        frame[_RATE].to_numpy(dtype=float),
        frame[["l_tool"]].to_numpy(dtype=float),
        W,
        endog_name=_RATE,
        instrument_names=["l_tool"],
        exog_names=w_names,
        se_type=se_type,
        clusters=clusters,
    )


def run_models(
    panel: PanelDataset,
    models,
    threshold: float = 0.2,
    lower: float = 0.0,
    upper: float = 2.0,
    se_type: str = "homoskedastic",
) -> dict[str, RegressionFit]:
    """Execute the requested battery, keyed by display column name."""
    fits: dict[str, RegressionFit] = {}
    for model in models:
        if model == "ols":
            fits["ols"] = fit_ols(panel, se_type=se_type)
        elif model == "fe":
            fits["fe"] = fit_fe(panel, se_type=se_type)
        elif model == "lag":
            fits["lag"] = fit_lag(panel, se_type=se_type)
        elif model == "tobit":
            fits["tobit"] = fit_tobit(panel, lower=lower, upper=upper)
        elif model == "split":
            fits.update(fit_split(panel, threshold=threshold, se_type=se_type))
        else:
            raise SchemaError(
                f"unknown model {model!r}; choose from {', '.join(MODEL_NAMES)}"
            )
    return fits


_TERM_ORDER = (INTERCEPT, _RATE, "l_exrate", "d_exrate", *CONTROL_COLUMNS, TREND, "sigma")


def _is_dummy(term: str) -> bool:
    return "[" in term and term.endswith("]")


def table_csv_text(fits: dict[str, RegressionFit]) -> str:
    """Side-by-side coefficient table as CSV text.

    Group-indicator coefficients are summarized by a yes/no row rather
    than listed; footer rows carry fit statistics.
    """
    columns = list(fits)
    terms_seen: list[str] = []
    for fit in fits.values():
        for term in fit.coefficients:
            if _is_dummy(term) or term in terms_seen:
                continue
            terms_seen.append(term)
    ordered = [t for t in _TERM_ORDER if t in terms_seen]
    ordered += [t for t in terms_seen if t not in ordered]

    lines = ["term," + ",".join(columns)]
    for term in ordered:
        est_cells, se_cells = [], []
        for name in columns:
            fit = fits[name]
            if term in fit.coefficients:
                stars = significance_stars(fit.p_value(term))
                est_cells.append(f"{fit.coefficients[term]:.4f}{stars}")
                se_cells.append(f"({fit.std_errors[term]:.4f})")
            else:
                est_cells.append("")
                se_cells.append("")
        lines.append(f"{term}," + ",".join(est_cells))
        lines.append("," + ",".join(se_cells))

    def footer(label: str, getter) -> None:
        lines.append(f"{label}," + ",".join(getter(fits[name]) for name in columns))

    footer(
        "province_fe",
        lambda f: "yes"
        if f.estimator == "within_fe" or any(_is_dummy(t) for t in f.coefficients)
        else "no",
    )
    footer("time_trend", lambda f: "yes" if TREND in f.coefficients else "no")
    footer("n_obs", lambda f: str(f.n_obs))
    footer(
        "r_squared",
        lambda f: "" if np.isnan(f.r_squared) else f"{f.r_squared:.4f}",
    )
    footer(
        "log_likelihood",
        lambda f: "" if f.log_likelihood is None else f"{f.log_likelihood:.4f}",
    )
    return "\n".join(lines) + "\n"


def fits_json_dict(fits: dict[str, RegressionFit]) -> dict:
    return {name: fit.to_json_dict() for name, fit in fits.items()}
