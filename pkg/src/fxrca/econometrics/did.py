"""Difference-in-differences and the surrounding event-study design.

Both estimators run on a year window around a shock year, absorb group
fixed effects through the within transformation (or run pooled when the
model spec has no fixed effect), and require the panel to carry `treat`
and `post` columns already assigned. The event study replaces the single
interaction with one treat-times-relative-year indicator per lead and
lag, omitting relative year -1 as the base period.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from fxrca.errors import ConfigError, IdentificationError, SchemaError
from fxrca.econometrics.base import ModelSpec, RegressionFit, ols, build_design, within_fe

if TYPE_CHECKING:
    from fxrca.data.panel import PanelDataset

__all__ = ["DidSpec", "EventStudyFit", "did_estimate", "event_study", "EVENT_HEADER"]

EVENT_HEADER = ("relative_year", "estimate", "ci_low", "ci_high")

TREAT_POST = "treat_post"


@dataclass(frozen=True)
class DidSpec:
    """Window, shock year, treatment threshold, and event-study depth."""

    window: tuple[int, int] = (2012, 2020)
    shock_year: int = 2016
    treat_threshold: float = 6.58
    leads: int = 4
    lags: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "window", tuple(self.window))
        start, end = self.window
        if start > end:
            raise ConfigError(f"window start {start} exceeds end {end}")
        if not start <= self.shock_year <= end:
            raise ConfigError(
                f"shock_year {self.shock_year} lies outside window {self.window}"
            )
        if self.leads < 1 or self.lags < 0:
            raise ConfigError("need at least one lead and a nonnegative lag count")


@dataclass(frozen=True)
class EventStudyFit:
    """Per-relative-year coefficients around the shock.

    The base period carries an exact zero with zero-width interval; every
    other relative year in [-leads, +lags] has an estimate, standard
    error, and confidence bounds taken from the underlying regression.
    """

    base_period: int
    relative_years: tuple[int, ...]
    estimates: dict[int, float]
    std_errors: dict[int, float]
    ci_low: dict[int, float]
    ci_high: dict[int, float]
    fit: RegressionFit

    def to_csv_rows(self):
        for rel in self.relative_years:
            yield (rel, self.estimates[rel], self.ci_low[rel], self.ci_high[rel])


def _window_frame(panel: "PanelDataset", did_spec: DidSpec):
    frame = panel.frame
    for column in ("treat", "post"):
        if column not in frame.columns:
            raise SchemaError(
                f"panel is missing the {column!r} column; assign treatment columns first"
            )
    start, end = did_spec.window
    inside = frame[(frame["year"] >= start) & (frame["year"] <= end)]
    if inside.empty:
        raise IdentificationError(f"no observations inside window {did_spec.window}")
    return inside


def did_estimate(panel: "PanelDataset", did_spec: DidSpec, spec: ModelSpec) -> RegressionFit:
    """Interaction estimator on the window: outcome on treat*post plus controls.

    Raises when the interaction is constant inside the window, since the
    design then has no identifying variation.
    """
    inside = _window_frame(panel, did_spec)
    inside = inside.assign(**{TREAT_POST: inside["treat"].to_numpy() * inside["post"].to_numpy()})
    interaction = inside[TREAT_POST].to_numpy(dtype=float)
    if np.all(interaction == interaction[0]):
        raise IdentificationError(
            "treat*post is constant within the window; the effect is not identified"
        )
    did_model = ModelSpec(
        outcome=spec.outcome,
        regressors=(TREAT_POST, *spec.regressors),
        fixed_effect=spec.fixed_effect,
        time_trend=spec.time_trend,
        se_type=spec.se_type,
        cluster=spec.cluster,
    )
    window_panel = panel.with_frame(inside)
    if did_model.fixed_effect is not None:
        fit = within_fe(window_panel, did_model)
    else:
        X, names = build_design(inside, did_model.regressors, did_model.time_trend, add_intercept=True)
        clusters = inside[did_model.cluster].to_numpy() if did_model.se_type == "cluster" else None
        fit = ols(
            inside[did_model.outcome].to_numpy(dtype=float),
            X,
            names,
            se_type=did_model.se_type,
            clusters=clusters,
        )
    fit.info.update({"window": list(did_spec.window), "shock_year": did_spec.shock_year})
    return RegressionFit(
        estimator="did",
        coefficients=fit.coefficients,
        std_errors=fit.std_errors,
        n_obs=fit.n_obs,
        df_resid=fit.df_resid,
        r_squared=fit.r_squared,
        log_likelihood=fit.log_likelihood,
        converged=fit.converged,
        info=fit.info,
    )


def _term(rel: int) -> str:
    return f"rel{rel:+d}"


def event_study(panel: "PanelDataset", did_spec: DidSpec, spec: ModelSpec) -> EventStudyFit:
    """Lead/lag coefficients of treat interacted with relative-year dummies.

    The window must cover every requested relative year; relative years
    with no observations, or with no treated observations, are reported
    together in the error message.
    """
    inside = _window_frame(panel, did_spec)
    start, end = did_spec.window
    rel_range = list(range(-did_spec.leads, did_spec.lags + 1))
    gaps = [
        rel
        for rel in rel_range
        if not start <= did_spec.shock_year + rel <= end
    ]
    if gaps:
        raise ConfigError(
            f"window {did_spec.window} does not cover relative year(s): "
            + ", ".join(str(g) for g in gaps)
        )
    rel_year = inside["year"].to_numpy() - did_spec.shock_year
    treat = inside["treat"].to_numpy(dtype=float)

    base = -1
    missing_rows = [rel for rel in rel_range if not np.any(rel_year == rel)]
    if missing_rows:
        raise IdentificationError(
            "no observations at relative year(s): " + ", ".join(map(str, missing_rows))
        )
    extra = {}
    dead = []
    for rel in rel_range:
        if rel == base:
            continue
        column = treat * (rel_year == rel)
        if not np.any(column != 0.0):
            dead.append(rel)
        extra[_term(rel)] = column
    if dead:
        raise IdentificationError(
            "no treated observations at relative year(s): " + ", ".join(map(str, dead))
        )

    inside = inside.assign(**extra)
    event_model = ModelSpec(
        outcome=spec.outcome,
        regressors=(*extra.keys(), *spec.regressors),
        fixed_effect=spec.fixed_effect,
        time_trend=spec.time_trend,
        se_type=spec.se_type,
        cluster=spec.cluster,
    )
    window_panel = panel.with_frame(inside)
    if event_model.fixed_effect is not None:
        fit = within_fe(window_panel, event_model)
    else:
        X, names = build_design(inside, event_model.regressors, event_model.time_trend, add_intercept=True)
        clusters = inside[event_model.cluster].to_numpy() if event_model.se_type == "cluster" else None
        fit = ols(
            inside[event_model.outcome].to_numpy(dtype=float),
            X,
            names,
            se_type=event_model.se_type,
            clusters=clusters,
        )

    estimates = {base: 0.0}
    std_errors = {base: 0.0}
    ci_low = {base: 0.0}
    ci_high = {base: 0.0}
    for rel in rel_range:
        if rel == base:
            continue
        term = _term(rel)
        estimates[rel] = fit.coefficients[term]
        std_errors[rel] = fit.std_errors[term]
        lo, hi = fit.conf_int(term)
        ci_low[rel], ci_high[rel] = lo, hi
    return EventStudyFit(
        base_period=base,
        relative_years=tuple(rel_range),
        estimates=estimates,
        std_errors=std_errors,
        ci_low=ci_low,
        ci_high=ci_high,
        fit=fit,
    )
