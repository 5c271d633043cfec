"""Permutation placebo for panel regressions with a year-level regressor.

The variable of interest varies only by year, so independent row-level
shuffles would destroy the panel's dependence structure and overstate
significance. Instead whole year blocks are permuted: the mapping from
year to value is shuffled and reapplied to every province in that year,
preserving the cross-sectional layout of each draw.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from fxrca.errors import DomainError
from fxrca.econometrics.base import ModelSpec, ols, build_design, within_fe
from fxrca.econometrics.did import DidSpec, TREAT_POST, did_estimate

if TYPE_CHECKING:
    from fxrca.data.panel import PanelDataset

__all__ = ["PlaceboResult", "placebo_permutation"]


@dataclass(frozen=True)
class PlaceboResult:
    """Null distribution of the target coefficient under year permutations."""

    coefficients: tuple[float, ...]
    observed_coefficient: float
    p_value: float
    n_draws: int
    seed: int
    target: str

    def to_json_dict(self) -> dict:
        return {
            "target": self.target,
            "observed_coefficient": self.observed_coefficient,
            "p_value": self.p_value,
            "n_draws": self.n_draws,
            "seed": self.seed,
            "null_mean": float(np.mean(self.coefficients)),
            "null_sd": float(np.std(self.coefficients, ddof=1)),
        }


def _year_value_map(frame, column: str) -> dict[int, float]:
    grouped = frame.groupby("year")[column]
    spans = grouped.agg(lambda s: float(s.max() - s.min()))
    if (spans > 0).any():
        bad = [int(y) for y, v in spans.items() if v > 0]
        raise DomainError(
            f"{column!r} varies within year(s) {bad}; year-block permutation "
            "needs a year-level variable"
        )
    return {int(y): float(v) for y, v in grouped.first().items()}


def _fit_coefficient(panel: "PanelDataset", spec: ModelSpec, term: str) -> float:
    frame = panel.frame
    if spec.fixed_effect is not None:
        fit = within_fe(panel, spec)
    else:
        X, names = build_design(frame, spec.regressors, spec.time_trend, add_intercept=True)
        clusters = frame[spec.cluster].to_numpy() if spec.se_type == "cluster" else None
        fit = ols(
            frame[spec.outcome].to_numpy(dtype=float),
            X,
            names,
            se_type=spec.se_type,
            clusters=clusters,
        )
    return fit.coefficients[term]


def placebo_permutation(
    panel: "PanelDataset",
    spec: ModelSpec,
    target: str = "exrate",
    n_draws: int = 500,
    seed: int = 0,
    did_spec: DidSpec | None = None,
) -> PlaceboResult:
    """Re-estimate under shuffled year blocks and report a two-sided p-value.

    In the plain mode `target` must be a year-level column appearing in the
    model; each draw permutes its year-to-value map. When `did_spec` is
    given the treatment assignment is permuted instead: the set of treated
    years (from the threshold rule applied to the observed year means) is
    reassigned to a random subset of years of equal size, and the
    interaction model is re-fit on the window.

    The p-value counts null draws at least as extreme in absolute value as
    the observed coefficient, with the observed draw included (the add-one
    permutation convention), so it is never exactly zero.
    """
    if n_draws < 1:
        raise DomainError("n_draws must be at least 1")
    frame = panel.frame
    years = np.sort(frame["year"].unique())
    if len(years) < 3:
        raise DomainError(
            f"only {len(years)} distinct years; permutation needs at least 3"
        )
    counts = frame.groupby("year").size()
    if counts.nunique() != 1:
        raise DomainError("panel is unbalanced across years; cannot permute year blocks")

    rng = np.random.default_rng(seed)

    if did_spec is None:
        year_map = _year_value_map(frame, target)
        observed = _fit_coefficient(panel, spec, target)
        values = np.array([year_map[int(y)] for y in years])
        draws = []
        for _ in range(n_draws):
            shuffled = values[rng.permutation(len(values))]
            remap = dict(zip((int(y) for y in years), shuffled))
            new_col = frame["year"].map(remap).to_numpy(dtype=float)
            shuffled_panel = panel.with_frame(frame.assign(**{target: new_col}))
            draws.append(_fit_coefficient(shuffled_panel, spec, target))
    else:
        start, end = did_spec.window
        inside_years = [int(y) for y in years if start <= y <= end]
        if len(inside_years) < 3:
            raise DomainError(
                f"only {len(inside_years)} window years; permutation needs at least 3"
            )
        treat_map = _year_value_map(frame, "treat")
        observed_fit = did_estimate(panel, did_spec, spec)
        observed = observed_fit.coefficients[TREAT_POST]
        treated_years = [y for y in inside_years if treat_map[y] > 0]
        n_treated = len(treated_years)
        if n_treated == 0 or n_treated == len(inside_years):
            raise DomainError(
                "every window year shares one treatment status; nothing to permute"
            )
        draws = []
        for _ in range(n_draws):
            chosen = rng.choice(len(inside_years), size=n_treated, replace=False)
            chosen_years = {inside_years[i] for i in chosen}
            new_treat = frame["year"].map(lambda y: 1.0 if int(y) in chosen_years else 0.0)
            shuffled_panel = panel.with_frame(frame.assign(treat=new_treat.to_numpy(dtype=float)))
            fit = did_estimate(shuffled_panel, did_spec, spec)
            draws.append(fit.coefficients[TREAT_POST])
        target = TREAT_POST

    null = np.asarray(draws, dtype=float)
    extreme = int(np.sum(np.abs(null) >= abs(observed)))
    p_value = (extreme + 1) / (n_draws + 1)
    return PlaceboResult(
        coefficients=tuple(float(c) for c in null),
        observed_coefficient=float(observed),
        p_value=float(p_value),
        n_draws=n_draws,
        seed=seed,
        target=target,
    )
