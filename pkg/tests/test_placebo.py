"""Year-block permutation placebo, plain and interaction modes."""

import numpy as np
import pytest

from fxrca.data import CONTROL_COLUMNS, assign_treat_post
from fxrca.econometrics import (
    DidSpec,
    ModelSpec,
    did_estimate,
    placebo_permutation,
    within_fe,
)
from fxrca.errors import DomainError

SPEC = ModelSpec(
    outcome="rca",
    regressors=("exrate", *CONTROL_COLUMNS),
    fixed_effect="province",
)


def test_plain_mode_flags_the_true_rate_effect(default_panel):
    result = placebo_permutation(default_panel, SPEC, target="exrate", n_draws=60, seed=4)
    assert result.n_draws == 60
    assert len(result.coefficients) == 60
    assert result.target == "exrate"
    # the real assignment should be more extreme than almost every shuffle
    assert result.p_value < 0.1

    observed = within_fe(default_panel, SPEC).coefficients["exrate"]
    assert result.observed_coefficient == observed

    null = np.asarray(result.coefficients)
    extreme = int(np.sum(np.abs(null) >= abs(observed)))
    assert result.p_value == (extreme + 1) / 61
    assert result.p_value > 0.0


def test_plain_mode_is_deterministic_and_seed_sensitive(default_panel):
    a = placebo_permutation(default_panel, SPEC, target="exrate", n_draws=25, seed=4)
    b = placebo_permutation(default_panel, SPEC, target="exrate", n_draws=25, seed=4)
    c = placebo_permutation(default_panel, SPEC, target="exrate", n_draws=25, seed=5)
    assert a == b
    assert a.coefficients != c.coefficients


def test_plain_mode_rejects_unit_level_targets(endog_synth):
    # the endogenous channel adds province-year noise, so the rate is no
    # longer a year-level column and block permutation is meaningless
    panel, _ = endog_synth
    with pytest.raises(DomainError, match="varies within year"):
        placebo_permutation(panel, SPEC, target="exrate", n_draws=5, seed=0)


def test_plain_mode_rejects_broken_panels(default_panel):
    with pytest.raises(DomainError):
        placebo_permutation(default_panel, SPEC, n_draws=0, seed=0)

    unbalanced = default_panel.with_frame(default_panel.frame.iloc[1:])
    with pytest.raises(DomainError, match="unbalanced"):
        placebo_permutation(unbalanced, SPEC, n_draws=5, seed=0)

    frame = default_panel.frame
    short = default_panel.with_frame(frame[frame["year"] <= 2009])
    with pytest.raises(DomainError, match="at least 3"):
        placebo_permutation(short, SPEC, n_draws=5, seed=0)


@pytest.fixture(scope="module")
def threshold_panel(default_panel):
    """Panel whose treatment is re-derived from the year-level rate."""
    base = default_panel.with_frame(
        default_panel.frame.drop(columns=["treat", "post", "relative_year"])
    )
    window = (2010, 2021)
    rates = base.frame.groupby("year")["exrate"].first()
    window_rates = [float(rates[y]) for y in rates.index if window[0] <= y <= window[1]]
    spec = DidSpec(
        window=window, shock_year=2016, treat_threshold=float(np.median(window_rates))
    )
    return assign_treat_post(base, spec), spec


def test_did_mode_permutes_treated_years(threshold_panel):
    panel, dspec = threshold_panel
    treat_by_year = panel.frame.groupby("year")["treat"].agg(["min", "max"])
    assert (treat_by_year["min"] == treat_by_year["max"]).all()

    result = placebo_permutation(panel, SPEC, n_draws=40, seed=2, did_spec=dspec)
    assert result.target == "treat_post"
    assert result.n_draws == 40
    assert 0.0 < result.p_value <= 1.0

    observed = did_estimate(panel, dspec, SPEC).coefficients["treat_post"]
    assert result.observed_coefficient == observed
    # no true interaction here, so the observed draw should look ordinary
    assert result.p_value > 0.05


def test_did_mode_requires_year_level_treatment(default_panel):
    # the generator assigns treatment by province, which varies within year
    with pytest.raises(DomainError, match="varies within year"):
        placebo_permutation(
            default_panel, SPEC, n_draws=5, seed=0, did_spec=DidSpec()
        )


def test_result_serialization(default_panel):
    result = placebo_permutation(default_panel, SPEC, target="exrate", n_draws=10, seed=1)
    payload = result.to_json_dict()
    assert payload["target"] == "exrate"
    assert payload["n_draws"] == 10
    assert payload["null_mean"] == pytest.approx(float(np.mean(result.coefficients)))
    assert payload["null_sd"] == pytest.approx(
        float(np.std(result.coefficients, ddof=1))
    )
