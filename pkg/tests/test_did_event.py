"""Interaction estimator and the lead/lag design around the shock year."""

import numpy as np
import pytest

from fxrca.data import CONTROL_COLUMNS, SynthConfig, synth_panel
from fxrca.econometrics import DidSpec, ModelSpec, did_estimate, event_study
from fxrca.econometrics.did import EVENT_HEADER
from fxrca.errors import ConfigError, IdentificationError, SchemaError

SPEC = ModelSpec(
    outcome="rca",
    regressors=("exrate", *CONTROL_COLUMNS),
    fixed_effect="province",
)


@pytest.fixture(scope="module")
def exact_did():
    # zero noise with a known interaction effect: estimates must be exact
    return synth_panel(
        SynthConfig(outcome_sd=0.0, province_sd=0.0, tau_did=0.2, seed=21)
    )


def test_did_spec_validation():
    with pytest.raises(ConfigError):
        DidSpec(window=(2020, 2012))
    with pytest.raises(ConfigError):
        DidSpec(window=(2012, 2020), shock_year=2021)
    with pytest.raises(ConfigError):
        DidSpec(leads=0)
    with pytest.raises(ConfigError):
        DidSpec(lags=-1)


def test_noiseless_interaction_is_recovered_exactly(exact_did):
    panel, truth = exact_did
    fit = did_estimate(panel, DidSpec(), SPEC)
    assert fit.estimator == "did"
    assert fit.coefficients["treat_post"] == pytest.approx(truth.tau_did, abs=1e-10)
    assert fit.info["window"] == [2012, 2020]
    assert fit.info["shock_year"] == 2016


def test_noiseless_event_study_is_exact(exact_did):
    panel, truth = exact_did
    result = event_study(panel, DidSpec(), SPEC)
    assert result.base_period == -1
    assert result.relative_years == tuple(range(-4, 5))
    assert result.estimates[-1] == 0.0
    assert result.std_errors[-1] == 0.0
    assert result.ci_low[-1] == 0.0 and result.ci_high[-1] == 0.0
    for rel in (-4, -3, -2):
        assert result.estimates[rel] == pytest.approx(0.0, abs=1e-10)
    for rel in range(0, 5):
        assert result.estimates[rel] == pytest.approx(truth.tau_did, abs=1e-10)


def test_noisy_interaction_is_within_sampling_error(did_synth):
    panel, truth = did_synth
    fit = did_estimate(panel, DidSpec(), SPEC)
    est, se = fit.coefficients["treat_post"], fit.std_errors["treat_post"]
    assert se > 0.0
    assert abs(est - truth.tau_did) < 4.0 * se


def test_noisy_event_study_tracks_the_step(did_synth):
    panel, truth = did_synth
    result = event_study(panel, DidSpec(), SPEC)
    for rel in (-4, -3, -2):
        assert abs(result.estimates[rel]) < 4.0 * result.std_errors[rel]
    for rel in range(0, 5):
        assert abs(result.estimates[rel] - truth.tau_did) < 4.0 * result.std_errors[rel]
    rows = list(result.to_csv_rows())
    assert len(rows) == 9
    assert rows[0][0] == -4
    assert EVENT_HEADER == ("relative_year", "estimate", "ci_low", "ci_high")
    for (rel, est, lo, hi) in rows:
        assert lo <= est <= hi


def test_constant_interaction_is_not_identified(did_synth):
    panel, _ = did_synth
    zeroed = panel.with_frame(panel.frame.assign(treat=0.0))
    with pytest.raises(IdentificationError):
        did_estimate(zeroed, DidSpec(), SPEC)


def test_window_without_observations(did_synth):
    panel, _ = did_synth
    early = panel.with_frame(panel.frame[panel.frame["year"] <= 2010])
    with pytest.raises(IdentificationError):
        did_estimate(early, DidSpec(window=(2012, 2014), shock_year=2013), SPEC)


def test_missing_assignment_columns(did_synth):
    panel, _ = did_synth
    for column in ("treat", "post"):
        stripped = panel.with_frame(panel.frame.drop(columns=[column]))
        with pytest.raises(SchemaError):
            did_estimate(stripped, DidSpec(), SPEC)


def test_event_window_must_cover_every_relative_year(did_synth):
    panel, _ = did_synth
    with pytest.raises(ConfigError) as exc_info:
        event_study(panel, DidSpec(window=(2014, 2018), shock_year=2016), SPEC)
    assert "-4" in str(exc_info.value)


def test_event_needs_rows_at_every_relative_year(did_synth):
    panel, _ = did_synth
    gapped = panel.with_frame(panel.frame[panel.frame["year"] != 2014])
    with pytest.raises(IdentificationError, match="no observations"):
        event_study(gapped, DidSpec(), SPEC)


def test_event_needs_treated_rows_at_every_relative_year(did_synth):
    panel, _ = did_synth
    frame = panel.frame.copy()
    frame.loc[frame["year"] == 2018, "treat"] = 0.0
    with pytest.raises(IdentificationError, match="no treated"):
        event_study(panel.with_frame(frame), DidSpec(), SPEC)
