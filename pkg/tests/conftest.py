"""Shared fixtures.

The synthetic panels are session scoped: generation is cheap but the
same panels feed dozens of read-only tests, and a shared instance keeps
estimator cross-checks byte-comparable across files.
"""

import pytest

from fxrca.data import SynthConfig, synth_panel


@pytest.fixture(scope="session")
def default_synth():
    # exogenous design: national rate, known coefficients, no treatment effect
    return synth_panel(SynthConfig(seed=3))


@pytest.fixture(scope="session")
def default_panel(default_synth):
    return default_synth[0]


@pytest.fixture(scope="session")
def default_truth(default_synth):
    return default_synth[1]


@pytest.fixture(scope="session")
def exact_synth():
    # zero noise: the outcome is an exact linear function of the columns
    return synth_panel(SynthConfig(outcome_sd=0.0, province_sd=0.0, seed=5))


@pytest.fixture(scope="session")
def endog_synth():
    # only the rate matters, and the rate is endogenous at the unit level
    return synth_panel(
        SynthConfig(coefficients={"exrate": 0.1}, endogeneity_corr=0.6, seed=7)
    )


@pytest.fixture(scope="session")
def did_synth():
    return synth_panel(SynthConfig(tau_did=0.138, seed=9))
