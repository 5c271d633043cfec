"""Estimators: OLS, within fixed effects, Tobit, 2SLS, DID, event study, placebo."""

from fxrca.econometrics.base import (
    INTERCEPT,
    TREND,
    ModelSpec,
    RegressionFit,
    abs_first_difference,
    build_design,
    lsdv_design,
    ols,
    significance_stars,
    solve_least_squares,
    split_by_threshold,
    within_fe,
)
from fxrca.econometrics.did import DidSpec, EventStudyFit, did_estimate, event_study
from fxrca.econometrics.iv import IvDiagnostics, iv_diagnostics, two_sls
from fxrca.econometrics.placebo import PlaceboResult, placebo_permutation
from fxrca.econometrics.tobit import tobit_mle, tobit_negll_grad

__all__ = [
    "INTERCEPT",
    "TREND",
    "ModelSpec",
    "RegressionFit",
    "abs_first_difference",
    "build_design",
    "lsdv_design",
    "ols",
    "significance_stars",
    "solve_least_squares",
    "split_by_threshold",
    "within_fe",
    "DidSpec",
    "EventStudyFit",
    "did_estimate",
    "event_study",
    "IvDiagnostics",
    "iv_diagnostics",
    "two_sls",
    "PlaceboResult",
    "placebo_permutation",
    "tobit_mle",
    "tobit_negll_grad",
]
