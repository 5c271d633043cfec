"""Synthetic province-year panels with known ground truth.

The generator mirrors the empirical design: a national AR(1) exchange
rate, independent standard-normal controls, normal province effects, a
treatment/post interaction with configurable effect size, and an optional
endogeneity channel for exercising instrumental-variable estimators.

Endogeneity works at the unit level. When `endogeneity_corr` is nonzero
the exchange rate gains a province-year component v correlated with the
outcome error u, plus a first-stage loading on the lagged instrument:

    exrate[i,t] = national[t] + pi * (l_tool[i,t] - mean(l_tool)) + v[i,t]
    u[i,t] = sd_u * (corr * v[i,t]/sd_v + sqrt(1-corr^2) * w[i,t])

so least squares on exrate is biased while the lagged instrument remains
valid (it never sees u or v). The instrument inputs (market, epu, gpr)
are generated one extra year back so the lag exists in every panel year.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np
import pandas as pd

from fxrca.errors import ConfigError
from fxrca.model import SimParams, simulate_path
from fxrca.data.panel import PanelDataset, CONTROL_COLUMNS

__all__ = ["DEFAULT_TRUE_COEFFS", "SynthConfig", "GroundTruth", "synth_panel"]

DEFAULT_TRUE_COEFFS = {
    "exrate": 0.144,
    "unemployment": -0.03,
    "ln_population": 0.05,
    "ln_retail": 0.04,
    "ln_power": -0.02,
    "vgdp": 0.03,
    "law": 0.02,
    "ln_government": -0.04,
    "ln_first": 0.03,
}

_COEFF_NAMES = ("exrate",) + CONTROL_COLUMNS


@dataclass(frozen=True)
class SynthConfig:
    """Everything the generator needs; every field is a true parameter.

    `outcome_sd` and `province_sd` may be zero, which produces an exactly
    linear panel useful for recovery checks. `censor_lower`/`censor_upper`
    clip the outcome when given, recording how many cells were clipped.
    """

    n_provinces: int = 30
    start_year: int = 2008
    end_year: int = 2021
    coefficients: dict = field(default_factory=lambda: dict(DEFAULT_TRUE_COEFFS))
    intercept: float = 0.3
    tau_did: float = 0.0
    treated_share: float = 0.5
    shock_year: int = 2016
    outcome_sd: float = 0.1
    province_sd: float = 0.08
    exrate_mean: float = 6.58
    exrate_rho: float = 0.8
    exrate_vol: float = 0.1
    endogeneity_corr: float = 0.0
    endogeneity_sd: float = 0.15
    first_stage_pi: float = 0.015
    treat_trend: float = 0.0
    censor_lower: float | None = None
    censor_upper: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_provinces < 2:
            raise ConfigError(f"n_provinces must be at least 2, got {self.n_provinces}")
        if self.start_year > self.end_year:
            raise ConfigError(
                f"start_year {self.start_year} exceeds end_year {self.end_year}"
            )
        if not self.start_year <= self.shock_year <= self.end_year:
            raise ConfigError(
                f"shock_year {self.shock_year} outside the span "
                f"[{self.start_year}, {self.end_year}]"
            )
        if not 0.0 < self.treated_share < 1.0:
            raise ConfigError(f"treated_share must lie in (0, 1), got {self.treated_share}")
        unknown = sorted(set(self.coefficients) - set(_COEFF_NAMES))
        if unknown:
            raise ConfigError("unknown coefficient name(s): " + ", ".join(unknown))
        if "exrate" not in self.coefficients:
            raise ConfigError("coefficients must include 'exrate'")
        for name, bound in (
            ("outcome_sd", self.outcome_sd),
            ("province_sd", self.province_sd),
        ):
            if bound < 0:
                raise ConfigError(f"{name} must be nonnegative, got {bound}")
        if self.exrate_vol <= 0:
            raise ConfigError(f"exrate_vol must be positive, got {self.exrate_vol}")
        if not -1.0 < self.endogeneity_corr < 1.0:
            raise ConfigError(
                f"endogeneity_corr must lie strictly in (-1, 1), got {self.endogeneity_corr}"
            )
        if self.endogeneity_corr != 0.0 and self.endogeneity_sd <= 0:
            raise ConfigError("endogeneity_sd must be positive when the channel is on")
        if (
            self.censor_lower is not None
            and self.censor_upper is not None
            and self.censor_lower >= self.censor_upper
        ):
            raise ConfigError(
                f"censor_lower {self.censor_lower} must be below censor_upper {self.censor_upper}"
            )

    @staticmethod
    def from_dict(raw: dict) -> "SynthConfig":
        known = {f.name for f in SynthConfig.__dataclass_fields__.values()}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError("unknown config key(s): " + ", ".join(unknown))
        return SynthConfig(**raw)


@dataclass(frozen=True)
class GroundTruth:
    """The realized parameters behind one generated panel."""

    coefficients: dict[str, float]
    intercept: float
    tau_did: float
    treat_trend: float
    shock_year: int
    treated_provinces: tuple[str, ...]
    province_effects: dict[str, float]
    outcome_sd: float
    province_sd: float
    endogeneity_corr: float
    endogeneity_sd: float
    first_stage_pi: float
    exrate_mean: float
    exrate_rho: float
    exrate_vol: float
    censor_lower: float | None
    censor_upper: float | None
    n_left_censored: int
    n_right_censored: int
    seed: int

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["treated_provinces"] = list(self.treated_provinces)
        return out


def _full_coefficients(config: SynthConfig) -> dict[str, float]:
    return {name: float(config.coefficients.get(name, 0.0)) for name in _COEFF_NAMES}


def synth_panel(config: SynthConfig) -> tuple[PanelDataset, GroundTruth]:
    """Generate one panel and its ground truth, deterministic given config."""
    root = np.random.SeedSequence(config.seed)
    ss_path, ss_controls, ss_alpha, ss_treat, ss_market, ss_index, ss_v, ss_w = root.spawn(8)

    n = config.n_provinces
    years = np.arange(config.start_year, config.end_year + 1)
    n_years = len(years)
    provinces = [f"P{i + 1:02d}" for i in range(n)]
    coeffs = _full_coefficients(config)

    # National rate over n_years + 1 periods: one extra year back so the
    # instrument lag exists from the first panel year on.
    rate_params = SimParams(
        total_time=n_years + 1,
        shock_time=0,
        persistence=config.exrate_rho,
        mean_log_rate=config.exrate_mean,
        init_vol=config.exrate_vol,
        policy_gamma=0.0,
    )
    path_seed = int(ss_path.generate_state(1, np.uint64)[0])
    national_full = simulate_path(rate_params, path_seed, burn_in=20).log_rates
    national = national_full[1:]

    rng_controls = np.random.default_rng(ss_controls)
    controls = rng_controls.standard_normal((n, n_years, len(CONTROL_COLUMNS)))

    rng_alpha = np.random.default_rng(ss_alpha)
    alpha = rng_alpha.standard_normal(n) * config.province_sd

    rng_treat = np.random.default_rng(ss_treat)
    n_treated = min(n - 1, max(1, round(config.treated_share * n)))
    treated_idx = np.sort(rng_treat.permutation(n)[:n_treated])
    treat = np.zeros(n)
    treat[treated_idx] = 1.0

    rng_market = np.random.default_rng(ss_market)
    market = 8.0 + 1.5 * rng_market.standard_normal(n)
    rng_index = np.random.default_rng(ss_index)
    log_epu = math.log(100.0) + 0.3 * rng_index.standard_normal(n_years + 1)
    log_gpr = math.log(100.0) + 0.3 * rng_index.standard_normal(n_years + 1)
    epu_full = np.exp(log_epu)
    gpr_full = np.exp(log_gpr)
    tool_full = market[:, None] * (log_epu + log_gpr)[None, :]
    tool = tool_full[:, 1:]
    l_tool = tool_full[:, :-1]

    exrate = np.tile(national, (n, 1))
    v = np.zeros((n, n_years))
    if config.endogeneity_corr != 0.0:
        rng_v = np.random.default_rng(ss_v)
        v = rng_v.standard_normal((n, n_years)) * config.endogeneity_sd
        exrate = exrate + config.first_stage_pi * (l_tool - l_tool.mean()) + v

    rng_w = np.random.default_rng(ss_w)
    w = rng_w.standard_normal((n, n_years))
    if config.endogeneity_corr != 0.0:
        corr = config.endogeneity_corr
        u = config.outcome_sd * (
            corr * v / config.endogeneity_sd + math.sqrt(1.0 - corr**2) * w
        )
    else:
        u = config.outcome_sd * w

    post = (years >= config.shock_year).astype(float)
    rel = (years - config.shock_year).astype(float)
    outcome = (
        config.intercept
        + coeffs["exrate"] * exrate
        + controls @ np.array([coeffs[c] for c in CONTROL_COLUMNS])
        + alpha[:, None]
        + config.tau_did * treat[:, None] * post[None, :]
        + config.treat_trend * treat[:, None] * rel[None, :]
        + u
    )

    n_left = n_right = 0
    if config.censor_lower is not None:
        mask = outcome < config.censor_lower
        n_left = int(mask.sum())
        outcome = np.where(mask, config.censor_lower, outcome)
    if config.censor_upper is not None:
        mask = outcome > config.censor_upper
        n_right = int(mask.sum())
        outcome = np.where(mask, config.censor_upper, outcome)

    columns = {
        "province": np.repeat(provinces, n_years),
        "year": np.tile(years, n),
        "rca": outcome.ravel(),
        "exrate": exrate.ravel(),
    }
    for j, name in enumerate(CONTROL_COLUMNS):
        columns[name] = controls[:, :, j].ravel()
    columns["market"] = np.repeat(market, n_years)
    columns["epu"] = np.tile(epu_full[1:], n)
    columns["gpr"] = np.tile(gpr_full[1:], n)
    columns["tool"] = tool.ravel()
    columns["l_tool"] = l_tool.ravel()
    columns["treat"] = np.repeat(treat, n_years)
    columns["post"] = np.tile(post, n)
    columns["relative_year"] = np.tile(rel, n)

    panel = PanelDataset.from_frame(pd.DataFrame(columns))
    truth = GroundTruth(
        coefficients=coeffs,
        intercept=config.intercept,
        tau_did=config.tau_did,
        treat_trend=config.treat_trend,
        shock_year=config.shock_year,
        treated_provinces=tuple(provinces[i] for i in treated_idx),
        province_effects={p: float(a) for p, a in zip(provinces, alpha)},
        outcome_sd=config.outcome_sd,
        province_sd=config.province_sd,
        endogeneity_corr=config.endogeneity_corr,
        endogeneity_sd=config.endogeneity_sd,
        first_stage_pi=config.first_stage_pi,
        exrate_mean=config.exrate_mean,
        exrate_rho=config.exrate_rho,
        exrate_vol=config.exrate_vol,
        censor_lower=config.censor_lower,
        censor_upper=config.censor_upper,
        n_left_censored=n_left,
        n_right_censored=n_right,
        seed=config.seed,
    )
    return panel, truth
