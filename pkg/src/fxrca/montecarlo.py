"""Scenario runner for the rate-and-competitiveness simulation.

Three named scenarios (L, M, H) share every parameter except the long-run
mean of the log rate. A scenario run produces the rate path, the derived
competitiveness series, pre/post-shock summaries, kernel densities of the
level series on both sides of the shock, and a constant confidence band
anchored at the pre-shock sample.

Seeding uses a splittable scheme: the scenario seed spawns one child
sequence per replication, and each child spawns separate streams for the
rate path and for the cost/demand draws. Replication r therefore sees the
same randomness no matter how many replications run alongside it, and
aggregation over replications is by index, independent of completion
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from fxrca.errors import ConfigError, DomainError
from fxrca.model import RatePath, SimParams, derived_k, simulate_path
from fxrca.stats import DensityGrid, kde, kde_grid, silverman_bandwidth

__all__ = [
    "SCENARIO_MEANS",
    "ScenarioSpec",
    "SegmentSummary",
    "PrePostSummary",
    "ReplicationStats",
    "ScenarioResult",
    "StationaryMoments",
    "make_scenario",
    "run_scenario",
    "summarize_pre_post",
    "confidence_band",
    "stationary_moments",
    "series_rows",
    "summary_rows",
    "SERIES_HEADER",
    "SUMMARY_HEADER",
]

# Long-run mean of the log rate under each named scenario.
SCENARIO_MEANS = {"L": 0.0, "M": 0.3, "H": 0.6}

SERIES_HEADER = ("t", "zeta", "sigma_st", "s_t", "log_rca", "rca")
SUMMARY_HEADER = ("scenario", "segment", "mean_s", "var_s", "mean_rca", "var_rca")


@dataclass(frozen=True)
class ScenarioSpec:
    """A scenario to simulate: parameters, label, seed, replication count."""

    params: SimParams
    scenario_label: str
    seed: int
    replications: int = 1

    def __post_init__(self) -> None:
        if self.scenario_label not in SCENARIO_MEANS:
            raise ConfigError(
                f"scenario_label must be one of {sorted(SCENARIO_MEANS)}, "
                f"got {self.scenario_label!r}"
            )
        if self.replications < 1:
            raise ConfigError(f"replications must be at least 1, got {self.replications}")


@dataclass(frozen=True)
class SegmentSummary:
    """Pre/post-shock means and unbiased variances of a single series."""

    pre_mean: float
    pre_var: float
    post_mean: float
    post_var: float
    n_pre: int
    n_post: int


@dataclass(frozen=True)
class PrePostSummary:
    """Segment summaries for the rate and both competitiveness series."""

    s: SegmentSummary
    log_rca: SegmentSummary
    rca: SegmentSummary


@dataclass(frozen=True)
class ReplicationStats:
    """Per-replication summaries plus order-independent aggregation."""

    summaries: tuple[PrePostSummary, ...]

    def aggregate(self) -> dict[str, tuple[float, float]]:
        """Mean and Monte Carlo standard error of every summary statistic.

        Keys look like ``"s.pre_mean"``. Aggregation runs in replication
        index order, so the result does not depend on completion order.
        """
        out: dict[str, tuple[float, float]] = {}
        n = len(self.summaries)
        for series in ("s", "log_rca", "rca"):
            for stat in ("pre_mean", "pre_var", "post_mean", "post_var"):
                values = np.array(
                    [getattr(getattr(s, series), stat) for s in self.summaries], dtype=float
                )
                mc_se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
                out[f"{series}.{stat}"] = (float(values.mean()), mc_se)
        return out


@dataclass(frozen=True)
class ScenarioResult:
    """Everything produced by one scenario run.

    The series arrays all have length ``total_time``; ``band`` is a
    (T, 2) array of constant lower/upper bounds. When the run requested
    more than one replication, the path and series come from replication
    0 and ``replication_stats`` holds the per-replication summaries.
    """

    spec: ScenarioSpec
    path: RatePath
    log_rca: np.ndarray
    rca: np.ndarray
    summary: PrePostSummary
    pre_density: DensityGrid
    post_density: DensityGrid
    band: np.ndarray
    replication_stats: ReplicationStats | None = None


@dataclass(frozen=True)
class StationaryMoments:
    """Analytic stationary moments of the rate and log competitiveness."""

    mean_s: float
    var_s_pre: float
    var_s_post: float
    mean_log_rca: float
    var_log_rca_pre: float
    var_log_rca_post: float
    var_ratio: float


def make_scenario(
    params: SimParams, label: str, seed: int, replications: int = 1
) -> ScenarioSpec:
    """Build a ScenarioSpec with the long-run mean set by the label."""
    if label not in SCENARIO_MEANS:
        raise ConfigError(f"unknown scenario label {label!r}")
    scenario_params = replace(params, mean_log_rate=SCENARIO_MEANS[label])
    return ScenarioSpec(
        params=scenario_params, scenario_label=label, seed=seed, replications=replications
    )


def summarize_pre_post(series, shock_time: int) -> SegmentSummary:
    """Means and unbiased variances of the [0, t*) and [t*, T) segments."""
    arr = np.asarray(series, dtype=float).ravel()
    if not 1 <= shock_time <= arr.size - 1:
        raise DomainError(
            f"shock_time must split the series into two nonempty segments, "
            f"got {shock_time} for length {arr.size}"
        )
    pre, post = arr[:shock_time], arr[shock_time:]

    def _var(seg: np.ndarray) -> float:
        return float(np.var(seg, ddof=1)) if seg.size > 1 else 0.0

    return SegmentSummary(
        pre_mean=float(pre.mean()),
        pre_var=_var(pre),
        post_mean=float(post.mean()),
        post_var=_var(post),
        n_pre=int(pre.size),
        n_post=int(post.size),
    )


def confidence_band(series, shock_time: int, level: float = 0.95) -> np.ndarray:
    """Constant band: pre-shock mean +/- z(level) * pre-shock sd, full horizon.

    Returns a (T, 2) array of (lower, upper) pairs. The band is anchored
    entirely at the pre-shock sample, so it visualizes where post-shock
    values fall relative to pre-shock dispersion.
    """
    arr = np.asarray(series, dtype=float).ravel()
    if not 0.0 < level < 1.0:
        raise ConfigError(f"level must lie strictly in (0, 1), got {level}")
    if shock_time < 2 or shock_time > arr.size:
        raise DomainError(
            f"degenerate pre-shock sample: need at least 2 points, got {shock_time}"
        )
    pre = arr[:shock_time]
    mean = float(pre.mean())
    sd = float(np.std(pre, ddof=1))
    z = float(norm.ppf(0.5 + level / 2.0))
    lower, upper = mean - z * sd, mean + z * sd
    band = np.empty((arr.size, 2))
    band[:, 0] = lower
    band[:, 1] = upper
    return band


def stationary_moments(params: SimParams) -> StationaryMoments:
    """Closed-form stationary moments implied by the parameters.

    Rate variance is sigma^2 / (1 - rho^2) per regime. The log
    competitiveness mean is k + world_log_export - elasticity * cost_level
    + elasticity * (mean_log_rate + foreign_log_price); its variance adds
    the independent cost and demand channels to the rate channel.
    """
    if params.additive_policy:
        raise ConfigError("stationary moments are defined only for additive_policy=false")
    k = derived_k(params.elasticity)
    eps = params.elasticity
    denom = 1.0 - params.persistence**2
    var_s_pre = params.init_vol**2 / denom
    var_s_post = (params.init_vol * math.exp(-params.policy_gamma)) ** 2 / denom
    mean_log = (
        k
        + params.world_log_export
        - eps * params.cost_level
        + eps * (params.mean_log_rate + params.foreign_log_price)
    )
    extra = params.world_index**2 + eps**2 * params.cost_vol**2
    return StationaryMoments(
        mean_s=params.mean_log_rate,
        var_s_pre=var_s_pre,
        var_s_post=var_s_post,
        mean_log_rca=mean_log,
        var_log_rca_pre=eps**2 * var_s_pre + extra,
        var_log_rca_post=eps**2 * var_s_post + extra,
        var_ratio=math.exp(-2.0 * params.policy_gamma),
    )


def _scenario_arrays(
    params: SimParams, entropy: np.random.SeedSequence
) -> tuple[RatePath, np.ndarray, np.ndarray]:
    path_ss, cost_ss = entropy.spawn(2)
    path_seed = int(path_ss.generate_state(1, dtype=np.uint64)[0])
    path = simulate_path(params, path_seed)
    rng = np.random.default_rng(cost_ss)
    z_cost = rng.standard_normal(params.total_time)
    z_world = rng.standard_normal(params.total_time)
    mc = params.cost_level + params.cost_vol * z_cost
    y_i = params.world_index * z_world
    k = derived_k(params.elasticity)
    log_values = (
        k
        + (params.world_log_export - y_i)
        - params.elasticity * (mc - path.log_rates - params.foreign_log_price)
    )
    return path, log_values, np.exp(log_values)


def _summarize_all(path: RatePath, log_values: np.ndarray, levels: np.ndarray, t_star: int) -> PrePostSummary:
    return PrePostSummary(
        s=summarize_pre_post(path.log_rates, t_star),
        log_rca=summarize_pre_post(log_values, t_star),
        rca=summarize_pre_post(levels, t_star),
    )


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Simulate one scenario end to end.

    Requires a post-shock window of more than two periods and a pre-shock
    window of at least two. Running the same spec twice yields
    bit-identical results.
    """
    params = spec.params
    t_star = params.shock_time
    if params.total_time <= t_star + 2:
        raise ConfigError(
            f"post-shock sample too small: total_time={params.total_time} "
            f"must exceed shock_time+2={t_star + 2}"
        )
    if t_star < 2:
        raise ConfigError(f"shock_time must be at least 2 for scenario runs, got {t_star}")

    children = np.random.SeedSequence(spec.seed).spawn(spec.replications)
    summaries: list[PrePostSummary] = []
    first: tuple[RatePath, np.ndarray, np.ndarray] | None = None
    for child in children:
        path, log_values, levels = _scenario_arrays(params, child)
        summaries.append(_summarize_all(path, log_values, levels, t_star))
        if first is None:
            first = (path, log_values, levels)
    assert first is not None
    path, log_values, levels = first

    # Densities over level competitiveness, padded wide enough that the
    # trapezoid mass is within 1e-3 of one.
    pre_h = silverman_bandwidth(levels[:t_star])
    post_h = silverman_bandwidth(levels[t_star:])
    pre_density = kde(levels[:t_star], kde_grid(levels[:t_star], pre_h, pad=5.0), pre_h)
    post_density = kde(levels[t_star:], kde_grid(levels[t_star:], post_h, pad=5.0), post_h)

    stats = ReplicationStats(tuple(summaries)) if spec.replications > 1 else None
    return ScenarioResult(
        spec=spec,
        path=path,
        log_rca=log_values,
        rca=levels,
        summary=summaries[0],
        pre_density=pre_density,
        post_density=post_density,
        band=confidence_band(levels, t_star, 0.95),
        replication_stats=stats,
    )


def series_rows(result: ScenarioResult):
    """Rows (t, zeta, sigma_st, s_t, log_rca, rca) for the series CSV."""
    path = result.path
    for t in range(len(path.log_rates)):
        yield (
            t,
            int(path.policy[t]),
            float(path.vols[t]),
            float(path.log_rates[t]),
            float(result.log_rca[t]),
            float(result.rca[t]),
        )


def summary_rows(results):
    """Rows (scenario, segment, mean_s, var_s, mean_rca, var_rca) for each result."""
    for result in results:
        s, rca = result.summary.s, result.summary.rca
        yield (result.spec.scenario_label, "pre", s.pre_mean, s.pre_var, rca.pre_mean, rca.pre_var)
        yield (
            result.spec.scenario_label,
            "post",
            s.post_mean,
            s.post_var,
            rca.post_mean,
            rca.post_var,
        )
