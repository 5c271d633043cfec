"""AR(1) exchange-rate dynamics with a volatility-damping policy switch.

All rates live in log units. A binary policy indicator flips from 0 to 1
at the shock period; from then on the innovation volatility is scaled by
exp(-gamma). By default the indicator acts only through that volatility
channel, which keeps the level of the process anchored at its long-run
mean; setting ``additive_policy`` injects the indicator into the level
recursion as well.

Export competitiveness follows from constant-elasticity demand and a
constant-markup export price: in logs it is affine in the log rate, the
marginal-cost draw, and the product-demand draw, with slopes
(elasticity, -elasticity, -1).

Every function here is pure. Randomness enters only through explicit
integer seeds or pre-drawn shocks, so paths are reproducible and all
operations are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from fxrca.errors import ConfigError, DomainError

__all__ = [
    "CONFIG_KEYS",
    "SimParams",
    "RatePath",
    "CostDraw",
    "RcaPoint",
    "derived_k",
    "policy_indicator",
    "volatility_at",
    "step_rate",
    "simulate_path",
    "draw_cost_world",
    "log_rca",
    "optimal_export_price",
    "read_sim_config",
    "write_sim_config",
]

# Keys accepted in the flat key=value config format, in canonical order.
CONFIG_KEYS = (
    "total_time",
    "shock_time",
    "elasticity",
    "persistence",
    "mean_log_rate",
    "init_vol",
    "policy_gamma",
    "world_index",
    "cost_level",
    "cost_vol",
    "foreign_log_price",
    "world_log_export",
    "additive_policy",
)

_INT_KEYS = {"total_time", "shock_time"}
_BOOL_KEYS = {"additive_policy"}


@dataclass(frozen=True)
class SimParams:
    """Parameters of the rate process and the competitiveness map.

    Attributes
    ----------
    total_time : int
        Number of simulated periods T.
    shock_time : int
        Period at which the policy indicator switches on (0 <= t* <= T).
    elasticity : float
        Demand elasticity; must exceed 1 for a finite markup.
    persistence : float
        AR(1) coefficient of the log rate, strictly inside (0, 1).
    mean_log_rate : float
        Long-run mean of the log rate.
    init_vol : float
        Innovation standard deviation before the shock.
    policy_gamma : float
        Volatility damping exponent; post-shock sd is init_vol * exp(-gamma).
    world_index : float
        Scale of the product-demand draw.
    cost_level, cost_vol : float
        Mean and scale of the log marginal-cost draw.
    foreign_log_price : float
        Log competitor price entering the competitiveness map.
    world_log_export : float
        Log world export total entering the competitiveness map.
    additive_policy : bool
        When True the indicator is also added to the level recursion.
    """

    total_time: int = 1000
    shock_time: int = 300
    elasticity: float = 2.0
    persistence: float = 0.89
    mean_log_rate: float = 0.0
    init_vol: float = 0.05
    policy_gamma: float = 2.0
    world_index: float = 0.02
    cost_level: float = 0.8
    cost_vol: float = 0.05
    foreign_log_price: float = 0.0
    world_log_export: float = 1.0
    additive_policy: bool = False

    def __post_init__(self) -> None:
        if int(self.total_time) != self.total_time or self.total_time <= 0:
            raise ConfigError(f"total_time must be a positive integer, got {self.total_time!r}")
        if int(self.shock_time) != self.shock_time:
            raise ConfigError(f"shock_time must be an integer, got {self.shock_time!r}")
        if not 0 <= self.shock_time <= self.total_time:
            raise ConfigError(
                f"shock_time must lie in [0, total_time], got {self.shock_time} "
                f"with total_time={self.total_time}"
            )
        if not self.elasticity > 1.0:
            raise ConfigError(f"elasticity must exceed 1, got {self.elasticity}")
        if not 0.0 < self.persistence < 1.0:
            raise ConfigError(f"persistence must lie strictly in (0, 1), got {self.persistence}")
        if self.init_vol < 0.0:
            raise ConfigError(f"init_vol must be nonnegative, got {self.init_vol}")
        if self.policy_gamma < 0.0:
            raise ConfigError(f"policy_gamma must be nonnegative, got {self.policy_gamma}")
        if self.world_index < 0.0:
            raise ConfigError(f"world_index must be nonnegative, got {self.world_index}")
        if self.cost_vol < 0.0:
            raise ConfigError(f"cost_vol must be nonnegative, got {self.cost_vol}")


@dataclass(frozen=True)
class RatePath:
    """A simulated log-rate path with its volatility and policy series.

    ``log_rates``, ``vols`` and ``policy`` all have length ``total_time``;
    ``seed`` records the integer that reproduces the path exactly.
    """

    log_rates: np.ndarray
    vols: np.ndarray
    policy: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        if not (len(self.log_rates) == len(self.vols) == len(self.policy)):
            raise ValueError("log_rates, vols and policy must have equal length")


@dataclass(frozen=True)
class CostDraw:
    """The pair of per-period draws feeding the competitiveness map."""

    marginal_cost: float
    demand_index: float


@dataclass(frozen=True)
class RcaPoint:
    """One evaluation of the competitiveness map."""

    log_rca: float
    rca: float
    draws: CostDraw


def derived_k(elasticity: float) -> float:
    """Log markup constant implied by the demand elasticity.

    Equals ``-elasticity * ln(elasticity / (elasticity - 1))``. It is the
    log of the pricing constant raised to ``-elasticity`` and tends to -1
    as the elasticity grows without bound.
    """
    if elasticity <= 1.0:
        raise DomainError(f"elasticity must exceed 1, got {elasticity}")
    return -elasticity * math.log(elasticity / (elasticity - 1.0))


def policy_indicator(t: int, shock_time: int) -> int:
    """Binary policy state: 0 strictly before the shock period, 1 from it on."""
    return 1 if t >= shock_time else 0


def volatility_at(t: int, params: SimParams) -> float:
    """Innovation standard deviation at period t under the damping rule."""
    zeta = policy_indicator(t, params.shock_time)
    return params.init_vol * math.exp(-params.policy_gamma * zeta)


def step_rate(prev_log_rate: float, t: int, params: SimParams, shock: float) -> float:
    """One transition of the log-rate recursion given a realized innovation.

    Computes ``rho * prev + (1 - rho) * mean + shock`` and, only when
    ``additive_policy`` is set, adds the policy indicator for period t.
    """
    value = (
        params.persistence * prev_log_rate
        + (1.0 - params.persistence) * params.mean_log_rate
        + shock
    )
    if params.additive_policy:
        value += policy_indicator(t, params.shock_time)
    return value


def _zeta_series(params: SimParams) -> np.ndarray:
    t = np.arange(params.total_time)
    return (t >= params.shock_time).astype(np.int64)


def _vol_series(params: SimParams) -> np.ndarray:
    zeta = _zeta_series(params)
    return params.init_vol * np.exp(-params.policy_gamma * zeta)


def _ar1_filter(shocks: np.ndarray, rho: float, x0: float) -> np.ndarray:
    # x[t] = rho * x[t-1] + shocks[t], seeded at x0; lfilter runs the
    # recursion in C and matches the scalar loop to machine precision.
    if len(shocks) == 0:
        return np.empty(0)
    out, _ = lfilter([1.0], [1.0, -rho], shocks, zi=[rho * x0])
    return out


def simulate_path(params: SimParams, seed: int, burn_in: int = 0) -> RatePath:
    """Simulate a full log-rate path, deterministic given (params, seed).

    The path starts at the long-run mean; an optional burn-in advances the
    recursion that many pre-sample steps (using the period-0 volatility)
    before recording starts, which is useful for variance checks that
    require stationarity from the first observation.
    """
    if burn_in < 0:
        raise ConfigError(f"burn_in must be nonnegative, got {burn_in}")
    t_total = params.total_time
    zeta = _zeta_series(params)
    vols = _vol_series(params)
    rng = np.random.default_rng(seed)
    x0 = 0.0
    if burn_in:
        pre = rng.standard_normal(burn_in) * vols[0]
        x0 = _ar1_filter(pre, params.persistence, 0.0)[-1]
    shocks = rng.standard_normal(t_total - 1) * vols[1:] if t_total > 1 else np.empty(0)
    if params.additive_policy:
        shocks = shocks + zeta[1:].astype(float)
    centered = _ar1_filter(shocks, params.persistence, x0)
    log_rates = np.empty(t_total)
    log_rates[0] = params.mean_log_rate + x0
    if t_total > 1:
        log_rates[1:] = params.mean_log_rate + centered
    return RatePath(log_rates=log_rates, vols=vols, policy=zeta, seed=int(seed))


def draw_cost_world(params: SimParams, z_cost: float, z_world: float) -> tuple[float, float]:
    """Map two standard-normal draws to (log marginal cost, demand index)."""
    mc = params.cost_level + params.cost_vol * z_cost
    y_i = params.world_index * z_world
    return mc, y_i


def log_rca(s: float, mc: float, y_i: float, params: SimParams) -> RcaPoint:
    """Evaluate the log competitiveness map at one state.

    ``log_rca = k + (world_log_export - y_i)
                - elasticity * (mc - s - foreign_log_price)``

    The level value is the exponential, hence always positive.
    """
    k = derived_k(params.elasticity)
    value = (
        k
        + (params.world_log_export - y_i)
        - params.elasticity * (mc - s - params.foreign_log_price)
    )
    return RcaPoint(log_rca=value, rca=math.exp(value), draws=CostDraw(mc, y_i))


def optimal_export_price(marginal_cost: float, rate_level: float, elasticity: float) -> float:
    """Profit-maximizing export price: markup over cost, converted by the rate.

    ``price = elasticity / (elasticity - 1) * marginal_cost / rate_level``
    where both cost and rate are in levels, not logs.
    """
    if elasticity <= 1.0:
        raise DomainError(f"elasticity must exceed 1, got {elasticity}")
    if marginal_cost <= 0.0:
        raise DomainError(f"marginal_cost must be positive, got {marginal_cost}")
    if rate_level <= 0.0:
        raise DomainError(f"rate_level must be positive, got {rate_level}")
    return elasticity / (elasticity - 1.0) * marginal_cost / rate_level


def write_sim_config(params: SimParams, path: str | Path) -> None:
    """Write parameters to a flat ``key = value`` file, one key per line."""
    lines = []
    for key in CONFIG_KEYS:
        value = getattr(params, key)
        if key in _BOOL_KEYS:
            text = "true" if value else "false"
        elif key in _INT_KEYS:
            text = str(int(value))
        else:
            text = repr(float(value))
        lines.append(f"{key} = {text}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sim_config(path: str | Path) -> SimParams:
    """Read a flat ``key = value`` config file back into SimParams.

    Lines starting with ``#`` and blank lines are ignored; unknown keys or
    unparseable values raise ConfigError naming the key. Missing keys fall
    back to the defaults.
    """
    values: dict[str, object] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, token = (part.strip() for part in line.partition("="))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate config key {key!r}")
        try:
            if key in _BOOL_KEYS:
                lowered = token.lower()
                if lowered not in {"true", "false", "0", "1"}:
                    raise ValueError(token)
                values[key] = lowered in {"true", "1"}
            elif key in _INT_KEYS:
                values[key] = int(token)
            else:
                values[key] = float(token)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for key {key!r}: {token!r}") from exc
    return SimParams(**values)
