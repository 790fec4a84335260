"""Regret, bias/variance, and decay-rate analysis of replication sweeps.

The expected one-step excess cost at price lambda_t is an exact quadratic
around the optimal price,

    E[cost_online - cost_star | lambda_t] = C1*(lambda_t - lambda_star_t)^2
    C1 = (N/2)*(gamma1 + gamma1^2)

because the additive response noise inflates both cost streams by the
same constant and the linear term vanishes at the optimum. Two
estimators of the per-slot gap are therefore available from a sweep:

  * the raw cost difference averaged over replications (empirical_gap),
    unbiased but noisy since the noise-only cost variation survives in
    each replication;
  * C1 times the mean squared price deviation (the gap_quadratic series
    of RegretReport), the same expectation with the observation noise
    integrated out analytically, hence far tighter at equal replication
    counts. Decay-slope fits use it; cumulative regret stays on the raw
    series.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from .model import Population
from .online import SweepResult

__all__ = [
    "LogBoundResult",
    "RegretReport",
    "regret_constants",
    "analytic_gap",
    "empirical_gap",
    "fit_decay",
    "log_bound_check",
    "price_bias_variance",
    "median_tracking_error",
    "build_regret_report",
]


def regret_constants(population: Population) -> tuple[float, float]:
    """Constants (C1, C2) of the one-step gap expansion.

    C1 = (N/2)(gamma1 + gamma1^2) is half the curvature of the noiseless
    stage cost in lambda and is >= 0. C2 = (sum alpha_i/beta_i)(gamma1 - 1)
    multiplies the price bias in the first-order gap approximation; the
    exact expansion has no linear term (the stage cost is minimized at
    lambda_star), so C2 only matters to callers using the approximate
    form with a nonzero bias.
    """
    g1 = population.gamma1
    s = -population.gamma2
    c1 = 0.5 * population.n * (g1 + g1 * g1)
    c2 = s * (g1 - 1.0)
    return c1, c2


def analytic_gap(
    c1: float,
    c2: float,
    lambda_moments: tuple[float, float],
    lambda_star_t: float,
) -> float:
    """One-step gap from the first two moments of the price.

    Args:
        c1, c2: constants from regret_constants.
        lambda_moments: (E[lambda_t], E[lambda_t^2]), e.g. Monte Carlo
            moments across replications at a fixed slot.
        lambda_star_t: optimal price of the slot.

    Returns:
        c1*Var(lambda) + c1*bias^2 + c2*bias with bias = E[lambda] - lambda_star.
    """
    m1, m2 = lambda_moments
    var = m2 - m1 * m1
    if var < 0.0:
        if var < -1e-12 * max(1.0, abs(m2)):
            raise ValueError(f"second moment below squared mean: {m2} < {m1}^2")
        var = 0.0
    bias = m1 - lambda_star_t
    return c1 * var + c1 * bias * bias + c2 * bias


def empirical_gap(sweep: SweepResult, t: int) -> tuple[float, float]:
    """Mean and standard error of cost_online - cost_star at slot t (1-based)."""
    if sweep.reps < 2:
        raise ValueError("need >= 2 replications")
    t_hor = sweep.cost_online.shape[1]
    if not 1 <= t <= t_hor:
        raise ValueError(f"slot index {t} out of range 1..{t_hor}")
    diffs = sweep.cost_online[:, t - 1] - sweep.cost_star[:, t - 1]
    mean = float(diffs.mean())
    se = float(diffs.std(ddof=1) / np.sqrt(sweep.reps))
    return mean, se


def fit_decay(
    t: NDArray, values: NDArray, window: tuple[float, float]
) -> float:
    """Least-squares slope of log(value) against log(t) inside the window.

    A pure power law value = a*t^p returns p up to float rounding.

    Raises:
        ValueError: fewer than two slots fall in the window, or any value
            in the window is nonpositive (log undefined).
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    if mask.sum() < 2:
        raise ValueError(f"window {window} selects fewer than two slots")
    v = values[mask]
    if np.any(v <= 0.0):
        raise ValueError("nonpositive value inside the fit window")
    slope, _ = np.polyfit(np.log(t[mask]), np.log(v), 1)
    return float(slope)


class LogBoundResult(NamedTuple):
    """Envelope constants of cum_regret/log(t) over t >= t0."""

    k1: float
    k2: float
    passed: bool


def log_bound_check(
    cum_regret: NDArray, t0: int = 10, ratio_cap: float = 20.0
) -> LogBoundResult:
    """Test whether cumulative regret stays within constant log-t bounds.

    Computes k1 = min and k2 = max of R(t)/log(t) over t in [t0, T]
    (natural log; cum_regret[i] is R at t = i+1). Passes iff
    0 < k1 <= k2 < inf and k2/k1 <= ratio_cap: a genuine log curve gives
    k2/k1 near 1, while linear regret makes the ratio grow with the
    window.
    """
    if t0 < 3:
        raise ValueError(f"t0 must be >= 3, got {t0}")
    cum = np.asarray(cum_regret, dtype=float)
    t_hor = cum.shape[0]
    if t_hor < t0:
        raise ValueError(f"horizon {t_hor} does not reach t0 = {t0}")
    t = np.arange(t0, t_hor + 1)
    ratios = cum[t0 - 1 :] / np.log(t)
    k1 = float(ratios.min())
    k2 = float(ratios.max())
    passed = bool(0.0 < k1 <= k2 < np.inf and k2 <= ratio_cap * k1)
    return LogBoundResult(k1=k1, k2=k2, passed=passed)


def price_bias_variance(
    sweep: SweepResult,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Per-slot bias mean(lambda_t) - lambda_star_t and sample variance."""
    if sweep.reps < 2:
        raise ValueError("need >= 2 replications")
    bias = sweep.lambda_online.mean(axis=0) - sweep.lambda_star
    var = sweep.lambda_online.var(axis=0, ddof=1)
    return bias, var


def median_tracking_error(sweep: SweepResult) -> NDArray[np.float64]:
    """Per-slot median over replications of |lambda_t - lambda_star_t|/lambda_star_t."""
    rel = np.abs(sweep.lambda_online - sweep.lambda_star) / sweep.lambda_star
    return np.median(rel, axis=0)


@dataclass
class RegretReport:
    """Per-slot gap series, price/estimator diagnostics, and bound fits.

    gap_mean/gap_se are the raw replication averages of the cost
    difference; cum_regret is their running sum. gap_quadratic is
    c1 * mean((lambda_t - lambda_star_t)^2), the variance-reduced gap
    estimate used for decay_slope.
    """

    t: NDArray[np.int64]
    gap_mean: NDArray[np.float64]
    gap_se: NDArray[np.float64]
    cum_regret: NDArray[np.float64]
    gap_quadratic: NDArray[np.float64]
    c1: float
    c2: float
    lambda_mean: NDArray[np.float64]
    lambda_bias: NDArray[np.float64]
    lambda_var: NDArray[np.float64]
    gamma1_bias: NDArray[np.float64]
    gamma1_var: NDArray[np.float64]
    decay_slope: float
    decay_window: tuple[float, float]
    k1: float
    k2: float
    t0: int
    ratio_cap: float
    log_bound_passed: bool
    reps: int


def build_regret_report(
    sweep: SweepResult,
    decay_window: tuple[float, float] = (10.0, 100.0),
    t0: int = 10,
    ratio_cap: float = 20.0,
) -> RegretReport:
    """Full regret/bias/variance analysis of one replication sweep."""
    if sweep.reps < 2:
        raise ValueError("need >= 2 replications")
    scenario = sweep.scenario
    c1, c2 = regret_constants(scenario.population)
    t_hor = sweep.cost_online.shape[1]
    t = np.arange(1, t_hor + 1, dtype=np.int64)

    diffs = sweep.cost_online - sweep.cost_star
    gap_mean = diffs.mean(axis=0)
    gap_se = diffs.std(axis=0, ddof=1) / np.sqrt(sweep.reps)
    cum_regret = np.cumsum(gap_mean)

    dev = sweep.lambda_online - sweep.lambda_star
    gap_quadratic = c1 * np.mean(dev * dev, axis=0)

    lambda_mean = sweep.lambda_online.mean(axis=0)
    lambda_bias, lambda_var = price_bias_variance(sweep)
    gamma1_bias = sweep.gamma1_hat.mean(axis=0) - scenario.population.gamma1
    gamma1_var = sweep.gamma1_hat.var(axis=0, ddof=1)

    decay_slope = fit_decay(t, gap_quadratic, decay_window)
    bound = log_bound_check(cum_regret, t0=t0, ratio_cap=ratio_cap)

    return RegretReport(
        t=t,
        gap_mean=gap_mean,
        gap_se=gap_se,
        cum_regret=cum_regret,
        gap_quadratic=gap_quadratic,
        c1=c1,
        c2=c2,
        lambda_mean=lambda_mean,
        lambda_bias=lambda_bias,
        lambda_var=lambda_var,
        gamma1_bias=gamma1_bias,
        gamma1_var=gamma1_var,
        decay_slope=decay_slope,
        decay_window=decay_window,
        k1=bound.k1,
        k2=bound.k2,
        t0=t0,
        ratio_cap=ratio_cap,
        log_bound_passed=bound.passed,
        reps=sweep.reps,
    )
