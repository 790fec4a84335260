"""Experiment families, scenario generation, and the disk-writing harness.

A flat key = value config names one experiment: population size,
horizon, replication count, master seed, sampling intervals for the
user coefficients and the demand profile, and the experiment kind:

    baseline        alpha_i ~ U[1,2], beta_i ~ U[4,8],  d_t ~ U[3,6]
    paramset2       alpha_i ~ U[1,3], beta_i ~ U[3,10], d_t ~ U[2,5]
    repeated-dt:P   baseline intervals; ceil(P*T) randomly chosen slots
                    share one freshly drawn demand value
    blocked-dt:B    baseline intervals; d_t constant on consecutive
                    blocks of B slots

alpha_rev is c_rev * max_t d_t, computed after the kind transform so it
reflects the demand profile actually run. run_experiment writes
trajectory.csv (replication 0), regret.csv, and summary.json; outputs
are byte-reproducible from (config, seed) and never embed the output
path, so reruns into different directories compare equal.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import RegretReport, build_regret_report, median_tracking_error
from .model import DemandProfile, Population, Scenario
from .offline import compute_y_star
from .online import SweepResult, Trajectory, run_replications
from .rng import substream

__all__ = [
    "ExperimentConfig",
    "parse_experiment_kind",
    "parse_config",
    "serialize_config",
    "build_scenario",
    "run_experiment",
    "write_trajectory_csv",
    "write_regret_csv",
]

#: default sampling intervals (alpha, beta, d) per named parameter set
KIND_INTERVALS = {
    "baseline": ((1.0, 2.0), (4.0, 8.0), (3.0, 6.0)),
    "paramset2": ((1.0, 3.0), (3.0, 10.0), (2.0, 5.0)),
}


def parse_experiment_kind(kind: str) -> tuple[str, Optional[float]]:
    """Split an experiment-kind string into (family, parameter).

    "baseline" and "paramset2" carry no parameter; "repeated-dt:P" has
    a fraction P in [0, 1]; "blocked-dt:B" has an integer block size
    B >= 1.
    """
    if kind in KIND_INTERVALS:
        return kind, None
    family, sep, arg = kind.partition(":")
    if family == "repeated-dt":
        if not sep:
            raise ValueError("repeated-dt requires a fraction, e.g. repeated-dt:0.3")
        p = float(arg)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"repeated-dt fraction must be in [0, 1], got {p}")
        return family, p
    if family == "blocked-dt":
        if not sep:
            raise ValueError("blocked-dt requires a block size, e.g. blocked-dt:4")
        b = int(arg)
        if b < 1:
            raise ValueError(f"blocked-dt block size must be >= 1, got {b}")
        return family, float(b)
    raise ValueError(
        f"unknown experiment kind '{kind}' (expected baseline, paramset2, "
        "repeated-dt:P, or blocked-dt:B)"
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment from a master seed.

    Interval fields left as None fall back to the kind's defaults
    (repeated-dt/blocked-dt use the baseline intervals). y_capacity
    None means commit the closed-form optimum of the drawn scenario.
    """

    experiment: str = "baseline"
    n_users: int = 100
    horizon: int = 100
    reps: int = 1000
    seed: int = 42
    c_rev: float = 1.0
    ridge: float = 0.001
    noise_sd: float = 1.0
    coupled_noise: bool = False
    y_capacity: Optional[float] = None
    alpha_low: Optional[float] = None
    alpha_high: Optional[float] = None
    beta_low: Optional[float] = None
    beta_high: Optional[float] = None
    d_low: Optional[float] = None
    d_high: Optional[float] = None
    out_dir: str = "results"

    def __post_init__(self):
        parse_experiment_kind(self.experiment)
        if self.n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {self.n_users}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.c_rev <= 0:
            raise ValueError(f"c_rev must be > 0, got {self.c_rev}")
        if self.ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        for lo, hi in self.intervals():
            if lo <= 0 or hi <= 0:
                raise ValueError(f"interval bounds must be > 0, got [{lo}, {hi}]")
            if lo > hi:
                raise ValueError(f"interval bounds out of order: [{lo}, {hi}]")

    def intervals(self) -> tuple[tuple[float, float], ...]:
        """Resolved (alpha, beta, d) sampling intervals."""
        family, _ = parse_experiment_kind(self.experiment)
        defaults = KIND_INTERVALS.get(family, KIND_INTERVALS["baseline"])
        overrides = (
            (self.alpha_low, self.alpha_high),
            (self.beta_low, self.beta_high),
            (self.d_low, self.d_high),
        )
        return tuple(
            (lo if lo is not None else dlo, hi if hi is not None else dhi)
            for (lo, hi), (dlo, dhi) in zip(overrides, defaults)
        )


_INT_KEYS = {"n_users", "horizon", "reps", "seed"}
_FLOAT_KEYS = {
    "c_rev",
    "ridge",
    "noise_sd",
    "y_capacity",
    "alpha_low",
    "alpha_high",
    "beta_low",
    "beta_high",
    "d_low",
    "d_high",
}
_BOOL_KEYS = {"coupled_noise"}
_CONFIG_KEYS = [f.name for f in fields(ExperimentConfig)]


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat key = value text ('#' starts a comment) into a config.

    Unknown or duplicate keys are rejected with the offending line
    number; omitted keys keep their defaults.
    """
    data: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key or not value:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key '{key}'")
        if key in data:
            raise ValueError(f"config line {lineno}: duplicate key '{key}'")
        if key in _INT_KEYS:
            data[key] = int(value)
        elif key in _FLOAT_KEYS:
            data[key] = float(value)
        elif key in _BOOL_KEYS:
            lowered = value.lower()
            if lowered not in ("true", "false"):
                raise ValueError(
                    f"config line {lineno}: expected true/false, got '{value}'"
                )
            data[key] = lowered == "true"
        else:
            data[key] = value
    return ExperimentConfig(**data)


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config as key = value lines; parse() of the result is exact."""
    lines = []
    for key in _CONFIG_KEYS:
        value = getattr(config, key)
        if value is None:
            continue
        if key in _BOOL_KEYS:
            rendered = "true" if value else "false"
        elif key in _FLOAT_KEYS:
            rendered = repr(float(value))
        else:
            rendered = str(value)
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"


def build_scenario(config: ExperimentConfig, rng: np.random.Generator) -> Scenario:
    """Draw one scenario: coefficients, demand, kind transform, alpha_rev.

    The stream is consumed in a fixed order (alphas, betas, demand,
    then any kind-specific draws) so scenarios are reproducible per
    (config, stream).
    """
    (a_lo, a_hi), (b_lo, b_hi), (d_lo, d_hi) = config.intervals()
    family, param = parse_experiment_kind(config.experiment)
    n = config.n_users
    t_hor = config.horizon
    alphas = rng.uniform(a_lo, a_hi, n)
    betas = rng.uniform(b_lo, b_hi, n)
    if family == "blocked-dt":
        block = int(param)
        n_blocks = math.ceil(t_hor / block)
        d = np.repeat(rng.uniform(d_lo, d_hi, n_blocks), block)[:t_hor]
    else:
        d = rng.uniform(d_lo, d_hi, t_hor)
        if family == "repeated-dt":
            # guard against 0.3*100 = 30.000000000000004 ceiling to 31
            k = math.ceil(param * t_hor - 1e-9)
            if k >= 1:
                idx = rng.choice(t_hor, size=k, replace=False)
                d[idx] = rng.uniform(d_lo, d_hi)
    alpha_rev = config.c_rev * float(d.max())
    return Scenario(
        population=Population.from_arrays(alphas, betas),
        demand=DemandProfile(tuple(float(v) for v in d)),
        alpha_rev=alpha_rev,
        noise_sd=config.noise_sd,
        seed=config.seed,
    )


def _fmt(value) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(value))


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    """Per-slot CSV of one episode (fixed column order)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            [
                "t",
                "d_t",
                "lambda_online",
                "lambda_star",
                "gamma1_hat",
                "gamma2_hat",
                "Q_online",
                "Q_star",
                "cost_online",
                "cost_star",
            ]
        )
        for i in range(traj.t.shape[0]):
            w.writerow(
                [
                    str(int(traj.t[i])),
                    _fmt(traj.d[i]),
                    _fmt(traj.lambda_online[i]),
                    _fmt(traj.lambda_star[i]),
                    _fmt(traj.gamma1_hat[i]),
                    _fmt(traj.gamma2_hat[i]),
                    _fmt(traj.q_online[i]),
                    _fmt(traj.q_star[i]),
                    _fmt(traj.cost_online[i]),
                    _fmt(traj.cost_star[i]),
                ]
            )


def write_regret_csv(path: Path, report: RegretReport) -> None:
    """Per-slot regret/bias/variance CSV (fixed column order)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            [
                "t",
                "R_t_mean",
                "R_t_se",
                "cum_regret",
                "lambda_bias",
                "lambda_var",
                "gamma1_bias",
                "gamma1_var",
            ]
        )
        for i in range(report.t.shape[0]):
            w.writerow(
                [
                    str(int(report.t[i])),
                    _fmt(report.gap_mean[i]),
                    _fmt(report.gap_se[i]),
                    _fmt(report.cum_regret[i]),
                    _fmt(report.lambda_bias[i]),
                    _fmt(report.lambda_var[i]),
                    _fmt(report.gamma1_bias[i]),
                    _fmt(report.gamma1_var[i]),
                ]
            )


def _summarize_analysis(
    report: RegretReport, sweep: SweepResult, t_hor: int
) -> dict:
    """Headline analysis numbers plus the pass/fail acceptance checks."""
    tracking = median_tracking_error(sweep)
    if t_hor >= 50:
        tail = tracking[49:]
        tracking_max = float(tail.max())
        tracking_pass = bool(tracking_max < 0.05)
    else:
        tracking_max = None
        tracking_pass = None
    if t_hor >= 10:
        b2 = report.lambda_bias[9:] ** 2
        bias_below_var = bool(np.all(b2 < report.lambda_var[9:]))
    else:
        bias_below_var = None
    return {
        "c1": float(report.c1),
        "c2": float(report.c2),
        "decay_slope": float(report.decay_slope),
        "decay_window": [float(report.decay_window[0]), float(report.decay_window[1])],
        "k1": float(report.k1),
        "k2": float(report.k2),
        "t0": int(report.t0),
        "ratio_cap": float(report.ratio_cap),
        "cum_regret_final": float(report.cum_regret[-1]),
        "tracking_median_max_from_50": tracking_max,
        "checks": {
            "tracking_pass": tracking_pass,
            "gap_slope_pass": bool(-1.3 <= report.decay_slope <= -0.7),
            "log_bound_pass": bool(report.log_bound_passed),
            "bias_squared_below_variance_from_10": bias_below_var,
        },
    }


def run_experiment(config: ExperimentConfig) -> dict:
    """Scenario draw, offline solve, replication sweep, analysis, files.

    Writes trajectory.csv (replication 0), regret.csv (when analysis is
    possible), and summary.json under config.out_dir, and returns the
    summary dict. Analysis failures that have a defined meaning (fewer
    than 2 replications, horizon too short for the fit window) are
    reported in the summary instead of aborting; the per-slot CSV is
    always written.
    """
    out_dir = Path(config.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory '{out_dir}': {exc}") from exc

    scenario = build_scenario(config, substream(config.seed, 0))
    y_closed = compute_y_star(scenario)
    y = y_closed if config.y_capacity is None else config.y_capacity
    sweep = run_replications(
        scenario,
        y,
        config.reps,
        config.seed,
        ridge_param=config.ridge,
        lambda_init=None,
        coupled_noise=config.coupled_noise,
    )

    write_trajectory_csv(out_dir / "trajectory.csv", sweep.first_trajectory)

    (a_int, b_int, d_int) = config.intervals()
    summary: dict = {
        "experiment": config.experiment,
        "n_users": config.n_users,
        "horizon": config.horizon,
        "reps": config.reps,
        "seed": config.seed,
        "c_rev": float(config.c_rev),
        "ridge": float(config.ridge),
        "noise_sd": float(config.noise_sd),
        "coupled_noise": bool(config.coupled_noise),
        "alpha_interval": [a_int[0], a_int[1]],
        "beta_interval": [b_int[0], b_int[1]],
        "d_interval": [d_int[0], d_int[1]],
        "alpha_rev": float(scenario.alpha_rev),
        "gamma1": float(scenario.population.gamma1),
        "gamma2": float(scenario.population.gamma2),
        "y_star_closed_form": float(y_closed),
        "y_capacity": float(y),
        "degenerate_events": int(sweep.degenerate_events),
        "fallback_events": int(sweep.fallback_events),
    }

    try:
        report = build_regret_report(sweep)
    except ValueError as exc:
        summary["analysis"] = None
        summary["analysis_note"] = str(exc)
        print(f"regret analysis skipped: {exc}", file=sys.stderr)
    else:
        write_regret_csv(out_dir / "regret.csv", report)
        summary["analysis"] = _summarize_analysis(report, sweep, config.horizon)

    with open(out_dir / "summary.json", "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return summary


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    """dataclasses.replace with None-valued changes dropped."""
    filtered = {k: v for k, v in changes.items() if v is not None}
    return replace(config, **filtered) if filtered else config
