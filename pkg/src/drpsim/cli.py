"""Command-line experiment runner.

Subcommands:
    offline    print the committed capacity and optimal price path as CSV
    simulate   run one online episode and emit its per-slot CSV
    regret     run a replication sweep, write analysis CSVs + summary.json
    sweep      run the whole experiment grid into per-kind subdirectories

Settings come from (in increasing precedence) built-in defaults, the
--config file, command-line flags, and finally the environment
variables DRPSIM_SEED and DRPSIM_OUT, which override the seed and the
output directory no matter where they were set.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import (
    ExperimentConfig,
    build_scenario,
    parse_config,
    run_experiment,
    with_overrides,
    write_trajectory_csv,
)
from .model import Scenario
from .offline import closed_form_solve, compute_y_star
from .online import OnlineConfig, run_episode
from .rng import substream

__all__ = ["main"]

SWEEP_GRID = (
    "baseline",
    "paramset2",
    "repeated-dt:0.2",
    "repeated-dt:0.3",
    "repeated-dt:0.4",
    "blocked-dt:4",
)

_CONFIG_HELP = """\
config file format: one 'key = value' per line, '#' starts a comment.
keys (defaults in parentheses):
  experiment    (baseline)  baseline | paramset2 | repeated-dt:P | blocked-dt:B
  n_users       (100)       population size N
  horizon       (100)       number of slots T
  reps          (1000)      Monte Carlo replications
  seed          (42)        master seed; every stream derives from it
  c_rev         (1.0)       revenue price constant: alpha_rev = c_rev * max d_t
  ridge         (0.001)     estimator regularization weight
  noise_sd      (1.0)       per-user response noise standard deviation
  coupled_noise (false)     counterfactual costs reuse the online noise draws
  y_capacity    (unset)     committed capacity override (default: closed form)
  alpha_low/alpha_high, beta_low/beta_high, d_low/d_high
                (unset)     sampling-interval overrides for the chosen kind
  out_dir       (results)   output directory

environment: DRPSIM_SEED and DRPSIM_OUT override seed and output
directory over any file or flag value.
"""


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge defaults <- config file <- flags <- environment."""
    if args.config is not None:
        text = Path(args.config).read_text()
        config = parse_config(text)
    else:
        config = ExperimentConfig()
    config = with_overrides(
        config,
        seed=args.seed,
        reps=args.reps,
        out_dir=args.out,
        experiment=args.experiment,
        y_capacity=args.y_capacity,
    )
    if args.coupled_noise:
        config = replace(config, coupled_noise=True)
    env_seed = os.environ.get("DRPSIM_SEED")
    if env_seed is not None:
        config = replace(config, seed=int(env_seed))
    env_out = os.environ.get("DRPSIM_OUT")
    if env_out is not None:
        config = replace(config, out_dir=env_out)
    return config


def _scenario_and_capacity(config: ExperimentConfig) -> tuple[Scenario, float]:
    scenario = build_scenario(config, substream(config.seed, 0))
    y = compute_y_star(scenario) if config.y_capacity is None else config.y_capacity
    return scenario, y


def _fmt(value: float) -> str:
    return repr(float(value))


def cmd_offline(args: argparse.Namespace) -> int:
    config = _load_config(args)
    scenario, y = _scenario_and_capacity(config)
    sol = closed_form_solve(scenario, y)
    print("key,value")
    print(f"y_capacity,{_fmt(sol.y_star)}")
    print(f"alpha_rev,{_fmt(scenario.alpha_rev)}")
    print(f"gamma1,{_fmt(scenario.population.gamma1)}")
    print(f"gamma2,{_fmt(scenario.population.gamma2)}")
    print(f"lambda_star_min,{_fmt(sol.lambda_star.min())}")
    print(f"lambda_star_max,{_fmt(sol.lambda_star.max())}")
    print()
    print("t,d_t,lambda_star,q_star")
    for i in range(scenario.horizon):
        print(
            f"{i + 1},{_fmt(scenario.demand.d[i])},"
            f"{_fmt(sol.lambda_star[i])},{_fmt(sol.q_star[i])}"
        )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    scenario, y = _scenario_and_capacity(config)
    online = OnlineConfig(
        scenario=scenario,
        y_capacity=y,
        ridge_param=config.ridge,
        coupled_noise=config.coupled_noise,
    )
    traj = run_episode(online, substream(config.seed, 1, 0))
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "trajectory.csv"
    write_trajectory_csv(path, traj)
    print(f"wrote {path}")
    return 0


def cmd_regret(args: argparse.Namespace) -> int:
    config = _load_config(args)
    summary = run_experiment(config)
    analysis = summary.get("analysis")
    print(f"experiment: {summary['experiment']}")
    print(f"y_capacity: {summary['y_capacity']}")
    if analysis is None:
        print(f"analysis: {summary.get('analysis_note', 'unavailable')}")
    else:
        print(f"decay_slope: {analysis['decay_slope']}")
        print(f"log_bound: k1={analysis['k1']} k2={analysis['k2']}")
        for name, ok in analysis["checks"].items():
            print(f"{name}: {ok}")
    print(f"outputs in {config.out_dir}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    base_out = Path(config.out_dir)
    any_failed = False
    for kind in SWEEP_GRID:
        sub_dir = base_out / kind.replace(":", "-")
        sub_config = replace(config, experiment=kind, out_dir=str(sub_dir))
        summary = run_experiment(sub_config)
        analysis = summary.get("analysis")
        if analysis is None:
            status = summary.get("analysis_note", "no analysis")
            any_failed = True
        else:
            checks = analysis["checks"]
            failed = [k for k, v in checks.items() if v is False]
            status = "ok" if not failed else "FAIL " + ",".join(failed)
            any_failed = any_failed or bool(failed)
        print(f"{kind}: {status}")
    print(f"outputs in {base_out}")
    return 1 if any_failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="drpsim",
        description="Online demand-response pricing simulator.",
        epilog=_CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed")
    common.add_argument("--reps", type=int, metavar="INT", help="replication count")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument(
        "--experiment",
        metavar="KIND",
        help="baseline | paramset2 | repeated-dt:P | blocked-dt:B",
    )
    common.add_argument(
        "--coupled-noise",
        action="store_true",
        help="couple counterfactual costs to the online noise draws",
    )
    common.add_argument(
        "--y-capacity", type=float, metavar="FLOAT", help="override committed capacity"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "offline", parents=[common], help="print capacity and optimal price path"
    ).set_defaults(handler=cmd_offline)
    sub.add_parser(
        "simulate", parents=[common], help="run one episode, write per-slot CSV"
    ).set_defaults(handler=cmd_simulate)
    sub.add_parser(
        "regret", parents=[common], help="replication sweep + regret analysis"
    ).set_defaults(handler=cmd_regret)
    sub.add_parser(
        "sweep", parents=[common], help="run the full experiment grid"
    ).set_defaults(handler=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
