import json
import warnings

import numpy as np
import pytest

from drpsim.experiments import (
    ExperimentConfig,
    build_scenario,
    parse_config,
    parse_experiment_kind,
    run_experiment,
    serialize_config,
    with_overrides,
    write_regret_csv,
    write_trajectory_csv,
)
from drpsim import build_regret_report, run_replications
from drpsim.rng import substream


# ---------------------------------------------------------------- kinds


def test_parse_kind_named_families():
    assert parse_experiment_kind("baseline") == ("baseline", None)
    assert parse_experiment_kind("paramset2") == ("paramset2", None)
    assert parse_experiment_kind("repeated-dt:0.3") == ("repeated-dt", 0.3)
    assert parse_experiment_kind("repeated-dt:1.0") == ("repeated-dt", 1.0)
    assert parse_experiment_kind("blocked-dt:4") == ("blocked-dt", 4.0)


def test_parse_kind_errors():
    with pytest.raises(ValueError, match="requires a fraction"):
        parse_experiment_kind("repeated-dt")
    with pytest.raises(ValueError, match=r"must be in \[0, 1\]"):
        parse_experiment_kind("repeated-dt:1.5")
    with pytest.raises(ValueError, match="requires a block size"):
        parse_experiment_kind("blocked-dt")
    with pytest.raises(ValueError, match="must be >= 1"):
        parse_experiment_kind("blocked-dt:0")
    with pytest.raises(ValueError, match="unknown experiment kind"):
        parse_experiment_kind("warmstart")


# --------------------------------------------------------------- config


def test_config_defaults_and_intervals():
    cfg = ExperimentConfig()
    assert cfg.experiment == "baseline"
    assert cfg.intervals() == ((1.0, 2.0), (4.0, 8.0), (3.0, 6.0))
    assert ExperimentConfig(experiment="paramset2").intervals() == (
        (1.0, 3.0),
        (3.0, 10.0),
        (2.0, 5.0),
    )
    # variant families fall back to the baseline intervals
    assert ExperimentConfig(experiment="repeated-dt:0.2").intervals() == cfg.intervals()
    assert ExperimentConfig(experiment="blocked-dt:4").intervals() == cfg.intervals()


def test_config_interval_overrides():
    cfg = ExperimentConfig(alpha_low=0.5, d_high=9.0)
    assert cfg.intervals() == ((0.5, 2.0), (4.0, 8.0), (3.0, 9.0))


def test_config_validation():
    with pytest.raises(ValueError, match="n_users"):
        ExperimentConfig(n_users=0)
    with pytest.raises(ValueError, match="horizon"):
        ExperimentConfig(horizon=0)
    with pytest.raises(ValueError, match="reps"):
        ExperimentConfig(reps=0)
    with pytest.raises(ValueError, match="seed"):
        ExperimentConfig(seed=-1)
    with pytest.raises(ValueError, match="c_rev"):
        ExperimentConfig(c_rev=0.0)
    with pytest.raises(ValueError, match="ridge"):
        ExperimentConfig(ridge=-0.001)
    with pytest.raises(ValueError, match="noise_sd"):
        ExperimentConfig(noise_sd=-1.0)
    with pytest.raises(ValueError, match="unknown experiment kind"):
        ExperimentConfig(experiment="warmstart")
    with pytest.raises(ValueError, match="out of order"):
        ExperimentConfig(alpha_low=2.5)  # default alpha_high is 2.0
    with pytest.raises(ValueError, match="must be > 0"):
        ExperimentConfig(beta_low=-1.0)


def test_parse_config_happy_path():
    text = """
    # demand-response run, small
    experiment = repeated-dt:0.3
    n_users = 12   # population size
    horizon = 25
    c_rev = 2.5
    coupled_noise = true
    y_capacity = 4.0
    """
    cfg = parse_config(text)
    assert cfg.experiment == "repeated-dt:0.3"
    assert cfg.n_users == 12
    assert cfg.horizon == 25
    assert cfg.c_rev == 2.5
    assert cfg.coupled_noise is True
    assert cfg.y_capacity == 4.0
    assert cfg.reps == 1000  # untouched default


def test_parse_config_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="config line 2: unknown key 'users'"):
        parse_config("n_users = 5\nusers = 3\n")
    with pytest.raises(ValueError, match="config line 3: duplicate key"):
        parse_config("n_users = 5\nhorizon = 7\nn_users = 9\n")
    with pytest.raises(ValueError, match="config line 1: expected 'key = value'"):
        parse_config("n_users 5\n")
    with pytest.raises(ValueError, match="expected 'key = value'"):
        parse_config("n_users =\n")
    with pytest.raises(ValueError, match="expected true/false"):
        parse_config("coupled_noise = yes\n")


def test_config_round_trip():
    cfg = ExperimentConfig(
        experiment="blocked-dt:5",
        n_users=17,
        horizon=33,
        reps=4,
        seed=9,
        c_rev=1.75,
        ridge=0.01,
        noise_sd=0.3,
        coupled_noise=True,
        d_low=2.5,
        d_high=7.5,
        out_dir="elsewhere",
    )
    assert parse_config(serialize_config(cfg)) == cfg
    # None-valued fields are omitted and come back as None
    assert parse_config(serialize_config(ExperimentConfig())) == ExperimentConfig()


def test_with_overrides_drops_none():
    cfg = ExperimentConfig()
    assert with_overrides(cfg, seed=None, reps=None) is cfg
    bumped = with_overrides(cfg, seed=None, reps=7)
    assert bumped.reps == 7
    assert bumped.seed == cfg.seed


# ------------------------------------------------------------ scenarios


def test_build_scenario_baseline_ranges():
    cfg = ExperimentConfig(n_users=50, horizon=30, seed=5)
    sc = build_scenario(cfg, substream(cfg.seed, 0))
    pop = sc.population
    assert pop.n == 50
    assert np.all((pop.alphas >= 1.0) & (pop.alphas <= 2.0))
    assert np.all((pop.betas >= 4.0) & (pop.betas <= 8.0))
    d = np.asarray(sc.demand.values)
    assert d.shape == (30,)
    assert np.all((d >= 3.0) & (d <= 6.0))
    assert sc.alpha_rev == cfg.c_rev * d.max()
    assert sc.noise_sd == 1.0


def test_build_scenario_paramset2_ranges():
    cfg = ExperimentConfig(experiment="paramset2", n_users=40, horizon=20, seed=5)
    sc = build_scenario(cfg, substream(cfg.seed, 0))
    assert np.all((sc.population.alphas >= 1.0) & (sc.population.alphas <= 3.0))
    assert np.all((sc.population.betas >= 3.0) & (sc.population.betas <= 10.0))
    d = np.asarray(sc.demand.values)
    assert np.all((d >= 2.0) & (d <= 5.0))


def test_build_scenario_reproducible():
    cfg = ExperimentConfig(n_users=8, horizon=6, seed=11)
    a = build_scenario(cfg, substream(cfg.seed, 0))
    b = build_scenario(cfg, substream(cfg.seed, 0))
    assert np.array_equal(a.population.alphas, b.population.alphas)
    assert np.array_equal(a.population.betas, b.population.betas)
    assert np.array_equal(a.demand.values, b.demand.values)
    assert a.alpha_rev == b.alpha_rev


def test_blocked_demand_structure():
    cfg = ExperimentConfig(experiment="blocked-dt:4", horizon=100, seed=3)
    d = np.asarray(build_scenario(cfg, substream(3, 0)).demand.values)
    blocks = d.reshape(25, 4)
    assert np.all(blocks == blocks[:, :1])
    assert len(np.unique(d)) == 25


def test_blocked_demand_partial_last_block():
    cfg = ExperimentConfig(experiment="blocked-dt:4", horizon=10, seed=3)
    d = np.asarray(build_scenario(cfg, substream(3, 0)).demand.values)
    assert d.shape == (10,)
    assert len(set(d[0:4])) == 1
    assert len(set(d[4:8])) == 1
    assert len(set(d[8:10])) == 1
    assert len(np.unique(d)) == 3


@pytest.mark.parametrize(
    "fraction,horizon,expected",
    [(0.2, 100, 20), (0.3, 100, 30), (0.4, 100, 40), (0.25, 10, 3)],
)
def test_repeated_demand_share_counts(fraction, horizon, expected):
    # ceil(p*T) slots share one freshly drawn value; 0.3*100 must give
    # 30 despite 0.3*100 = 30.000000000000004 in floating point.
    cfg = ExperimentConfig(experiment=f"repeated-dt:{fraction}", horizon=horizon, seed=13)
    d = np.asarray(build_scenario(cfg, substream(13, 0)).demand.values)
    _, counts = np.unique(d, return_counts=True)
    assert counts.max() == expected
    assert np.sort(counts)[:-1].max(initial=1) == 1  # everything else distinct


def test_repeated_zero_fraction_is_baseline_draw():
    base = build_scenario(ExperimentConfig(horizon=15, seed=2), substream(2, 0))
    rep0 = build_scenario(
        ExperimentConfig(experiment="repeated-dt:0.0", horizon=15, seed=2),
        substream(2, 0),
    )
    assert np.array_equal(base.demand.values, rep0.demand.values)


def test_alpha_rev_reflects_transformed_demand():
    # with every slot sharing one value, max(d) is that shared value,
    # which only exists after the repeat transform runs
    cfg = ExperimentConfig(experiment="repeated-dt:1.0", horizon=12, seed=4, c_rev=2.0)
    sc = build_scenario(cfg, substream(4, 0))
    d = np.asarray(sc.demand.values)
    assert len(np.unique(d)) == 1
    assert sc.alpha_rev == 2.0 * d[0]


# ----------------------------------------------------------- csv output


@pytest.fixture(scope="module")
def tiny_sweep():
    cfg = ExperimentConfig(n_users=5, horizon=12, reps=4, seed=3)
    sc = build_scenario(cfg, substream(cfg.seed, 0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return run_replications(sc, 1.0, cfg.reps, cfg.seed)


def test_trajectory_csv_round_trip(tiny_sweep, tmp_path):
    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(path, tiny_sweep.first_trajectory)
    lines = path.read_text().splitlines()
    assert lines[0] == (
        "t,d_t,lambda_online,lambda_star,gamma1_hat,gamma2_hat,"
        "Q_online,Q_star,cost_online,cost_star"
    )
    assert len(lines) == 13
    rows = [line.split(",") for line in lines[1:]]
    assert [int(r[0]) for r in rows] == list(range(1, 13))
    traj = tiny_sweep.first_trajectory
    assert [float(r[2]) for r in rows] == list(traj.lambda_online)
    assert [float(r[9]) for r in rows] == list(traj.cost_star)


def test_regret_csv_round_trip(tiny_sweep, tmp_path):
    report = build_regret_report(tiny_sweep, decay_window=(3.0, 12.0))
    path = tmp_path / "regret.csv"
    write_regret_csv(path, report)
    lines = path.read_text().splitlines()
    assert lines[0] == (
        "t,R_t_mean,R_t_se,cum_regret,lambda_bias,lambda_var,gamma1_bias,gamma1_var"
    )
    rows = [line.split(",") for line in lines[1:]]
    assert [float(r[1]) for r in rows] == list(report.gap_mean)
    assert [float(r[3]) for r in rows] == list(report.cum_regret)
    assert [float(r[7]) for r in rows] == list(report.gamma1_var)


# -------------------------------------------------------- run_experiment


def test_run_experiment_writes_outputs(tmp_path):
    cfg = ExperimentConfig(
        n_users=20, horizon=40, reps=10, seed=7, out_dir=str(tmp_path / "out")
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        summary = run_experiment(cfg)
    out = tmp_path / "out"
    assert (out / "trajectory.csv").exists()
    assert (out / "regret.csv").exists()
    with open(out / "summary.json") as f:
        on_disk = json.load(f)
    assert on_disk == summary
    assert "out_dir" not in summary
    assert summary["reps"] == 10
    assert 3.0 <= summary["alpha_rev"] <= 6.0  # c_rev=1 times max d, d in [3,6]
    checks = summary["analysis"]["checks"]
    assert checks["tracking_pass"] is None  # horizon 40 < 50: no tail to judge
    assert isinstance(checks["log_bound_pass"], bool)
    assert isinstance(checks["gap_slope_pass"], bool)


def test_run_experiment_single_replication(tmp_path, capsys):
    cfg = ExperimentConfig(
        n_users=6, horizon=8, reps=1, seed=5, out_dir=str(tmp_path / "solo")
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        summary = run_experiment(cfg)
    assert summary["analysis"] is None
    assert "need >= 2 replications" in summary["analysis_note"]
    assert not (tmp_path / "solo" / "regret.csv").exists()
    assert (tmp_path / "solo" / "trajectory.csv").exists()
    assert "regret analysis skipped" in capsys.readouterr().err


def test_run_experiment_outputs_are_path_independent(tmp_path):
    base = dict(n_users=5, horizon=12, reps=3, seed=3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        run_experiment(ExperimentConfig(out_dir=str(tmp_path / "a"), **base))
        run_experiment(ExperimentConfig(out_dir=str(tmp_path / "b"), **base))
    for name in ("trajectory.csv", "regret.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()
