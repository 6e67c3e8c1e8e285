import io
import math

import numpy as np
import pytest

from mpbandits import cli
from mpbandits.errors import ConfigurationError
from mpbandits.harness import (
    Aggregate,
    ExperimentConfig,
    config_echo,
    fit_slope,
    parse_config_text,
    results_csv,
    run_experiment,
    schema_text,
    tv_distance,
)


def test_fit_slope_linear_growth():
    pts = [(T, 3.0 * T) for T in (100, 200, 400, 800)]
    assert fit_slope(pts).slope == pytest.approx(1.0, abs=1e-9)


def test_fit_slope_sqrt_growth():
    pts = [(T, 2.0 * math.sqrt(T)) for T in (100, 200, 400, 800)]
    assert fit_slope(pts).slope == pytest.approx(0.5, abs=1e-9)


def test_fit_slope_three_quarters_with_noise():
    rng = np.random.default_rng(0)
    pts = [
        (T, T**0.75 * (1 + 0.05 * rng.standard_normal()))
        for T in np.geomspace(1000, 64000, 7).astype(int)
    ]
    fit = fit_slope(pts)
    assert 0.70 <= fit.slope <= 0.80
    assert 0.9 <= fit.r2 <= 1.0


def test_fit_slope_drops_nonpositive_points():
    with pytest.warns(UserWarning):
        fit = fit_slope([(10, -1.0), (100, 10.0), (200, 14.0), (400, 20.0)])
    assert len(fit.points) == 3
    with pytest.raises(ConfigurationError):
        fit_slope([(10, 0.0), (100, 10.0), (200, 14.0)])


def test_tv_distance_examples():
    assert tv_distance([10, 10], [0.5, 0.5]) == pytest.approx(0.0)
    assert tv_distance([7, 0], [0.5, 0.5]) == pytest.approx(0.5)
    with pytest.raises(ConfigurationError):
        tv_distance([1, 2, 3], [0.5, 0.5])
    with pytest.raises(ConfigurationError):
        tv_distance([0, 0], [0.5, 0.5])


def test_tv_distance_concentrates_on_samples():
    rng = np.random.default_rng(1)
    law = np.array([0.1, 0.2, 0.3, 0.4])
    draws = rng.choice(4, size=10**6, p=law)
    counts = np.bincount(draws, minlength=4)
    assert tv_distance(counts, law) < 0.005


def test_config_parse_round_trip():
    text = """
    # comment line
    model = no_info
    K = 3
    T = 4096,16384
    reps = 2
    seed = 7
    means = 0.1,0.5,0.9
    """
    cfg = parse_config_text(text)
    assert cfg.model == "no_info"
    assert cfg.T == [4096, 16384]
    assert cfg.means == [0.1, 0.5, 0.9]
    cfg.validate()
    assert "model=no_info" in config_echo(cfg)


def test_config_parse_rejects_unknown_keys_and_bad_lines():
    with pytest.raises(ConfigurationError):
        parse_config_text("bogus = 3")
    with pytest.raises(ConfigurationError):
        parse_config_text("model no_info")


def test_schema_text_lists_all_keys():
    text = schema_text()
    for key in ("model", "K", "T", "adversary", "reps", "seed"):
        assert f"\n{key} = " in text or text.startswith(f"{key} = ")


def test_config_cross_field_validation():
    with pytest.raises(ConfigurationError):
        ExperimentConfig(model="no_info", K=3, T=[8]).validate()  # T < K^2
    with pytest.raises(ConfigurationError):
        ExperimentConfig(model="collision_info", m=3, K=4).validate()
    with pytest.raises(ConfigurationError):
        ExperimentConfig(adversary="adaptive", K=4, means=[0.1] * 4).validate()
    with pytest.raises(ConfigurationError):
        ExperimentConfig(model="no_info", m=3, K=4, T=[1001],
                         means=[0.1] * 4).validate()
    cfg = ExperimentConfig(model="no_info", m=3, K=4, T=[12**3],
                           means=[0.1, 0.2, 0.3, 0.4])
    cfg.validate()


def test_run_experiment_deterministic_csv():
    cfg = ExperimentConfig(model="collision_info_oracle", K=3, T=[600],
                           reps=2, seed=5)
    a = results_csv(cfg, run_experiment(cfg))
    b = results_csv(cfg, run_experiment(cfg))
    assert a == b
    assert a.startswith("# config: model=collision_info_oracle")


def test_run_experiment_zero_collisions_column():
    cfg = ExperimentConfig(model="collision_info_oracle", K=3, T=[500],
                           reps=3, seed=1)
    aggs = run_experiment(cfg)
    assert aggs[0].mean_of("collision_rounds") == 0.0


def test_stderr_matches_direct_recomputation():
    cfg = ExperimentConfig(model="no_info", K=3, T=[256], reps=5, seed=3)
    agg = run_experiment(cfg)[0]
    regs = [r.regret for r in agg.reports]
    expect = np.std(regs, ddof=1) / math.sqrt(len(regs))
    assert agg.stderr_regret == pytest.approx(expect)


def test_aggregation_is_order_insensitive():
    cfg = ExperimentConfig(model="no_info", K=3, T=[256], reps=4, seed=9)
    agg = run_experiment(cfg)[0]
    shuffled = Aggregate(T=agg.T, reports=list(reversed(agg.reports)))
    assert shuffled.mean_regret == pytest.approx(agg.mean_regret)
    assert shuffled.stderr_regret == pytest.approx(agg.stderr_regret)


def test_cli_run_and_outputs(tmp_path, capsys):
    out = tmp_path / "res.csv"
    rc = cli.main([
        "run", "--model", "collision_info_oracle", "--K", "3", "--T", "400",
        "--reps", "2", "--seed", "11", "--out", str(out),
    ])
    assert rc == 0
    text = out.read_text()
    assert text.splitlines()[1].startswith("T,mean_regret")
    assert capsys.readouterr().out == text


def test_cli_scaling_prints_slope(capsys):
    rc = cli.main([
        "scaling", "--model", "no_info", "--K", "3", "--T", "256,512,1024",
        "--reps", "2", "--seed", "2",
    ])
    assert rc == 0
    assert "# slope fit:" in capsys.readouterr().out


def test_cli_print_schema(capsys):
    rc = cli.main(["run", "--print-schema"])
    assert rc == 0
    assert "model" in capsys.readouterr().out


def test_cli_adversary_gen(tmp_path, capsys):
    out = tmp_path / "loss.csv"
    rc = cli.main([
        "adversary", "gen", "--adversary", "remark", "--K", "3", "--T", "9",
        "--out", str(out),
    ])
    assert rc == 0
    assert out.read_text().startswith("# K=3 T=9")


def test_cli_rejects_bad_config(capsys):
    rc = cli.main(["run", "--model", "bogus"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_cli_verify_small(capsys):
    rc = cli.main(["verify", "--K", "3", "--T", "1200", "--seed", "4"])
    out = capsys.readouterr().out
    assert rc == 0, out
    assert "PASS" in out and "FAIL" not in out
