import json

import pytest

from bklab.harness import cli
from bklab.harness.config import ConfigError, ExperimentConfig, scenario_rng
from bklab.harness.experiments import RUNNERS, parse_subject

# with 256-bit keys, rho = 0.99 erases only 3 bits and a random fill guesses them 1 time in 8
SMALL = dict(rhos=(0.0, 0.5, 0.9, 1.0), ell=256, delta=0.1, lam_est=4.0, trials=50, perturbation_trials=100,
             incompress_trials=2000, incompress_tolerance=0.05, pac_runs=3, pac_eval_samples=5)


@pytest.fixture
def small_ini(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(ExperimentConfig(**SMALL).to_ini())
    return path


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


def test_defaults():
    cfg = ExperimentConfig()
    assert (cfg.n, cfg.ell, cfg.lam, cfg.t_class) == (8, 1024, 128, 5)
    assert cfg.replace(n=10).t_class == 6


def test_ini_roundtrip():
    cfg = ExperimentConfig(**SMALL, eta=0.25, master_seed=2**64 - 1)
    assert ExperimentConfig.from_ini(cfg.to_ini()) == cfg


@pytest.mark.parametrize("text", ["[problem]\nn = 1\n", "[nope]\nx = 1\n", "[problem]\nfoo = 3\n",
                                  "[attack]\ndelta = abc\n", "not an ini"])
def test_bad_ini(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini(text)


def test_rng_streams_are_independent_and_stable():
    cfg = ExperimentConfig(master_seed=7)
    a = scenario_rng(cfg, "majority").integers(2**63)
    assert a == scenario_rng(cfg, "majority").integers(2**63)
    assert a != scenario_rng(cfg, "majority", 1).integers(2**63)
    assert a != scenario_rng(cfg.replace(master_seed=8), "majority").integers(2**63)


def test_parse_subject():
    assert parse_subject("partial:2,0,2", 8) == ("partial", [0, 2])
    assert parse_subject("partial:", 8) == ("partial", [])
    assert parse_subject("full", 4) == ("full", [0, 1, 2, 3])
    assert parse_subject("known:3", 8) == ("known", [3])
    for bad in ("partial:9", "known:1,2", "everything"):
        with pytest.raises(ConfigError):
            parse_subject(bad, 8)


def test_dump_config(capsys):
    assert run_cli("--dump-config") == 0
    text = capsys.readouterr().out
    assert ExperimentConfig.from_ini(text) == ExperimentConfig()


def test_missing_config_exit_code(tmp_path, capsys):
    assert run_cli("known-metric", "--config", tmp_path / "absent.ini", "--out", tmp_path) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_usage_errors():
    assert run_cli() == 2
    assert run_cli("bogus") == 2
    assert run_cli("known-metric", "--seed", -1) == 2


def test_all_small_is_deterministic(small_ini, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert run_cli("all", "--config", small_ini, "--seed", 3, "--out", out) == 0
        outs.append(out)
    for name in ("results.jsonl", "summary.txt"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    records = [json.loads(line) for line in (outs[0] / "results.jsonl").read_text().splitlines()]
    assert [r["scenario"] for r in records] == list(RUNNERS)
    assert all(r["passed"] and "wall_clock" not in r for r in records)
    timings = (outs[0] / "timings.jsonl").read_text().splitlines()
    assert len(timings) == 5 and "wall_clock" in timings[0]


def test_full_subject_aborts_and_passes(small_ini, tmp_path):
    assert run_cli("adaptive-attack", "--config", small_ini, "--subject", "full", "--out", tmp_path) == 0
    rec = json.loads((tmp_path / "results.jsonl").read_text())
    m = rec["measurements"]
    assert m["outcome"]["status"] == "abort"
    assert m["outcome"]["reason"] == "TooManySensitive"
    assert not m["within_size_bound"]


def test_zero_key_subject_is_below_threshold(small_ini, tmp_path):
    assert run_cli("adaptive-attack", "--config", small_ini, "--subject", "partial:", "--out", tmp_path) == 0
    m = json.loads((tmp_path / "results.jsonl").read_text())["measurements"]
    assert m["below_epsilon_threshold"]
    assert m["model_bits"] == 0


def test_adaptive_query_accounting(small_ini, tmp_path):
    run_cli("adaptive-attack", "--config", small_ini, "--out", tmp_path)
    m = json.loads((tmp_path / "results.jsonl").read_text())["measurements"]
    f = m["fooling"]
    assert f["probe_queries"] == m["expected_probe_queries"] == 2 * 8 * 400
    assert m["oracle_query_count"] == f["probe_queries"] + f["fooling_queries"] + f["baseline_queries"]


def test_env_out_dir(small_ini, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert run_cli("incompressibility", "--config", small_ini) == 0
    assert (tmp_path / "env" / "results.jsonl").exists()
    assert run_cli("incompressibility", "--config", small_ini, "--out", tmp_path / "flag") == 0
    assert (tmp_path / "flag" / "summary.txt").exists()


def test_failing_scenario_exit_code(small_ini, tmp_path):
    # a tolerance no finite sample meets
    text = small_ini.read_text().replace("incompress_tolerance = 0.05", "incompress_tolerance = 0.0")
    small_ini.write_text(text)
    assert run_cli("incompressibility", "--config", small_ini, "--out", tmp_path) == 1
