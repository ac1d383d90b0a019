import csv

import numpy as np
import pytest

from distbh.cli import main, read_config_file
from distbh.harness import (CSV_HEADER, METHODS, ConfigError, default_config, emit_csv,
                            run_experiment, run_trial)


def small(exp, **kw):
    kw.setdefault("nodes", 5)
    kw.setdefault("trials", 3)
    return default_config(exp, **kw)


def test_default_grids():
    c1 = default_config(1)
    assert (c1.grid_param, c1.grid, c1.mu_base, c1.size_rule) == ("n", (1e2, 1e3, 1e4, 1e5), 3.0, "uniform")
    assert (c1.alpha, c1.nodes, c1.trials, c1.lam, c1.l) == (0.2, 50, 200, 0.5, 0.5)
    assert default_config(2).grid[-1] == 1e6
    c3 = default_config(3)
    assert (c3.grid[0], c3.grid[-1], c3.n) == (2.0, 5.0, 10_000)
    assert default_config(4).grid[0] == 1e3 and default_config(4).heterogeneous_mu
    c5 = default_config(5)
    assert (c5.grid[0], c5.grid[-1], c5.n) == (0.0, 0.8, 1_000)


@pytest.mark.parametrize("kw", [dict(trials=0), dict(grid=()), dict(estimator="x"),
                                dict(alpha=1.5), dict(lam=1.0)])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        default_config(1, **kw)
    with pytest.raises(ConfigError):
        default_config(9)


def test_single_node_distributed_equals_central():
    cfg = small(1, nodes=1, trials=1, grid=(2000,))
    metrics, alphas = run_trial(cfg, 2000, 0)
    assert metrics["distributed"] == metrics["central"]
    assert alphas[0] == pytest.approx(0.2, rel=1e-12)


def test_all_null_has_zero_power():
    res = run_experiment(small(1, r1_max=0.0, grid=(500,)))
    assert all(r.power == 0.0 for r in res)


def test_rows_ordered_and_deterministic():
    cfg = small(3, grid=(4.0, 2.0, 3.0), n=300)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a == b
    assert [(r.method, r.grid_value) for r in a] == [(m, g) for m in METHODS for g in (2.0, 3.0, 4.0)]
    for r in a:
        assert 0.0 <= r.fdr <= 1.0 and 0.0 <= r.power <= 1.0


def test_network_fdr_is_union_fdp():
    cfg = small(1, grid=(400,), trials=4)
    fdps = [run_trial(cfg, 400, t)[0]["distributed"].fdp for t in range(4)]
    dist = [r for r in run_experiment(cfg) if r.method == "distributed"][0]
    assert dist.fdr == pytest.approx(np.mean(fdps), rel=0, abs=0)
    assert dist.fdr_se == pytest.approx(np.std(fdps, ddof=1) / 2)


def test_workers_do_not_change_results():
    cfg = small(2, grid=(300,), trials=4)
    assert run_experiment(cfg) == run_experiment(default_config(2, nodes=5, trials=4, grid=(300,), workers=2))


def test_heterogeneous_and_dependent_configs_run():
    for cfg in (small(4, grid=(1000,)), small(5, covariance="block", grid=(0.0, 0.8)),
                small(1, random_r1=True, estimator="spacing", grid=(500,))):
        for r in run_experiment(cfg):
            assert np.isfinite(r.fdr) and np.isfinite(r.power)


def test_local_only_rejects_less_than_central():
    res = run_experiment(small(1, nodes=10, grid=(100, 1000, 10_000), trials=5))
    by = {(r.method, r.grid_value): r.mean_rejections for r in res}
    for g in (100, 1000, 10_000):
        assert by[("local_only", g)] <= by[("central", g)]


def test_emit_csv(tmp_path):
    cfg = small(1, grid=(200, 300, 400))
    res = [r for r in run_experiment(cfg) if r.method != "local_only"]
    path = tmp_path / "out.csv"
    emit_csv(res, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 6
    first = path.read_bytes()
    emit_csv(list(reversed(res)), path)
    assert path.read_bytes() == first


def test_emit_csv_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()


# -- CLI --

def test_cli_run(tmp_path):
    out = tmp_path / "e1.csv"
    rc = main(["run", "--experiment", "1", "--trials", "5", "--seed", "7", "--nodes", "4",
               "--n-grid", "100,1000", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 6 and {r["seed"] for r in rows} == {"7"}


def test_cli_run_full_default_grid_small(tmp_path):
    out = tmp_path / "e1.csv"
    assert main(["run", "--experiment", "1", "--trials", "5", "--seed", "7", "--nodes", "3",
                 "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 3 * 4


def test_cli_rho_grid(tmp_path):
    out = tmp_path / "e5.csv"
    rc = main(["run", "--experiment", "5", "--rho-grid", "0,0.4,0.8", "--trials", "2",
               "--nodes", "4", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(open(out)))
    for m in METHODS:
        assert [float(r["grid_value"]) for r in rows if r["method"] == m] == [0.0, 0.4, 0.8]


def test_cli_bad_experiment():
    assert main(["run", "--experiment", "9"]) == 1


def test_cli_unknown_flag():
    assert main(["run", "--experiment", "1", "--bogus"]) == 1


def test_cli_wrong_grid_kind(tmp_path):
    assert main(["run", "--experiment", "1", "--rho-grid", "0.1", "--out", str(tmp_path / "x")]) == 1


def test_cli_runtime_error(tmp_path):
    rc = main(["run", "--experiment", "1", "--trials", "1", "--nodes", "2", "--n-grid", "50",
               "--out", str(tmp_path / "missing" / "x.csv")])
    assert rc == 2


def test_cli_config_file_and_env(tmp_path, monkeypatch):
    cfgfile = tmp_path / "c.txt"
    cfgfile.write_text("# exp 3\nexperiment = 3\nnodes = 3\ntrials = 2\nmu_grid = 2,5\nlambda = 0.4\n")
    opts = read_config_file(cfgfile)
    assert opts["lam"] == 0.4 and opts["mu_grid"] == (2.0, 5.0)
    monkeypatch.setenv("DISTBH_SEED", "99")
    out = tmp_path / "o.csv"
    assert main(["run", "--config", str(cfgfile), "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 6 and rows[0]["seed"] == "99"
    bad = tmp_path / "bad.txt"
    bad.write_text("colour = blue\n")
    assert main(["run", "--config", str(bad)]) == 1


def test_cli_oracle(tmp_path):
    path = tmp_path / "g.txt"
    assert main(["oracle", "--fixture", str(path)]) == 0
    assert "kind=tau_star" in path.read_text()


def test_cli_bench(capsys):
    assert main(["bench", "--m", "20000", "--nodes", "4"]) == 0
    out = capsys.readouterr().out
    assert "messages=8" in out and f"bytes={4 * 21 + 4 * 16}" in out
