import io
import json

import pytest

from vrptw_pma.cli import ConfigError, RunConfig, StatsWriter, bench_command, load_config, main, merge_config, solve_command
from vrptw_pma.io import load_instance, parse_solution, validate_solution_file, write_instance
from vrptw_pma.oracle import oracle_solve
from vrptw_pma.synthetic import random_instance

from conftest import FIXTURES

TINY = str(FIXTURES / "tiny8.txt")
QUICK = {"time_limit_s": 3, "route_time_limit_s": 1, "ma_time_limit_s": 4,
         "memetic": {"population_size": 4, "n_ch": 2, "i_c": 20, "max_generations": 3}}


def read_stats(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def quick_config(tmp_path, **extra):
    return merge_config(RunConfig(), {"instance": TINY, "out": str(tmp_path / "sol.txt"),
                                      "stats": str(tmp_path / "stats.jsonl"), **QUICK, **extra})


def test_solve_both_phases(tmp_path):
    config = quick_config(tmp_path)
    assert solve_command(config) == 0
    inst = load_instance(TINY)
    report = validate_solution_file(inst, (tmp_path / "sol.txt").read_text())
    assert report.feasible
    records = read_stats(tmp_path / "stats.jsonl")
    events = {r["event"] for r in records}
    assert "generation" in events and "summary" in events
    summary = [r for r in records if r["event"] == "summary"][0]
    assert summary["K"] == report.vehicles and summary["threads"] == 1
    for comp in {r["component"] for r in records}:
        times = [r["time"] for r in records if r["component"] == comp]
        assert all(b > a for a, b in zip(times, times[1:]))


def test_routes_phase_has_no_generation_records(tmp_path):
    config = quick_config(tmp_path, phase="routes")
    assert solve_command(config) == 0
    records = read_stats(tmp_path / "stats.jsonl")
    assert not [r for r in records if r["event"] == "generation"]
    assert [r for r in records if r["event"] == "cooperation"]
    k_star, _ = oracle_solve(load_instance(TINY))
    assert validate_solution_file(load_instance(TINY), (tmp_path / "sol.txt").read_text()).vehicles == k_star


def test_solution_goes_to_stdout_without_out():
    out = io.StringIO()
    config = merge_config(RunConfig(), {"instance": TINY, "phase": "routes", **QUICK})
    assert solve_command(config, stdout=out) == 0
    assert parse_solution(out.getvalue()).routes


def test_bad_instance_path_fails(tmp_path):
    err = io.StringIO()
    config = quick_config(tmp_path, instance=str(tmp_path / "missing.txt"))
    assert solve_command(config, stderr=err) == 2
    assert "cannot load instance" in err.getvalue()
    assert not (tmp_path / "sol.txt").exists()


def test_unparsable_instance_fails(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("this is not an instance\n")
    assert solve_command(quick_config(tmp_path, instance=str(bad)), stderr=io.StringIO()) == 2


def test_missing_instance_is_a_config_error(tmp_path):
    err = io.StringIO()
    assert solve_command(RunConfig(), stderr=err) == 2
    assert "no instance" in err.getvalue()


@pytest.mark.parametrize("values", [
    {"phase": "fast"},
    {"threads": 0},
    {"time_limit_s": -1},
    {"memetic": {"n_ch": 0}},
    {"route_min": {"k_max": 0}},
    {"route_min": {"bogus": 1}},
    {"cooperation": {"q": 1.0}},
])
def test_invalid_settings_rejected(values):
    with pytest.raises(ConfigError):
        merge_config(RunConfig(), values).validate()


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"threads": 2, "seed": 9, "route_min": {"k_max": 2},
                                "cooperation": {"scheme": "cyclic"}}))
    config = load_config(path)
    config.validate()
    assert config.threads == 2 and config.route_params().k_max == 2
    assert config.cooperation_config(200).scheme == "cyclic"
    assert config.cooperation_config(200).cf == 10
    path.write_text(json.dumps({"speed": 3}))
    with pytest.raises(ConfigError):
        load_config(path)


def test_defaults_follow_parameter_tables():
    config = RunConfig()
    config.validate()
    rp, mp = config.route_params(), config.ma_params()
    assert (rp.k_max, rp.l_max, rp.xi, rp.i_max, rp.perturb_min, rp.perturb_max, rp.mu) == (3, 5, 7, 1000, 80, 400, 0.6)
    assert (mp.n_ch, mp.i_c, mp.i_p, mp.g) == (20, 100, 50, 50)
    assert rp.time_limit == 50 and mp.time_limit == 300


def test_flags_override_config_file(tmp_path, monkeypatch):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 4, "phase": "routes", **QUICK}))
    out = tmp_path / "sol.txt"
    seen = {}
    import vrptw_pma.cli as cli

    def fake(config):
        seen["config"] = config
        return 0

    monkeypatch.setattr(cli, "solve_command", fake)
    assert main(["solve", "--config", str(path), "--seed", "7", "--instance", TINY, "--out", str(out)]) == 0
    assert seen["config"].seed == 7 and seen["config"].phase == "routes"


def test_stats_writer_keeps_time_strictly_increasing():
    buf = io.StringIO()
    stats = StatsWriter(stream=buf)
    for _ in range(3):
        stats.write({"event": "x", "component": 0, "time": 5.0})
    times = [json.loads(line)["time"] for line in buf.getvalue().splitlines()]
    assert times[0] == 5.0 and times[0] < times[1] < times[2]


def test_validate_and_oracle_commands(tmp_path, capsys):
    assert solve_command(quick_config(tmp_path, phase="routes")) == 0
    assert main(["validate", "--instance", TINY, "--solution", str(tmp_path / "sol.txt")]) == 0
    assert "feasible" in capsys.readouterr().out
    assert main(["oracle", "--instance", TINY]) == 0
    assert capsys.readouterr().out.startswith("K=")
    big = tmp_path / "big.txt"
    big.write_text(write_instance(random_instance(12, 1)))
    assert main(["oracle", "--instance", str(big)]) == 2


def test_validate_command_flags_infeasible(tmp_path, capsys):
    inst = load_instance(TINY)
    sol = tmp_path / "one.txt"
    sol.write_text("Route 1: " + " ".join(str(c) for c in inst.customers) + "\n")
    assert main(["validate", "--instance", TINY, "--solution", str(sol)]) == 1
    assert "infeasible" in capsys.readouterr().out


def test_bench_rows_and_stats(tmp_path):
    config = quick_config(tmp_path)
    out = io.StringIO()
    rows = bench_command(config, [1], 2, stdout=out)
    assert len(rows) == 1 and rows[0]["speedup"] == 1.0
    records = read_stats(tmp_path / "stats.jsonl")
    assert len([r for r in records if r["event"] == "bench_run"]) == 2
    assert len([r for r in records if r["event"] == "bench_summary"]) == 1
    assert "S(p)" in out.getvalue()


def test_bench_rejects_bad_worker_list(capsys):
    assert main(["bench", "--instance", TINY, "--p-list", "0,2"]) == 2
