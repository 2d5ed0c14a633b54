import csv
import io
import json

import numpy as np
import pytest

from invkahler.cli import main
from invkahler.report import (
    CHECKS,
    ConfigError,
    RunConfig,
    dumps,
    emit_csv,
    run,
    sample_points,
)
from invkahler.lie_core import su2

FAST = dict(polar_samples=1, steps=200)


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(samples=0).validate()
    for h in (1e-9, 0.1):
        with pytest.raises(ConfigError):
            RunConfig(h=h).validate()
    with pytest.raises(ConfigError):
        RunConfig(tau=0.0).validate()
    with pytest.raises(ConfigError):
        RunConfig(checks=["kaehler", "bogus"]).validate()
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"samplez": 3})
    cfg = RunConfig(checks=["kaehler", "admissible"]).validate()
    assert cfg.checks == ("admissible", "kaehler")


def test_unknown_group_and_structure():
    with pytest.raises(KeyError):
        run(RunConfig(group="g2", samples=1))
    with pytest.raises(ConfigError):
        run(RunConfig(structure="weird", samples=1))
    with pytest.raises(ValueError):
        run(RunConfig(structure="rescaled:tanh", samples=1))


def test_sampling_is_seeded_and_in_ball():
    alg = su2()
    p = sample_points(alg, 50, 3, 1.5)
    np.testing.assert_array_equal(p, sample_points(alg, 50, 3, 1.5))
    assert np.all(np.linalg.norm(p, axis=1) <= 1.5)


def test_standard_run_is_kaehler():
    rep = run(RunConfig(samples=4, **FAST))
    assert rep["schema"] == 1 and rep["rng"] == "PCG64"
    assert rep["verdict"] == "KAHLER"
    for name in CHECKS:
        assert rep["checks"][name]["status"] == "PASS"
    worst = rep["checks"]["integrable"]["worst"]["maurer_cartan_real"]
    assert worst["residual"] == rep["checks"]["integrable"]["residuals"]["maurer_cartan_real"]
    assert worst["point"] == rep["points"][worst["index"]]
    assert "wall_time" not in rep


def test_arctan_run():
    rep = run(RunConfig(structure="rescaled:arctan", samples=3, **FAST))
    assert rep["verdict"] == "KAHLER"
    assert rep["checks"]["quasi_equivariance"]["status"] == "PASS"


def test_polynomial_structure_from_config():
    rep = run(RunConfig(structure="rescaled:polynomial", coeffs=[1.0, 0.1], samples=2,
                        checks=["admissible", "integrable", "closed", "kaehler", "potential"]))
    assert rep["verdict"] == "KAHLER"
    with pytest.raises(ConfigError):
        run(RunConfig(structure="rescaled:polynomial", samples=1))


def test_negative_runs_skip_dependents():
    rep = run(RunConfig(structure="fixture:perturbed", samples=2, **FAST))
    assert rep["verdict"] == "NON_INTEGRABLE"
    assert rep["checks"]["closed"]["status"] == "SKIPPED"
    rep = run(RunConfig(structure="fixture:gauge", samples=2, radius=1.0, **FAST))
    assert rep["verdict"] == "NOT_KAHLER"
    assert rep["checks"]["kaehler"]["status"] == "SKIPPED"


def test_deterministic_and_parallel_equivalent():
    cfg = dict(samples=5, checks=["admissible", "integrable", "closed", "kaehler", "potential"])
    a = dumps(run(RunConfig(**cfg)))
    b = dumps(run(RunConfig(**cfg)))
    c = dumps(run(RunConfig(workers=4, **cfg)))
    assert a == b == c


def test_timing_is_opt_in():
    rep = run(RunConfig(samples=1, checks=["admissible"]), timing=True)
    assert rep["wall_time"] >= 0


def test_csv_rows_and_round_trip(tmp_path):
    rep = run(RunConfig(samples=64, checks=["admissible", "closed", "potential"]))
    text = emit_csv(rep, tmp_path / "r.csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["check", "point", "residual", "a0", "a1", "a2"]
    assert len(rows) == 1 + 3 * 64
    for row in rows[1:]:
        name, i = row[0], int(row[1])
        assert float(row[2]) == rep["checks"][name]["per_point"][i]
        assert [float(x) for x in row[3:]] == rep["points"][i]
    assert (tmp_path / "r.csv").read_text() == text


def test_csv_header_only_without_checks():
    rep = run(RunConfig(samples=2, checks=[]))
    assert rep["verdict"] == "PASS"
    assert emit_csv(rep) == "check,point,residual,a0,a1,a2\n"


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert main(["verify", "--samples", "2", "--polar-samples", "1", "--steps", "200", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["verdict"] == "KAHLER"
    assert main(["verify", "--structure", "fixture:perturbed", "--samples", "2", "--out", str(out)]) == 2
    assert main(["verify", "--samples", "0"]) == 1
    assert "samples" in capsys.readouterr().err


def test_cli_subcommands_and_config_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"group": "su3", "samples": 50, "seed": 4, "structure": "rescaled:sinh"}))
    out = tmp_path / "rep.json"
    assert main(["potential", "--config", str(cfg), "--samples", "3", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["samples"] == 3 and rep["config"]["group"] == "su3"
    assert rep["config"]["checks"] == ["admissible", "potential"]
    csv_path = tmp_path / "rep.csv"
    assert main(["polar", "--samples", "1", "--steps", "200", "--out", str(out), "--csv", str(csv_path)]) == 0
    assert json.loads(out.read_text())["config"]["checks"] == ["admissible", "integrable", "polar", "quasi_equivariance"]
    assert csv_path.read_text().startswith("check,point,residual")


def test_cli_writes_stdout(capsys):
    assert main(["potential", "--samples", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["schema"] == 1


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert main(["verify", "--config", str(cfg)]) == 1
