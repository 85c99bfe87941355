import csv
import json

import pytest

from qflux import cli

# schema v1; changing either requires bumping SCHEMA_VERSION
FIELDS_HEADER = "x,rho,flux_j,diff_d,osmotic_u,phase_s"
EDGE_HEADER = "dx,max_abs_d"
SUMMARY_KEYS = ["schema_version", "scenario", "params", "norm", "e_flow", "e_diff", "checks"]
CHECK_KEYS = ["name", "measured", "tolerance", "pass"]


def _run(*argv):
    return cli.main(list(argv))


def test_schema_version_pinned():
    assert cli.SCHEMA_VERSION == 1
    assert ",".join(cli.FIELD_COLUMNS) == FIELDS_HEADER


def test_stationary_energy_csv_and_summary(tmp_path):
    out = tmp_path / "well.csv"
    assert _run("run", "StationaryEnergy", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == FIELDS_HEADER
    assert len(lines) == 1 + 4096
    rows = list(csv.reader(lines[1:]))
    # the wall points are nodes: osmotic velocity and phase are masked
    assert rows[0][4] == "" and rows[0][5] == ""
    assert rows[1][4] != ""
    summary = json.loads((tmp_path / "well.csv.summary.json").read_text())
    assert list(summary) == SUMMARY_KEYS
    assert summary["scenario"] == "StationaryEnergy"
    assert summary["e_flow"] == 0
    assert summary["e_diff"] == pytest.approx(4.934802200544679, rel=1e-6)
    for check in summary["checks"]:
        assert list(check) == CHECK_KEYS and check["pass"] is True


def test_floats_written_with_17_digits(tmp_path):
    out = tmp_path / "g.json"
    assert _run("run", "GaussianFields", "--format", "json", "--out", str(out)) == 0
    text = out.read_text()
    doc = json.loads(text)
    assert list(doc) == SUMMARY_KEYS
    assert doc["params"]["t_final"] == 0.5
    assert '"e_flow": ' + format(doc["e_flow"], ".17g") in text
    assert all(c["pass"] for c in doc["checks"])


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert _run("run", "GaussianFields", "--grid-n", "512", "--out", str(p)) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.summary.json").read_bytes() == (tmp_path / "b.csv.summary.json").read_bytes()


def test_box_edge_flux_table(tmp_path):
    out = tmp_path / "edge.csv"
    assert _run("run", "BoxEdgeFlux", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == EDGE_HEADER and len(lines) == 5
    dx = [float(r.split(",")[0]) for r in lines[1:]]
    assert dx == sorted(dx, reverse=True)
    summary = json.loads((tmp_path / "edge.csv.summary.json").read_text())
    assert summary["e_flow"] is None and summary["e_diff"] is None


def test_box_evolution_summary(capsys):
    assert _run("run", "BoxEvolution", "--t-final", "0.05", "--format", "json") == 0
    doc = json.loads(capsys.readouterr().out)
    names = [c["name"] for c in doc["checks"]]
    assert names == ["norm_deviation", "oracle_max_abs_error"]
    assert doc["norm"] == pytest.approx(1.0, abs=1e-6)


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# well settings\ngrid_n = 64\nlevel = 2\nx_max = 2.0\n")
    assert _run("run", "StationaryEnergy", "--config", str(cfg), "--grid-n", "128", "--format", "json") in (0, 3)
    doc = json.loads(capsys.readouterr().out)
    assert doc["params"]["grid_n"] == 128
    assert doc["params"]["level"] == 2
    assert doc["params"]["x_max"] == 2.0


@pytest.mark.parametrize("text,fragment", [
    ("grid_n = 64\nbogus = 1\n", ":2: key 'bogus'"),
    ("grid_n = sixty\n", ":1: grid_n: cannot parse"),
    ("grid_n 64\n", ":1: expected 'key = value'"),
    ("level = 1\nlevel = 2\n", ":2: duplicate key"),
    ("hbar = -1\n", "hbar: must be positive"),
])
def test_config_errors_exit_2_with_location(tmp_path, capsys, text, fragment):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    assert _run("run", "StationaryEnergy", "--config", str(cfg)) == 2
    err = capsys.readouterr().err
    assert fragment in err


def test_flag_not_used_by_scenario_is_config_error(capsys):
    assert _run("run", "StationaryEnergy", "--dt", "0.1") == 2
    assert "--dt does not apply" in capsys.readouterr().err


def test_numerical_precondition_is_config_error(capsys):
    assert _run("run", "SolitonNLS", "--dt", "0.5", "--t-final", "1") == 2
    assert "exceeds pi" in capsys.readouterr().err


def test_unknown_scenario_and_missing_dir(tmp_path, capsys):
    assert _run("run", "Nope") == 2
    assert _run("run", "StationaryEnergy", "--out", str(tmp_path / "no" / "x.csv")) == 2


def test_invariant_violation_exit_3(tmp_path, capsys):
    out = tmp_path / "coarse.csv"
    assert _run("run", "StationaryEnergy", "--grid-n", "16", "--out", str(out)) == 3
    assert "invariant violated: e_diff_rel_error" in capsys.readouterr().err
    doc = json.loads((tmp_path / "coarse.csv.summary.json").read_text())
    assert [c["pass"] for c in doc["checks"] if c["name"] == "e_diff_rel_error"] == [False]


def test_acceptance_single_criterion(capsys):
    assert _run("acceptance", "--only", "osmotic_identity") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("PASS  osmotic_identity")
    assert lines[-1] == "1/1 criteria passed"


def test_acceptance_bad_tolerance_gives_no_partial_report(tmp_path, capsys):
    cfg = tmp_path / "tol.cfg"
    cfg.write_text("stationary_energy = 1e-6\ngaussian_flux_identity = abc\n")
    assert _run("acceptance", "--config", str(cfg)) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "gaussian_flux_identity" in captured.err


def test_acceptance_tolerance_override_can_fail_a_criterion(tmp_path, capsys):
    cfg = tmp_path / "tol.cfg"
    cfg.write_text("stationary_energy = 1e-12\n")
    assert _run("acceptance", "--only", "stationary_energy", "--config", str(cfg)) == 3
    assert capsys.readouterr().out.startswith("FAIL  stationary_energy")


def test_acceptance_unknown_name(capsys):
    assert _run("acceptance", "--only", "nope") == 2
