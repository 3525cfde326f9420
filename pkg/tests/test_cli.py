import json

import numpy as np
import pytest
import yaml

from subordination import cli
from subordination._errors import NoConvergence
from subordination.verification import CheckResult


def run_cli(capsys, *argv):
    status = cli.main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    head = lines[0].split(",")
    return head, np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


class TestGrids:
    def test_range(self):
        assert np.allclose(cli.parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])

    def test_list_and_scalar(self):
        assert np.allclose(cli.parse_grid("0.5,1,2"), [0.5, 1, 2])
        assert np.allclose(cli.parse_grid(2.0), [2.0])
        assert np.allclose(cli.parse_grid([1, 3]), [1, 3])

    @pytest.mark.parametrize("bad", ["1:2", "a,b", "0:1:0"])
    def test_bad(self, bad):
        with pytest.raises(cli.ConfigError):
            cli.parse_grid(bad)


class TestCommands:
    def test_propagation_wave_csv(self, capsys):
        status, out, _ = run_cli(capsys, "propagation", "--alpha", "2", "--x", "0.5,1.5",
                                 "--t", "1")
        assert status == cli.EXIT_OK
        assert "# command: \"propagation\"" in out
        head, rows = csv_rows(out)
        assert head[:2] == ["x", "w"]
        assert rows[:, 1] == pytest.approx([1.0, 0.0], abs=1e-9)

    def test_pdf_json(self, capsys):
        status, out, _ = run_cli(capsys, "pdf", "--alpha", "1.9", "--term", "1.5", "1",
                                 "--tau", "0.5", "--t", "1", "--format", "json")
        assert status == cli.EXIT_OK
        data = json.loads(out)
        assert data["manifest"]["problem"]["alpha"] == 1.9
        assert data["manifest"]["schema_version"] == cli.SCHEMA_VERSION
        assert data["columns"]["phi"][0] == pytest.approx(0.62986290613496819, abs=1e-9)

    def test_eigenmodes_telegraph(self, capsys):
        status, out, _ = run_cli(capsys, "eigenmodes", "--alpha", "2", "--term", "1", "1",
                                 "--modes", "2", "--t", "0:1:3")
        head, rows = csv_rows(out)
        assert status == cli.EXIT_OK and head == ["t", "u_1", "u_2"]
        assert np.all(rows[0, 1:] == 1.0)

    def test_solve_interval(self, capsys):
        status, out, _ = run_cli(capsys, "solve-interval", "--alpha", "2", "--initial", "mode1",
                                 "--modes", "4", "--x", "0.5", "--t", "0,2")
        head, rows = csv_rows(out)
        assert status == cli.EXIT_OK and head == ["t", "x", "u"]
        assert rows[:, 2] == pytest.approx([np.sqrt(2)] * 2, abs=1e-10)

    def test_figure_1(self, capsys, tmp_path):
        path = tmp_path / "fig1.csv"
        status, out, _ = run_cli(capsys, "figure", "1", "--out", str(path))
        assert status == cli.EXIT_OK and out == ""
        head, rows = csv_rows(path.read_text())
        assert head == ["x", "w_t=0.25", "w_t=0.5", "w_t=1", "w_t=2"]
        assert rows.shape == (151, 5)

    def test_output_is_deterministic(self, capsys, tmp_path):
        args = ["pdf", "--alpha", "1.5", "--term", "1", "1", "--tau", "0:2:5", "--t", "1"]
        first = run_cli(capsys, *args)[1]
        assert run_cli(capsys, *args)[1] == first


class TestExitCodes:
    def test_validation(self, capsys):
        status, _, err = run_cli(capsys, "propagation", "--alpha", "2.1")
        assert status == cli.EXIT_VALIDATION and "OrderOutOfRange" in err

    def test_missing_alpha(self, capsys):
        assert run_cli(capsys, "propagation")[0] == cli.EXIT_VALIDATION

    def test_degenerate_psi(self, capsys):
        status, _, err = run_cli(capsys, "pdf", "--alpha", "1.5", "--kind", "psi")
        assert status == cli.EXIT_VALIDATION and "DegenerateIdentity" in err

    def test_convergence(self, capsys, monkeypatch):
        def boom(*a, **k):
            raise NoConvergence("budget exhausted")
        monkeypatch.setattr(cli, "eigenmodes", boom)
        status, _, err = run_cli(capsys, "eigenmodes", "--alpha", "1.5")
        assert status == cli.EXIT_CONVERGENCE and "NoConvergence" in err

    def test_verify_pass_and_fail(self, capsys, monkeypatch):
        rows = [CheckResult("demo", "ok", True, 0.0, 1.0, "", 0.0)]
        monkeypatch.setattr(cli, "run_suite", lambda *a, **k: rows)
        status, out, _ = run_cli(capsys, "verify", "--suite", "problem")
        assert status == cli.EXIT_OK and "demo/ok" in out
        rows.append(CheckResult("demo", "bad", False, 2.0, 1.0, "", 0.0))
        assert run_cli(capsys, "verify")[0] == cli.EXIT_VERIFY

    def test_verify_problem_suite(self, capsys):
        status, _, err = run_cli(capsys, "verify", "--suite", "problem")
        assert status == cli.EXIT_OK
        assert all(ln.startswith("PASS") for ln in err.strip().splitlines())


class TestConfig:
    def write(self, tmp_path, data):
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump(data))
        return str(path)

    def test_config_run(self, capsys, tmp_path):
        path = self.write(tmp_path, {
            "schema_version": 1,
            "problem": {"alpha": 2.0, "terms": [[1.0, 1.0]]},
            "grids": {"x": [0.5, 2.0], "t": 1.0},
            "output": {"format": "json"},
        })
        status, out, _ = run_cli(capsys, "propagation", "--config", path)
        data = json.loads(out)
        assert status == cli.EXIT_OK and data["manifest"]["problem"]["terms"] == [[1.0, 1.0]]
        assert data["columns"]["w"][1] == 0.0

    def test_flags_override_config(self, capsys, tmp_path):
        path = self.write(tmp_path, {"schema_version": 1, "problem": {"alpha": 2.0},
                                    "grids": {"x": [0.5], "t": 1.0}})
        status, out, _ = run_cli(capsys, "propagation", "--config", path, "--t", "0.25")
        _, rows = csv_rows(out)
        assert status == cli.EXIT_OK and rows[0, 1] == 0.0

    @pytest.mark.parametrize("data", [
        {"problme": {"alpha": 2.0}},
        {"problem": {"alpha": 2.0, "beta": 1.0}},
        {"schema_version": 99},
        {"problem": {"alpha": 2.0}},
    ])
    def test_rejected(self, capsys, tmp_path, data):
        path = self.write(tmp_path, data)
        assert run_cli(capsys, "propagation", "--config", path)[0] == cli.EXIT_VALIDATION

    def test_manifest_round_trip(self):
        man = cli.RunManifest("pdf", {"alpha": 1.5}, {"t": 1.0}, {}, {"format": "csv"}, {})
        data = man.to_dict()
        assert data["command"] == "pdf" and "package_version" in data
