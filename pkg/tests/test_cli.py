import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from hinfb.cli import EXIT_INDETERMINATE, EXIT_INVALID, EXIT_NEGATIVE, EXIT_OK, SEED_ENV, dumps, run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return path


class TestExitCodes:
    def test_constant_targets_feasible(self):
        code, out = call("feasibility", CONFIGS / "constant_targets.json")
        assert code == EXIT_OK and '"status": "feasible"' in out

    def test_threshold_infeasible(self):
        code, out = call("feasibility", CONFIGS / "threshold.json")
        assert code == EXIT_NEGATIVE and '"status": "infeasible"' in out

    def test_bad_zero(self, tmp_path, capsys):
        path = write(tmp_path, {"constraint": [{"re": 1.2, "im": 0, "mult": 2}], "nodes": [0], "targets": [0]})
        code, _ = call("feasibility", path)
        assert code == EXIT_INVALID
        assert "constraint[0]" in capsys.readouterr().err

    def test_malformed_json_position(self, tmp_path, capsys):
        code, _ = call("norm", write(tmp_path, '{"constraint": [\n  {"re": 0,, }]}'))
        assert code == EXIT_INVALID
        assert ".json:2:" in capsys.readouterr().err

    def test_missing_field(self, tmp_path, capsys):
        code, _ = call("norm", write(tmp_path, {"nodes": [0]}))
        assert code == EXIT_INVALID and "constraint" in capsys.readouterr().err

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            call("bogus", CONFIGS / "two_zeros.json")

    def test_structural_infeasibility(self, tmp_path):
        cfg = {
            "constraint": [{"re": 0, "im": 0, "mult": 1}, {"re": 0.5, "im": 0, "mult": 1}],
            "nodes": [0, 0.5, {"re": 0, "im": 0.3}],
            "targets": [0.1, 0.2, 0],
        }
        code, out = call("construct", write(tmp_path, cfg))
        assert code == EXIT_NEGATIVE and "infeasible" in out

    def test_exit_constants(self):
        assert (EXIT_OK, EXIT_NEGATIVE, EXIT_INDETERMINATE, EXIT_INVALID) == (0, 1, 2, 3)


class TestReports:
    def test_envelope_two_zeros(self):
        code, out = call("envelope", CONFIGS / "two_zeros.json")
        assert code == EXIT_OK
        for token in ('"algebra_dim": 16', '"commutant_dim": 1', '"is_full": true', '"agreement": true'):
            assert token in out

    def test_norm_with_oracle(self):
        code, out = call("norm", CONFIGS / "threshold.json", "--oracle")
        rep = json.loads(out)
        assert code == EXIT_NEGATIVE
        assert rep["quotient_norm"] == pytest.approx(1.2, rel=1e-12)
        assert rep["oracle_norm"] == pytest.approx(1.2, rel=1e-8)

    def test_construct_residuals(self):
        code, out = call("construct", CONFIGS / "threshold.json")
        rep = json.loads(out)
        assert code == EXIT_OK and max(rep["node_residuals"]) < 1e-12

    def test_lattice(self):
        code, out = call("lattice", CONFIGS / "lattice_z5.json")
        rep = json.loads(out)
        assert code == EXIT_OK and rep["meet"]["phi_power"] >= 3

    def test_grammian(self):
        code, out = call("grammian", CONFIGS / "threshold.json")
        rows = [[float(x) for x in line.split(",")] for line in out.strip().splitlines()]
        Q = np.array([[r[2 * i] + 1j * r[2 * i + 1] for i in range(len(r) // 2)] for r in rows])
        assert np.allclose(Q, [[1, 0, 1], [0, 1, 0.5], [1, 0.5, 4 / 3]], atol=1e-15)

    def test_csv_export(self, tmp_path):
        path = tmp_path / "grid.csv"
        call("feasibility", CONFIGS / "threshold.json", "--csv", path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == ["theta1", "theta2", "phase", "lambda_min"]
        assert len(rows) == 256**2

    def test_float_format(self):
        assert dumps({"a": 0.1, "b": {"re": 1.0, "im": -2.5}}) == '{\n  "a": 0.10000000000000001,\n  "b": {"re": 1, "im": -2.5}\n}'


class TestDeterminism:
    def test_repeat_runs_identical(self):
        outs = {call("feasibility", CONFIGS / "threshold.json", "--seed", 7)[1] for _ in range(2)}
        assert len(outs) == 1

    def test_seed_precedence(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "11")
        _, env_out = call("feasibility", CONFIGS / "constant_targets.json")
        assert '"seed": 0' in env_out  # config seed beats the environment
        _, flag_out = call("feasibility", CONFIGS / "constant_targets.json", "--seed", 5)
        assert '"seed": 5' in flag_out

    def test_env_seed_used_without_config_seed(self, tmp_path, monkeypatch):
        cfg = json.loads((CONFIGS / "threshold.json").read_text())
        cfg.pop("seed")
        monkeypatch.setenv(SEED_ENV, "13")
        _, out = call("feasibility", write(tmp_path, cfg))
        assert '"seed": 13' in out
