"""Batch CLI tests: job configs, output contracts, determinism."""

import csv
import json

import numpy as np
import pytest

from gibbsqfi import hilbert as hb
from gibbsqfi.cli import main


def write_config(tmp_path, payload, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(rows))


SPIN_SWEEP = {
    "model": {"model": "spin", "S": 0.5, "omega0": 1.0},
    "beta": 1.0,
    "families": ["bkm", "bures", "mc"],
    "methods": ["spectral"],
    "sweep": {"parameter": "omega0", "grid": [0.5, 1.0, 2.0]},
}


class TestMetricJobs:
    def test_sweep_row_count(self, tmp_path):
        config = write_config(tmp_path, SPIN_SWEEP)
        out = tmp_path / "rows.csv"
        assert main(["sweep", "--config", config, "--out", str(out)]) == 0
        rows = read_csv(out)
        assert len(rows) == 9
        assert {r["family"] for r in rows} == {"bkm", "bures", "mc"}
        assert {r["parameter"] for r in rows} == {"omega0=0.5", "omega0=1", "omega0=2"}

    def test_all_methods_agree_on_qubit(self, tmp_path):
        t_path = tmp_path / "T.json"
        s_path = tmp_path / "S.json"
        hb.write_operator_json(np.diag([0.0, 1.0]).astype(complex), t_path)
        hb.write_operator_json(np.array([[0, 1], [1, 0]], dtype=complex), s_path)
        config = write_config(
            tmp_path,
            {
                "model": {"T": str(t_path), "S": str(s_path)},
                "families": ["mc"],
                "methods": ["oracle", "spectral", "dsf", "seriesA:12", "seriesB:12"],
            },
        )
        out = tmp_path / "table.csv"
        assert main(["metric", "--config", config, "--out", str(out)]) == 0
        values = [float(r["value"]) for r in read_csv(out)]
        assert len(values) == 5
        assert max(values) - min(values) <= 1e-10 * max(values)
        assert values[0] == pytest.approx(0.25, rel=1e-10)

    def test_beta_scales_generator(self, tmp_path):
        t_path = tmp_path / "T.json"
        s_path = tmp_path / "S.json"
        hb.write_operator_json(np.diag([0.0, 1.0]).astype(complex), t_path)
        hb.write_operator_json(np.array([[0, 1], [1, 0]], dtype=complex), s_path)
        base = {
            "model": {"T": str(t_path), "S": str(s_path)},
            "families": ["bkm"],
            "methods": ["spectral"],
        }
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        main(["metric", "--config", write_config(tmp_path, dict(base, beta=2.0), "a.json"), "--out", str(out_a)])
        hb.write_operator_json(np.diag([0.0, 2.0]).astype(complex), t_path)
        main(["metric", "--config", write_config(tmp_path, base, "b.json"), "--out", str(out_b)])
        assert read_csv(out_a)[0]["value"] == read_csv(out_b)[0]["value"]

    def test_pair_family_expands(self, tmp_path):
        config = write_config(
            tmp_path,
            {
                "model": {"model": "spin", "S": 0.5, "omega0": 1.0},
                "families": ["pair:0.25"],
                "methods": ["spectral"],
            },
        )
        out = tmp_path / "pair.csv"
        assert main(["metric", "--config", config, "--out", str(out)]) == 0
        rows = read_csv(out)
        assert [r["family"] for r in rows] == ["pdiff:0.25", "pdiff:0.75"]

    def test_missing_matrix_file_exits_2_without_output(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {"model": {"T": "missing_T.json", "S": "missing_S.json"}, "families": ["bkm"]},
        )
        out = tmp_path / "never.csv"
        assert main(["metric", "--config", config, "--out", str(out)]) == 2
        assert not out.exists()
        assert "matrix file" in capsys.readouterr().err

    def test_invalid_config_diagnostics(self, tmp_path, capsys):
        config = write_config(tmp_path, {"model": {}, "families": [], "beta": -1})
        assert main(["metric", "--config", config]) == 2
        err = capsys.readouterr().err
        assert "beta" in err and "families" in err

    def test_non_list_fields_rejected(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "model": {"model": "spin", "S": 0.5, "omega0": 1.0},
                "families": "bkm",
                "methods": "spectral",
            },
        )
        assert main(["metric", "--config", config]) == 2
        err = capsys.readouterr().err
        assert "must be a list" in err

    def test_sweep_requires_sweep_section(self, tmp_path):
        config = write_config(
            tmp_path,
            {"model": {"model": "spin", "S": 0.5, "omega0": 1.0}, "families": ["bkm"]},
        )
        assert main(["sweep", "--config", config]) == 2

    def test_json_format(self, tmp_path):
        config = write_config(tmp_path, SPIN_SWEEP)
        out = tmp_path / "rows.json"
        assert main(["sweep", "--config", config, "--out", str(out), "--format", "json"]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["rows"]) == 9
        assert payload["warnings"] == []

    def test_thread_cap_keeps_output_canonical(self, tmp_path, monkeypatch):
        config = write_config(tmp_path, SPIN_SWEEP)
        serial = tmp_path / "serial.csv"
        threaded = tmp_path / "threaded.csv"
        main(["sweep", "--config", config, "--out", str(serial)])
        monkeypatch.setenv("QFI_NUM_THREADS", "4")
        main(["sweep", "--config", config, "--out", str(threaded)])
        assert serial.read_bytes() == threaded.read_bytes()


class TestVerify:
    def test_passes_and_exits_zero(self, tmp_path):
        out = tmp_path / "report.json"
        rc = main(["verify", "--seed", "42", "--trials", "40", "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["passed"] is True
        assert report["failures"] == []
        assert report["trials"] == 40

    def test_byte_identical_reruns(self, tmp_path):
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        main(["verify", "--seed", "99", "--trials", "15", "--out", str(out_a)])
        main(["verify", "--seed", "99", "--trials", "15", "--out", str(out_b)])
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_zero_trials_usage_error(self):
        assert main(["verify", "--seed", "1", "--trials", "0"]) == 2


class TestMoments:
    def test_table(self, tmp_path):
        config = write_config(
            tmp_path,
            {"model": {"model": "spin", "S": 0.5, "omega0": 1.0}, "families": ["bkm"]},
        )
        out = tmp_path / "moments.csv"
        assert main(["moments", "--config", config, "--pmax", "4", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert [int(r["p"]) for r in rows] == [0, 1, 2, 3, 4]
        assert all(float(r["rel_error"]) <= 1e-9 for r in rows)


class TestModelExport:
    def test_writes_matrices(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {"model": {"model": "boson", "k": 1, "omega": 1.0, "cutoff": 40}, "families": ["bkm"]},
        )
        prefix = tmp_path / "boson"
        assert main(["model", "--config", config, "--out", str(prefix)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["dim"] == 41
        loaded, asym = hb.read_operator_json(f"{prefix}_T.json")
        assert asym == 0.0
        assert loaded.dim == 41
