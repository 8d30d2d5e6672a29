import json

import numpy as np
import pytest

from wcs_sim.cli import main

QUICK = """\
[protocol]
p_rx = 1.0

[trigger]
delta = 0.03

[sim]
duration = 5.0
seed = 11
warmup = 1.0
"""

SUMMARY_KEYS = {"rmse_sync", "control_fraction", "other_fraction", "free_fraction",
                "duty_cycle_control", "energy_savings_vs_periodic", "empirical_cost",
                "rounds", "seed"}


@pytest.fixture(autouse=True)
def serial_sweeps(monkeypatch):
    monkeypatch.setenv("WCS_SIM_THREADS", "1")


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(QUICK, encoding="utf-8")
    return path


class TestRun:
    def test_writes_three_outputs(self, tmp_path, config_path):
        out = tmp_path / "out"
        assert main(["run", "--config", str(config_path), "--seed", "42",
                     "--out", str(out)]) == 0
        assert (out / "states.csv").is_file()
        assert (out / "rounds.csv").is_file()
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary) == SUMMARY_KEYS
        assert summary["seed"] == 42
        total = (summary["control_fraction"] + summary["other_fraction"]
                 + summary["free_fraction"])
        assert abs(total - 1.0) < 1e-12

    def test_reruns_are_byte_identical(self, tmp_path, config_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", str(config_path), "--out", str(out_a)])
        main(["run", "--config", str(config_path), "--out", str(out_b)])
        for name in ("states.csv", "rounds.csv", "summary.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_seed_changes_data_not_schema(self, tmp_path, config_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", str(config_path), "--seed", "1", "--out", str(out_a)])
        main(["run", "--config", str(config_path), "--seed", "2", "--out", str(out_b)])
        states_a = (out_a / "states.csv").read_text().splitlines()
        states_b = (out_b / "states.csv").read_text().splitlines()
        assert states_a[0] == states_b[0]
        assert len(states_a) == len(states_b)
        assert states_a != states_b

    def test_invalid_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("[sim]\nduration = 0.0\n", encoding="utf-8")
        code = main(["run", "--config", str(bad), "--out", str(tmp_path / "x")])
        assert code == 2
        assert "duration" in capsys.readouterr().err

    def test_unknown_key_exits_2_with_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("[sim]\nwibble = 1\n", encoding="utf-8")
        code = main(["run", "--config", str(bad), "--out", str(tmp_path / "x")])
        assert code == 2
        assert ":2:" in capsys.readouterr().err

    def test_manifest_records_resolved_config(self, tmp_path, config_path):
        out = tmp_path / "out"
        main(["run", "--config", str(config_path), "--out", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["status"] == "complete"
        assert manifest["config"]["delta"] == 0.03
        assert manifest["seeds"] == [11]
        assert manifest["wall_clock_s"] > 0


class TestSweep:
    def test_periodic_point_is_all_control(self, tmp_path, config_path):
        out = tmp_path / "sweep"
        code = main(["sweep", "--config", str(config_path), "--deltas", "0",
                     "--seeds", "1,2,3", "--out", str(out)])
        assert code == 0
        rows = (out / "sweep.csv").read_text().splitlines()
        assert rows[0].startswith("delta,seed,control_fraction")
        assert len(rows) == 4
        for row in rows[1:]:
            assert float(row.split(",")[2]) == 1.0

    def test_summary_median_is_middle_seed(self, tmp_path, config_path):
        out = tmp_path / "sweep"
        main(["sweep", "--config", str(config_path), "--deltas", "0.03",
              "--seeds", "1,2,3", "--out", str(out)])
        rows = (out / "sweep.csv").read_text().splitlines()[1:]
        rmses = sorted(float(r.split(",")[5]) for r in rows)
        summary = (out / "sweep_summary.csv").read_text().splitlines()
        cols = summary[0].split(",")
        values = summary[1].split(",")
        assert float(values[cols.index("rmse_median")]) == pytest.approx(rmses[1])
        assert float(values[cols.index("rmse_p25")]) >= rmses[0]
        assert float(values[cols.index("rmse_p75")]) <= rmses[2]

    def test_rows_in_config_order(self, tmp_path, config_path):
        out = tmp_path / "sweep"
        main(["sweep", "--config", str(config_path), "--deltas", "0.1,0.01",
              "--seeds", "5,4", "--out", str(out)])
        rows = [r.split(",")[:2] for r in
                (out / "sweep.csv").read_text().splitlines()[1:]]
        assert rows == [["0.1", "5"], ["0.1", "4"], ["0.01", "5"], ["0.01", "4"]]

    def test_empty_delta_list_exits_2(self, tmp_path, config_path):
        code = main(["sweep", "--config", str(config_path), "--deltas", "",
                     "--seeds", "1", "--out", str(tmp_path / "x")])
        assert code == 2


class TestValidate:
    def test_small_sample_is_inconclusive_not_fail(self, tmp_path, config_path, capsys):
        code = main(["validate", "--config", str(config_path), "--samples", "10"])
        out = capsys.readouterr().out
        assert "INCONCLUSIVE" in out
        assert "FAIL" not in out
        assert code == 1

    def test_moderate_samples_pass(self, tmp_path, config_path, capsys):
        code = main(["validate", "--config", str(config_path), "--samples", "20000"])
        out = capsys.readouterr().out
        assert code == 0, out
        assert out.count("PASS") == 3

    def test_perturbed_gain_fails_dare_check(self, tmp_path, config_path, capsys):
        code = main(["validate", "--config", str(config_path), "--samples", "20000",
                     "--perturb-gain"])
        out = capsys.readouterr().out
        assert code == 1
        assert "FAIL" in out
        assert "dare-residual" in out
