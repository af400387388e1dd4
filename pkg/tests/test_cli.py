import json
import math

import numpy as np
import pytest

from qdsig import CostMatrix, RunConfig, apply_preset
from qdsig.cli import main
from qdsig.config import ConfigError


def run_cli(*argv) -> int:
    return main(list(argv))


class TestConfig:
    def test_defaults_match_operating_constants(self):
        config = RunConfig.default()
        assert config.alphabet.n_phases == 8
        assert config.alphabet.mean_photons == pytest.approx(0.16)
        assert config.channel.clock_hz == 1e8
        assert config.channel.dark_cps == 320.0
        assert config.channel.gate_s == 2e-9
        assert config.channel.det_efficiency == 0.42
        assert config.channel.visibility == 0.98
        assert config.channel.multiport_loss_db == 7.5
        assert config.channel.receiver_loss_db == 7.1

    def test_round_trip_is_idempotent(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"alphabet": {"n_phases": 4, "mean_photons": 0.3}}))
        config = RunConfig.from_file(path)
        once = config.serialize()
        again = RunConfig.parse(json.loads(once)).serialize()
        assert once == again

    def test_unknown_root_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            RunConfig.parse({"alphabett": {}})

    def test_unknown_nested_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            RunConfig.parse({"channel": {"dark_rate": 100}})

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ConfigError, match="strategy"):
            RunConfig.parse({"simulation": {"alice": {"strategy": "evil"}}})

    def test_preset_overlay(self):
        config = apply_preset(RunConfig.default(), "tamper-pi2")
        assert config.alice.name == "phase_tamper"
        assert config.alice.delta_phi == pytest.approx(math.pi / 2)
        assert config.alice.tamper_fraction == pytest.approx(2 / 16)

    def test_blocked_preset_sets_differential_loss(self):
        config = apply_preset(RunConfig.default(), "blocked-input")
        assert config.alice.name == "blocked_input"
        assert config.bob_extra_loss_db == 6.0

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigError):
            apply_preset(RunConfig.default(), "nope")


class TestAnalyzeCommand:
    def test_writes_reports_and_figures(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("analyze", "--out", str(out)) == 0
        report = json.loads((out / "security_report.json").read_text())
        assert report["p_forgery_lower"] == pytest.approx(4.70e-3, abs=0.01e-3)
        assert report["p_forgery_upper"] == pytest.approx(4.76e-3, abs=0.01e-3)
        assert report["gap"] == pytest.approx(8.03e-4, abs=0.3e-4)
        assert report["certified"] is True
        sweep = (out / "bounds_sweep.csv").read_text().splitlines()
        assert sweep[0] == "L,eps_forging,eps_repudiation,eps_robustness,eps_active"
        assert (out / "bounds_vs_length.png").exists()
        assert (out / "cost_matrix.png").exists()

    def test_no_figures_flag(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("analyze", "--out", str(out), "--no-figures") == 0
        assert not (out / "bounds_vs_length.png").exists()

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_cli("analyze", "--out", str(out1), "--no-figures")
        run_cli("analyze", "--out", str(out2), "--no-figures")
        for name in ("security_report.json", "security_report.csv", "bounds_sweep.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_missing_cost_file_is_io_error(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"analysis": {"cost_matrix_path": str(tmp_path / "nope.csv")}}))
        assert run_cli("analyze", "--config", str(cfg), "--out", str(tmp_path / "o")) == 3

    def test_malformed_cost_file_is_config_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3\n")
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"analysis": {"cost_matrix_path": str(bad)}}))
        assert run_cli("analyze", "--config", str(cfg), "--out", str(tmp_path / "o")) == 1

    def test_certification_failure_exit_code(self, tmp_path):
        # penalising only nearest-neighbour declarations leaves a positive
        # gap but the square-root measurement is no longer minimal
        bad = tmp_path / "nearest.csv"
        row = np.array([0.001, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5])
        CostMatrix.circulant(row).to_csv(bad)
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"analysis": {"cost_matrix_path": str(bad)}}))
        assert run_cli("analyze", "--config", str(cfg), "--out", str(tmp_path / "o"), "--no-figures") == 2

    def test_bad_json_is_config_error(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        assert run_cli("analyze", "--config", str(cfg), "--out", str(tmp_path / "o")) == 1


class TestEntropyCommand:
    def test_writes_table(self, tmp_path):
        out = tmp_path / "out"
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "entropy": {"n_values": [2, 8], "mean_photon_grid": {"start": 0.0, "stop": 1.0, "points": 5}}
        }))
        assert run_cli("entropy", "--config", str(cfg), "--out", str(out)) == 0
        lines = (out / "entropy_curve.csv").read_text().splitlines()
        assert lines[0] == "n_phases,mean_photons,entropy_bits,accessible_bits,key_bits"
        assert len(lines) == 11
        first = lines[1].split(",")
        assert float(first[2]) == 0.0  # vacuum row has zero entropy
        assert (out / "entropy_curve.png").exists()


class TestSimulateCommand:
    def test_passive_forger_preset(self, tmp_path):
        out = tmp_path / "out"
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"simulation": {"signature_length": 5000, "trials": 10}}))
        code = run_cli("simulate", "--config", str(cfg), "--preset", "passive-forger",
                       "--out", str(out), "--no-figures")
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["label"] == "alice=honest, bob=passive_forger"
        assert summary["trials"] == 10
        trials = (out / "trials.csv").read_text().splitlines()
        assert len(trials) == 11

    def test_seed_changes_results_and_is_reproducible(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"simulation": {"signature_length": 2000, "trials": 5}}))
        outs = []
        for seed, name in [(1, "a"), (1, "b"), (2, "c")]:
            out = tmp_path / name
            run_cli("simulate", "--config", str(cfg), "--seed", str(seed),
                    "--out", str(out), "--no-figures")
            outs.append((out / "summary.json").read_bytes())
        assert outs[0] == outs[1]
        assert outs[0] != outs[2]

    def test_infeasible_thresholds_rejected(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"simulation": {"s_a": 0.5, "s_v": 0.4}}))
        assert run_cli("simulate", "--config", str(cfg), "--out", str(tmp_path / "o")) == 1

    def test_transcript_export(self, tmp_path):
        out = tmp_path / "out"
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "simulation": {"signature_length": 100, "trials": 2, "write_transcript": True}
        }))
        assert run_cli("simulate", "--config", str(cfg), "--out", str(out), "--no-figures") == 0
        assert (out / "transcript_trial0.csv").exists()


class TestCostMatrixCommand:
    def test_ideal_flag_reproduces_interference_matrix(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("cost-matrix", "--ideal", "--out", str(out), "--no-figures") == 0
        cm = CostMatrix.from_csv(out / "cost_matrix.csv")
        assert cm.values[0, 0] == 0.0
        assert cm.values[0, 4] == pytest.approx(1 - math.exp(-0.16), rel=1e-9)

    def test_default_is_calibrated_prediction(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("cost-matrix", "--out", str(out), "--no-figures") == 0
        cm = CostMatrix.from_csv(out / "cost_matrix.csv")
        assert cm.values[0, 0] == pytest.approx(3.9e-3, abs=0.1e-3)
        assert cm.values.max() == pytest.approx(6.4e-3, abs=0.2e-3)

    def test_estimated_matrix_agrees_with_prediction(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("cost-matrix", "--estimate", "--out", str(out), "--no-figures") == 0
        predicted = CostMatrix.from_csv(out / "cost_matrix.csv")
        estimated = CostMatrix.from_csv(out / "cost_matrix_estimated.csv")
        per_cell = 1_000_000 // 64
        sigma = np.sqrt(predicted.values * (1 - predicted.values) / per_cell)
        assert (np.abs(estimated.values - predicted.values) <= 4 * sigma + 1e-12).all()

    def test_figures_written_by_default(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("cost-matrix", "--out", str(out)) == 0
        assert (out / "cost_matrix.png").exists()
