"""Scenario runner and command-line interface contracts."""

import csv
import json

import numpy as np
import pytest

from photonflow.cli import main
from photonflow.errors import ConfigError
from photonflow.scenarios import ScenarioConfig, run, validate

GAUSS_PULSE = {"kind": "gaussian", "bandwidth": 2.92, "peak_time": 1.5}


def make_cfg(**kwargs):
    return ScenarioConfig.from_sources(kwargs, None)


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh)
    return str(path)


class TestValidate:
    def test_missing_kappa_listed(self):
        rep = validate(make_cfg(scenario="master-equation", seed=1, pulse=GAUSS_PULSE))
        assert any("kappa" in e for e in rep.errors)

    def test_missing_seed_listed(self):
        rep = validate(make_cfg(scenario="realizability-check"))
        assert any("seed" in e for e in rep.errors)

    def test_gamma_range_error(self):
        rep = validate(
            make_cfg(
                scenario="feedback-shaping", seed=1, kappa=2.0,
                pulse={"kind": "decaying-exp", "beta": 2.0}, gamma_list=[0.0, 1.2],
            )
        )
        assert any("gamma" in e for e in rep.errors)

    def test_adequate_grid_reports_coverage(self):
        rep = validate(
            make_cfg(scenario="cavity-response", seed=1, kappa=1.0, pulse=GAUSS_PULSE)
        )
        assert rep.ok
        assert rep.numerics["energy_coverage"] > 0.9999
        assert any("coverage" in w for w in rep.warnings)

    def test_unknown_scenario(self):
        rep = validate(make_cfg(scenario="quux", seed=1))
        assert not rep.ok

    def test_unknown_field_rejected_at_parse(self):
        with pytest.raises(ConfigError):
            make_cfg(scenario="master-equation", seed=1, kappa=1.0, bogus=3)

    def test_detuning_aliases(self):
        cfg = ScenarioConfig.from_sources(
            {"scenario": "master-equation", "seed": 1, "kappa": 1.0,
             "omega_a": 0.7, "pulse": GAUSS_PULSE}, None,
        )
        assert cfg.detuning == 0.7
        with pytest.raises(ConfigError):
            ScenarioConfig.from_sources(
                {"scenario": "x", "omega_c": 1.0, "detuning": 2.0}, None
            )


class TestScenarioOutputs:
    def test_master_equation_summary_and_csv(self, tmp_path):
        cfg = make_cfg(
            scenario="master-equation", seed=2, kappa=1.0,
            pulse={"kind": "gaussian", "bandwidth": 1.46, "peak_time": 3.0},
            t_start=-2.0, t_stop=9.0, out_dir=str(tmp_path),
        )
        result = run(cfg)
        assert result.summary["max_Pe"] == pytest.approx(0.8, abs=0.01)
        with open(result.csv_path) as fh:
            header = next(csv.reader(fh))
        assert header == ["t", "P_e", "tr_rho11", "re_tr_rho10"]
        doc = json.loads(result.json_path.read_text())
        assert doc["invariants"]["trace_drift"]["ok"] is True

    def test_feedback_shaping_columns(self, tmp_path):
        cfg = make_cfg(
            scenario="feedback-shaping", seed=1, kappa=1.0, detuning=0.0,
            pulse=GAUSS_PULSE, gamma_list=[0.0, 0.5], out_dir=str(tmp_path),
        )
        result = run(cfg)
        with open(result.csv_path) as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = np.array([[float(c) for c in row] for row in reader])
        assert header == [
            "t", "abs_xi_sq", "abs_eta1_sq",
            "abs_eta3_sq_gamma_0", "abs_eta3_sq_gamma_0.5",
        ]
        # the loop at gamma = 0 is the bare cavity up to a global sign
        assert np.max(np.abs(rows[:, 3] - rows[:, 2])) < 1e-10
        assert result.summary["invariants"]["energy_normalization"]["ok"] is True
        assert result.summary["invariants"]["all_pass_deviation"]["ok"] is True

    def test_filter_trajectory_csv_and_ensemble_json(self, tmp_path):
        cfg = make_cfg(
            scenario="filter-trajectory", seed=4, kappa=1.0, pulse=GAUSS_PULSE,
            t_start=-0.6, t_stop=4.0, dt=1e-3, n_traj=5, out_dir=str(tmp_path),
        )
        result = run(cfg)
        with open(result.csv_path) as fh:
            header = next(csv.reader(fh))
        assert header == ["t", "P_e", "tr_rho11", "re_tr_rho10"]
        doc = json.loads(result.json_path.read_text())
        assert doc["ensemble"]["n_traj"] == 5
        assert len(doc["ensemble"]["mean"]) == len(doc["ensemble"]["t"])
        assert len(doc["ensemble"]["stderr"]) == len(doc["ensemble"]["t"])

    def test_excitation_sweep_argmax_key(self, tmp_path):
        cfg = make_cfg(
            scenario="excitation-sweep", seed=1, kappa=1.0,
            pulse={"kind": "gaussian", "bandwidth": 1.0, "peak_time": 3.0},
            sweep={"start": 1.2, "stop": 1.8, "count": 7},
            dt=5e-3, out_dir=str(tmp_path),
        )
        result = run(cfg)
        assert 1.2 <= result.summary["argmax"] <= 1.8
        with open(result.csv_path) as fh:
            header = next(csv.reader(fh))
        assert header == ["param_value", "max_excitation", "t_at_max"]

    def test_realizability_outputs(self, tmp_path):
        cfg = make_cfg(scenario="realizability-check", seed=9, n_models=20, out_dir=str(tmp_path))
        result = run(cfg)
        assert result.summary["all_ok"] is True
        assert result.summary["max_commutation_residual"] < 1e-10
        rows = list(csv.reader(open(result.csv_path)))
        assert len(rows) == 21

    def test_every_summary_carries_invariant_flags(self, tmp_path):
        configs = [
            make_cfg(scenario="cavity-response", seed=1, kappa=1.0,
                     pulse=GAUSS_PULSE, out_dir=str(tmp_path / "a")),
            make_cfg(scenario="realizability-check", seed=1, n_models=3,
                     out_dir=str(tmp_path / "b")),
            make_cfg(scenario="master-equation", seed=1, kappa=1.0, pulse=GAUSS_PULSE,
                     t_start=-0.6, t_stop=4.0, out_dir=str(tmp_path / "c")),
        ]
        for cfg in configs:
            summary = run(cfg).summary
            flags = summary["invariants"]
            for key in ("trace_drift", "hermiticity", "all_pass_deviation"):
                assert key in flags
                assert set(flags[key]) == {"checked", "value", "ok"}

    def test_format_selects_files(self, tmp_path):
        base = dict(
            scenario="realizability-check", seed=1, n_models=3,
        )
        r_csv = run(make_cfg(**base, format="csv", out_dir=str(tmp_path / "csv")))
        assert r_csv.csv_path is not None and r_csv.json_path is None
        r_json = run(make_cfg(**base, format="json", out_dir=str(tmp_path / "json")))
        assert r_json.csv_path is None and r_json.json_path is not None

    def test_byte_identical_reruns(self, tmp_path):
        base = dict(
            scenario="filter-trajectory", seed=123, kappa=1.0, pulse=GAUSS_PULSE,
            t_start=-0.6, t_stop=3.5, dt=1e-3, n_traj=3,
        )
        r1 = run(make_cfg(**base, out_dir=str(tmp_path / "one")))
        r2 = run(make_cfg(**base, out_dir=str(tmp_path / "two")))
        assert r1.csv_path.read_bytes() == r2.csv_path.read_bytes()
        json_one = json.loads(r1.json_path.read_text())
        json_two = json.loads(r2.json_path.read_text())
        assert json_one == json_two

    def test_different_seed_changes_trajectory(self, tmp_path):
        base = dict(
            scenario="filter-trajectory", kappa=1.0, pulse=GAUSS_PULSE,
            t_start=-0.6, t_stop=3.5, dt=1e-3,
        )
        r1 = run(make_cfg(**base, seed=1, out_dir=str(tmp_path / "one")))
        r2 = run(make_cfg(**base, seed=2, out_dir=str(tmp_path / "two")))
        assert r1.csv_path.read_bytes() != r2.csv_path.read_bytes()


class TestCLI:
    def test_full_run_exit_zero(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json", {
            "kappa": 1.0, "pulse": GAUSS_PULSE, "t_start": -0.6, "t_stop": 4.0,
        })
        code = main([
            "--scenario", "master-equation", "--config", cfg_path,
            "--seed", "5", "--out-dir", str(tmp_path), "--format", "both",
        ])
        assert code == 0
        assert (tmp_path / "master-equation.csv").exists()
        assert (tmp_path / "master-equation.json").exists()

    def test_missing_required_field_exit_two(self, tmp_path, capsys):
        cfg_path = write_json(tmp_path / "cfg.json", {"pulse": GAUSS_PULSE})
        code = main([
            "--scenario", "master-equation", "--config", cfg_path,
            "--seed", "5", "--out-dir", str(tmp_path),
        ])
        assert code == 2
        assert "kappa" in capsys.readouterr().err

    def test_missing_seed_exit_two(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json", {"kappa": 1.0, "pulse": GAUSS_PULSE})
        code = main([
            "--scenario", "master-equation", "--config", cfg_path,
            "--out-dir", str(tmp_path),
        ])
        assert code == 2

    def test_divergence_exit_three(self, tmp_path, capsys):
        cfg_path = write_json(tmp_path / "cfg.json", {
            "kappa": 1.0,
            "pulse": {"kind": "gaussian", "bandwidth": 0.01, "peak_time": 0.0},
            "t_start": -700.0, "t_stop": 700.0, "dt": 5.0, "n_traj": 1,
        })
        code = main([
            "--scenario", "filter-trajectory", "--config", cfg_path,
            "--seed", "1", "--out-dir", str(tmp_path),
        ])
        assert code == 3
        assert "diverged" in capsys.readouterr().err

    def test_flag_overrides_file_seed(self, tmp_path):
        cfg_doc = {
            "kappa": 1.0, "pulse": GAUSS_PULSE, "seed": 1,
            "t_start": -0.6, "t_stop": 3.5, "dt": 1e-3,
            "scenario": "filter-trajectory",
        }
        cfg_path = write_json(tmp_path / "cfg.json", cfg_doc)
        main(["--config", cfg_path, "--seed", "2", "--out-dir", str(tmp_path / "flag")])
        main(["--config", cfg_path, "--out-dir", str(tmp_path / "file")])
        flag_csv = (tmp_path / "flag" / "filter-trajectory.csv").read_bytes()
        file_csv = (tmp_path / "file" / "filter-trajectory.csv").read_bytes()
        assert flag_csv != file_csv
        # flag --seed 1 reproduces the file run exactly
        main(["--config", cfg_path, "--seed", "1", "--out-dir", str(tmp_path / "same")])
        assert (tmp_path / "same" / "filter-trajectory.csv").read_bytes() == file_csv

    def test_validate_mode_reports_without_running(self, tmp_path, capsys):
        cfg_path = write_json(tmp_path / "cfg.json", {"pulse": {"kind": "gaussian"}})
        code = main([
            "--scenario", "master-equation", "--config", cfg_path,
            "--seed", "1", "--validate", "--out-dir", str(tmp_path),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "kappa" in out
        assert not (tmp_path / "master-equation.csv").exists()

    def test_validate_mode_ok_config(self, tmp_path, capsys):
        cfg_path = write_json(tmp_path / "cfg.json", {
            "kappa": 1.0, "pulse": GAUSS_PULSE,
        })
        code = main([
            "--scenario", "cavity-response", "--config", cfg_path,
            "--seed", "1", "--validate",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "configuration OK" in out
        assert "coverage" in out

    def test_bad_json_exit_two(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["--scenario", "master-equation", "--config", str(path)]) == 2
