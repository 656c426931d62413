import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gmisim.cli import main as cli_main
from gmisim.core import ValidationError
from gmisim.runner import find_bias, run_sweep
from gmisim.scenario import ScenarioConfig, parse_scenario


def write(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestParsing:
    def test_empty_file_gives_defaults(self, tmp_path):
        config = parse_scenario(write(tmp_path, ""), preset="gmi")
        assert config.preset == "gmi"
        assert config.wavelength_nm == 1064.0
        assert config.power_w == 125.0
        assert config.arm_length_m == 4000.0
        assert config.provenance["wavelength_nm"] == "default"

    def test_no_file_at_all(self):
        config = parse_scenario(None)
        assert config.power_w == 125.0

    def test_aligo_preset_defaults(self, tmp_path):
        config = parse_scenario(write(tmp_path, 'preset = "aligo-simplified"'))
        assert config.prm_transmittance == 0.03
        assert config.srm_transmittance == 0.20
        assert config.itm_transmittance == 0.014
        assert config.arm_length_m == 4000.0

    def test_bias_resolution_with_offset_doubling(self, tmp_path):
        config = parse_scenario(write(tmp_path, """
[bias]
phi_n_deg = 0.02
phi_e_deg = -0.0201
"""))
        phi_n, phi_e = config.roundtrip_phases()
        assert phi_n == pytest.approx(math.radians(0.02), rel=1e-12)
        assert config.offset_deg == pytest.approx(1e-4, rel=1e-9)
        # the offset is a one-way tuning: it doubles in the round trip
        assert phi_e == pytest.approx(-math.radians(0.0202), rel=1e-9)
        # one-way offset length reproduces the configured degrees
        k0 = config.carrier().k0
        assert math.degrees(config.offset_length() * k0) == pytest.approx(
            1e-4, rel=1e-9)

    def test_provenance_tracks_origins(self, tmp_path):
        path = write(tmp_path, "[carrier]\npower_w = 250.0\n")
        config = parse_scenario(path, overrides=["bias.phi_n_deg=0.3"])
        assert config.provenance["power_w"] == "file"
        assert config.provenance["phi_n_deg"] == "override"
        assert config.provenance["arm_length_m"] == "default"

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="unknown configuration key"):
            parse_scenario(write(tmp_path, "[carrier]\nfrequency_thz = 282.0\n"))

    def test_syntax_error_carries_line_number(self, tmp_path):
        with pytest.raises(ValidationError, match="line 2"):
            parse_scenario(write(tmp_path, "[carrier]\npower_w = = 1\n"))

    def test_unit_violation_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            parse_scenario(write(tmp_path, "[carrier]\nwavelength_nm = -5.0\n"))
        with pytest.raises(ValidationError):
            parse_scenario(write(tmp_path, '[carrier]\npower_w = "lots"\n'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="not found"):
            parse_scenario(tmp_path / "nope.toml")

    def test_unknown_preset(self, tmp_path):
        with pytest.raises(ValidationError, match="unknown preset"):
            parse_scenario(write(tmp_path, 'preset = "sagnac"'))

    def test_degrees_radians_roundtrip_exact(self, tmp_path):
        config = parse_scenario(write(tmp_path, """
[bias]
phi_n_deg = 0.06
phi_e_deg = -0.06
"""))
        phi_n, _ = config.roundtrip_phases()
        assert math.degrees(phi_n) == pytest.approx(0.06, rel=1e-12)


class TestRunSweep:
    def test_transmission_outputs_and_peaks(self, tmp_path):
        config = parse_scenario(None, overrides=[
            "transmission.phi_n_deg=[12.0, 32.0, 52.0]",
            "transmission.points=719",
        ])
        result = run_sweep(config, "transmission", tmp_path)
        csvs = sorted(p for p in result.files if p.suffix == ".csv")
        assert len(csvs) == 3
        for path, phi_n in zip(csvs, (12.0, 32.0, 52.0)):
            rows = np.loadtxt(path, delimiter=",", skiprows=1)
            assert rows.shape[1] == 2
            # bright fringe sits at 360 - phi_n
            peak_loc = rows[np.argmax(rows[:, 1]), 0]
            assert peak_loc == pytest.approx(360.0 - phi_n, abs=1.0)
            assert rows[:, 1].max() <= 1.0 + 1e-9

    def test_spectrum_csv_schema(self, tmp_path):
        config = parse_scenario(None, overrides=[
            "bias.delta_off_deg=1e-4", "sweep.points=6"])
        result = run_sweep(config, "nsr", tmp_path)
        path = [p for p in result.files if p.name == "nsr.csv"][0]
        header = path.read_text().splitlines()[0]
        assert header == ("frequency_hz,tf_mag_w_per_h,tf_phase_rad,"
                          "shot_asd_w_rthz,nsr_strain_rthz,diverged")

    def test_divergence_serializes_as_inf_token(self, tmp_path):
        config = parse_scenario(None, overrides=[
            "bias.delta_off_deg=1e-4",
            "sweep.f_min_hz=30000.0", "sweep.f_max_hz=50000.0",
            "sweep.points=4", "sweep.include_notches=true"])
        result = run_sweep(config, "nsr", tmp_path)
        text = [p for p in result.files if p.name == "nsr.csv"][0].read_text()
        diverged = [ln for ln in text.splitlines() if ln.endswith(",1")]
        assert len(diverged) == 1
        assert ",inf," in diverged[0]
        meta = json.loads((tmp_path / "nsr_metadata.json").read_text())
        assert meta["divergences"] == [pytest.approx(37474.05725)]

    def test_byte_identical_reruns(self, tmp_path):
        config = parse_scenario(None, overrides=[
            "bias.delta_off_deg=1e-4", "sweep.points=12"])
        a = run_sweep(config, "nsr", tmp_path / "a")
        b = run_sweep(config, "nsr", tmp_path / "b")
        for pa, pb in zip(sorted(a.files), sorted(b.files)):
            assert pa.read_bytes() == pb.read_bytes()

    def test_power_mode_csv(self, tmp_path):
        config = parse_scenario(None, overrides=["bias.phi_n_deg=0.3",
                                                 "bias.phi_e_deg=-0.3"])
        result = run_sweep(config, "power", tmp_path)
        text = [p for p in result.files if p.name == "power.csv"][0].read_text()
        lines = text.splitlines()
        assert lines[0] == "component,power_w"
        names = [ln.split(",")[0] for ln in lines[1:]]
        assert names == sorted(names)
        assert "ETM_N" in names

    def test_noise_budget_mode(self, tmp_path):
        config = parse_scenario(None, overrides=[
            "bias.delta_off_deg=1e-4", "sweep.points=5",
            "noise.frequency_asd='builtin:aligo_frequency_noise'",
            "noise.intensity_asd='builtin:aligo_intensity_noise'"])
        result = run_sweep(config, "noise-budget", tmp_path)
        path = [p for p in result.files if p.name == "budget.csv"][0]
        lines = path.read_text().splitlines()
        assert lines[0] == ("frequency_hz,coating_thermal_strain_rthz,"
                            "laser_frequency_strain_rthz,"
                            "laser_intensity_strain_rthz,shot_strain_rthz,"
                            "total_strain_rthz")
        rows = np.loadtxt(path, delimiter=",", skiprows=1)
        rss = np.sqrt((rows[:, 1:-1] ** 2).sum(axis=1))
        np.testing.assert_allclose(rows[:, -1], rss, rtol=1e-12)
        meta = json.loads((tmp_path / "noise_budget_metadata.json").read_text())
        assert any("quadrature-envelope" in a for a in meta["approximations"])
        assert any("shot-noise-at-detector" in a for a in meta["approximations"])

    def test_metadata_has_config_and_provenance(self, tmp_path):
        config = parse_scenario(None, overrides=["carrier.power_w=200.0",
                                                 "bias.delta_off_deg=1e-4",
                                                 "sweep.points=4"])
        run_sweep(config, "transfer", tmp_path)
        meta = json.loads((tmp_path / "transfer_metadata.json").read_text())
        assert meta["config"]["power_w"] == 200.0
        assert meta["provenance"]["power_w"] == "override"
        assert meta["solver"]["residual_tolerance"] == 1e-12

    def test_transmission_rejects_aligo(self, tmp_path):
        config = parse_scenario(None, preset="aligo-simplified")
        with pytest.raises(ValidationError, match="arm-phase preset"):
            run_sweep(config, "transmission", tmp_path)

    def test_unknown_mode(self, tmp_path):
        with pytest.raises(ValidationError, match="unknown mode"):
            run_sweep(parse_scenario(None), "fft", tmp_path)


class TestFindBias:
    def test_gain_half(self):
        config = parse_scenario(None, overrides=["find_bias.gain=0.5"])
        report = find_bias(config)
        assert report["theta_b_deg"] == pytest.approx(90.0, rel=1e-9)

    def test_thousandfold_amplitude(self):
        config = parse_scenario(None, overrides=["find_bias.gain=1e6"])
        report = find_bias(config)
        assert report["theta_b_deg"] == pytest.approx(0.081, rel=2e-3)
        assert report["gain_analytic"] == pytest.approx(1e6, rel=1e-9)

    def test_nsr_target_hit_on_network(self):
        config = parse_scenario(None, overrides=[
            "find_bias.target='nsr-at-frequency'",
            "find_bias.nsr=1e-23", "find_bias.frequency_hz=100.0",
            "bias.delta_off_deg=1e-5"])
        report = find_bias(config)
        assert abs(report["target_miss"]) < 1e-6

    def test_unattainable_target_explains(self):
        config = parse_scenario(None, overrides=[
            "find_bias.target='nsr-at-frequency'", "find_bias.nsr=1e-28"])
        with pytest.raises(ValidationError, match="below the minimum"):
            find_bias(config)

    def test_frequency_above_notch_rejected(self):
        config = parse_scenario(None, overrides=[
            "find_bias.target='nsr-at-frequency'",
            "find_bias.frequency_hz=40000.0"])
        with pytest.raises(ValidationError, match="notch"):
            find_bias(config)


class TestCli:
    def test_exit_codes(self, tmp_path):
        out = tmp_path / "out"
        assert cli_main(["power", "--out", str(out), "--preset", "mi"]) == 0
        assert cli_main(["power", "--out", str(out), "--config",
                         str(tmp_path / "missing.toml")]) == 2
        bad = tmp_path / "bad.toml"
        bad.write_text("preset = 'gmi'\n[carrier]\npower_w = -4.0\n")
        assert cli_main(["power", "--out", str(out), "--config", str(bad)]) == 2

    def test_console_script_runs(self, tmp_path):
        out = tmp_path / "cli"
        proc = subprocess.run(
            [sys.executable, "-m", "gmisim.cli", "transfer", "--out", str(out),
             "--preset", "mi", "--set", "bias.phi_e_deg=-0.001",
             "--set", "sweep.points=4"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (out / "transfer.csv").exists()

    def test_thread_cap_respected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("IFO_THREADS", "1")
        config = parse_scenario(None, overrides=["bias.delta_off_deg=1e-4",
                                                 "sweep.points=10"])
        result = run_sweep(config, "nsr", tmp_path / "st")
        monkeypatch.setenv("IFO_THREADS", "3")
        result2 = run_sweep(config, "nsr", tmp_path / "mt")
        a = [p for p in result.files if p.suffix == ".csv"][0].read_bytes()
        b = [p for p in result2.files if p.suffix == ".csv"][0].read_bytes()
        assert a == b

    def test_bad_thread_cap(self, tmp_path, monkeypatch):
        monkeypatch.setenv("IFO_THREADS", "many")
        config = parse_scenario(None, overrides=["bias.delta_off_deg=1e-4",
                                                 "sweep.points=10"])
        with pytest.raises(ValidationError, match="IFO_THREADS"):
            run_sweep(config, "nsr", tmp_path)
