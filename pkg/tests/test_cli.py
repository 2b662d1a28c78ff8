from pathlib import Path

import numpy as np
import pytest

from becsmf import cli, io
from becsmf.config import (
    config_from_file, config_from_resolved, config_hash, parse_config,
)
from becsmf.errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

TINY = """
[run]
model = smf
seed = 5

[params]
b0 = 100
delta = 500
p0 = 2.2e-10
R = 1
omega_r = 1e-8

[grid]
n_points = 32
n_periods = 1

[time]
dtau = 1e-3
t_end = 0.2
trace_stride = 10
snapshot_stride = 100

[initial]
kind = cosine
amplitude = 1e-3
"""


class TestParseConfig:
    def test_shipped_strong_driving_config(self):
        cfg = config_from_file(CONFIG_DIR / "fig2.cfg")
        assert cfg.model == "smf"
        assert cfg.params.b0 == 100
        assert cfg.params.delta == 500
        assert cfg.params.p0 == 2e-9
        assert cfg.params.R == 1.0
        assert cfg.params.omega_r == 1e-8
        assert cfg.n_points == 1024 and cfg.n_periods == 8

    def test_empty_file_lists_required_keys(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("")
        with pytest.raises(ConfigError, match=r"\[params\] b0"):
            config_from_file(path)

    def test_duplicate_key_reports_line(self):
        text = TINY + "\n[grid]\nn_points = 64\n"
        with pytest.raises(ConfigError, match="duplicate section"):
            parse_config(text)
        dup = TINY.replace("amplitude = 1e-3", "amplitude = 1e-3\namplitude = 2e-3")
        with pytest.raises(ConfigError, match=r"line"):
            parse_config(dup)

    def test_unknown_key_is_an_error(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(TINY + "\nfoo = 1\n")

    def test_unknown_section_is_an_error(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config(TINY + "\n[mystery]\nx = 1\n")

    def test_type_mismatch_names_the_key(self):
        with pytest.raises(ConfigError, match=r"\[params\] b0"):
            parse_config(TINY.replace("b0 = 100", "b0 = plenty"))

    def test_missing_required_key(self):
        with pytest.raises(ConfigError, match="missing required"):
            parse_config(TINY.replace("b0 = 100", ""))

    def test_unknown_model(self):
        with pytest.raises(ConfigError, match="unknown model"):
            parse_config(TINY.replace("model = smf", "model = dmrg"))

    def test_provenance_tags(self):
        cfg = parse_config(TINY, overrides=("params.p0=2e-10",))
        assert cfg.provenance["params.b0"] == "explicit"
        assert cfg.provenance["params.p0"] == "override"
        assert cfg.provenance["time.t_end"] == "explicit"
        assert cfg.provenance["initial.noise_rms"] == "default"
        assert cfg.params.p0 == 2e-10

    def test_bad_override_forms(self):
        with pytest.raises(ConfigError):
            parse_config(TINY, overrides=("params.p0",))
        with pytest.raises(ConfigError):
            parse_config(TINY, overrides=("p0=1e-10",))
        with pytest.raises(ConfigError):
            parse_config(TINY, overrides=("params.nope=1",))

    def test_sech_phase_parses(self):
        cfg = parse_config(TINY + "\nphase = sech\n")
        assert cfg.init_phase == "sech"

    def test_resolved_roundtrip_preserves_hash(self):
        cfg = parse_config(TINY)
        again = config_from_resolved(cfg.resolved)
        assert config_hash(again.resolved) == config_hash(cfg.resolved)

    def test_hash_changes_with_values(self):
        a = parse_config(TINY)
        b = parse_config(TINY.replace("p0 = 2.2e-10", "p0 = 2.4e-10"))
        assert config_hash(a.resolved) != config_hash(b.resolved)


class TestCommands:
    def _write(self, tmp_path, text=TINY):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return path

    def test_simulate_writes_run_directory(self, tmp_path):
        cfgp = self._write(tmp_path)
        out = tmp_path / "out"
        assert cli.main(["simulate", "--config", str(cfgp), "--out", str(out)]) == 0
        assert (out / "manifest.json").exists()
        assert (out / "trace.csv").exists()
        assert (out / "summary.json").exists()
        assert (out / "snapshots" / "snap_000000_psi.bin").exists()
        assert (out / "snapshots" / "snap_000002_s.bin").exists()
        doc = io.read_manifest(out)
        assert doc["config"]["params"]["p0"] == 2.2e-10
        assert doc["config_hash"] == config_hash(doc["config"])

    def test_bit_identical_reruns(self, tmp_path):
        cfgp = self._write(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        cli.main(["simulate", "--config", str(cfgp), "--out", str(out1)])
        cli.main(["simulate", "--config", str(cfgp), "--out", str(out2)])
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
        s1 = sorted((out1 / "snapshots").iterdir())
        s2 = sorted((out2 / "snapshots").iterdir())
        assert [p.name for p in s1] == [p.name for p in s2]
        for a, b in zip(s1, s2):
            assert a.read_bytes() == b.read_bytes()

    def test_rerun_from_manifest(self, tmp_path):
        cfgp = self._write(tmp_path)
        out1 = tmp_path / "a"
        cli.main(["simulate", "--config", str(cfgp), "--out", str(out1)])
        out2 = tmp_path / "b"
        code = cli.main([
            "simulate", "--from-manifest", str(out1 / "manifest.json"),
            "--out", str(out2),
        ])
        assert code == 0
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()

    def test_analyze_run_directory(self, tmp_path, capsys):
        cfgp = self._write(tmp_path, TINY.replace("t_end = 0.2", "t_end = 30"))
        out = tmp_path / "out"
        cli.main(["simulate", "--config", str(cfgp), "--out", str(out)])
        assert cli.main(["analyze", "--run", str(out)]) == 0
        assert (out / "analysis.json").exists()
        text = capsys.readouterr().out
        assert "m_max" in text

    def test_reduced_command(self, tmp_path):
        text = TINY.replace("model = smf", "model = reduced")
        cfgp = self._write(tmp_path, text)
        out = tmp_path / "red"
        assert cli.main(["reduced", "--config", str(cfgp), "--out", str(out)]) == 0
        _c, cols = io.read_csv(out / "trace.csv")
        assert "s_re" in cols and "d" in cols and "m" in cols
        assert np.max(np.abs(cols["spin_invariant_drift"])) < 1e-10

    def test_model_subcommand_mismatch(self, tmp_path):
        cfgp = self._write(tmp_path)
        out = tmp_path / "x"
        assert cli.main(["reduced", "--config", str(cfgp), "--out", str(out)]) == 2

    def test_error_lines_are_machine_parsable(self, tmp_path, capsys):
        code = cli.main(["simulate", "--config", str(tmp_path / "missing.cfg"),
                         "--out", str(tmp_path / "o")])
        assert code == 2
        err = capsys.readouterr().err
        assert err.startswith("error: config-parse:")

    def test_analyze_missing_dir_is_io_error(self, tmp_path, capsys):
        code = cli.main(["analyze", "--run", str(tmp_path / "nowhere")])
        assert code == 5
        assert capsys.readouterr().err.startswith("error: io:")

    def test_no_out_dir_is_config_error(self, tmp_path, capsys):
        cfgp = self._write(tmp_path)
        assert cli.main(["simulate", "--config", str(cfgp)]) == 2
        assert "out" in capsys.readouterr().err

    def test_help_enumerates_config_keys(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["--help"])
        text = capsys.readouterr().out
        for key in ("omega_r", "n_points", "snapshot_stride", "noise_rms",
                    "observable", "paper_init"):
            assert key in text
