import numpy as np
import pytest

from becsmf import io
from becsmf.errors import OutputError


class TestCsv:
    def test_roundtrip_exact_floats(self, tmp_path):
        rng = np.random.default_rng(31)
        cols = {
            "tau": rng.standard_normal(20) * 100,
            "m": 10.0 ** rng.uniform(-12, 0, 20),
        }
        path = tmp_path / "t.csv"
        io.write_csv(path, cols, comments={"model": "smf", "k": "v"})
        comments, back = io.read_csv(path)
        assert comments["model"] == "smf"
        assert np.array_equal(back["tau"], cols["tau"])
        assert np.array_equal(back["m"], cols["m"])

    def test_string_and_int_columns(self, tmp_path):
        path = tmp_path / "t.csv"
        io.write_csv(path, {"seed": np.array([0, 1, 2]), "err": np.array(["", "x", ""])})
        text = path.read_text()
        assert "0,\n" in text or "0," in text.splitlines()[1]
        _c, back = io.read_csv(path)
        assert list(back["seed"]) == [0.0, 1.0, 2.0]

    def test_missing_header_is_an_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("# only: comments\n")
        with pytest.raises(OutputError):
            io.read_csv(path)


class TestSnapshot:
    def test_roundtrip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(32)
        values = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        header = {"n_points": 64, "n_periods": 1, "tau": 0.125,
                  "model": "smf", "config_hash": "cafe", "field": "psi"}
        path = tmp_path / "s.bin"
        io.write_snapshot(path, values, header)
        back, h = io.read_snapshot(path)
        assert np.array_equal(back, values)
        assert h["tau"] == 0.125 and h["field"] == "psi"
        # writing again yields identical bytes
        blob1 = path.read_bytes()
        io.write_snapshot(path, values, header)
        assert path.read_bytes() == blob1

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOPE" + b"\x00" * 32)
        with pytest.raises(OutputError, match="magic"):
            io.read_snapshot(path)

    def test_unsupported_version(self, tmp_path):
        import json
        import struct

        header = json.dumps({"n_points": 1}).encode()
        path = tmp_path / "v9.bin"
        path.write_bytes(
            io.MAGIC + struct.pack("<II", 9, len(header)) + header + b"\x00" * 16
        )
        with pytest.raises(OutputError, match="version"):
            io.read_snapshot(path)

    def test_truncated_payload(self, tmp_path):
        values = np.ones(8, complex)
        header = {"n_points": 8}
        path = tmp_path / "t.bin"
        io.write_snapshot(path, values, header)
        blob = path.read_bytes()
        path.write_bytes(blob[:-8])
        with pytest.raises(OutputError, match="payload"):
            io.read_snapshot(path)


class TestManifest:
    def test_roundtrip(self, tmp_path):
        io.write_manifest(tmp_path, {"config": {"a": 1}, "config_hash": "x"})
        doc = io.read_manifest(tmp_path)
        assert doc["config"] == {"a": 1}
        assert doc["manifest_version"] == io.MANIFEST_VERSION

    def test_unknown_version_refused(self, tmp_path):
        (tmp_path / "manifest.json").write_text('{"manifest_version": 99}')
        with pytest.raises(OutputError, match="version"):
            io.read_manifest(tmp_path)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(OutputError):
            io.read_manifest(tmp_path / "nowhere")
