import json
from unittest.mock import patch

import numpy as np
import pytest

from src.cli.commands import main
from src.services.serialization_service import emit_matrix, emit_mps


@pytest.fixture
def unitary_file(tmp_path, haar):
    """Three-qubit Haar-random unitary written to disk."""
    path = tmp_path / "u.mat.json"
    path.write_text(emit_matrix(haar(3)))
    return path


class TestRandom:
    """Test the random command."""

    def test_deterministic(self, tmp_path):
        """Test the same seed writes the same matrix."""
        first, second = tmp_path / "a.mat.json", tmp_path / "b.mat.json"
        assert main(["random", "--n", "2", "--seed", "7", "--out", str(first)]) == 0
        assert main(["random", "--n", "2", "--seed", "7", "--out", str(second)]) == 0
        assert first.read_text() == second.read_text()

    def test_width_limit(self, capsys):
        """Test widths above the limit exit with 3."""
        assert main(["random", "--n", "13"]) == 3
        assert "error:" in capsys.readouterr().err


class TestSynth:
    """Test the synth command."""

    def test_sdm(self, unitary_file, tmp_path, capsys):
        """Test SDM synthesis prints the audited counts and writes both outputs."""
        assert main(["synth", str(unitary_file)]) == 0
        out = capsys.readouterr().out
        assert "rotations=63 cnots=19" in out
        assert "audit=PASS" in out
        assert (tmp_path / "u.circuit.json").exists()
        assert (tmp_path / "u.qasm").read_text().startswith("OPENQASM 2.0;")

    @pytest.mark.parametrize("method, cnots", [("flag", 25), ("flag-nb1", 27)])
    def test_flag_methods(self, unitary_file, capsys, method, cnots):
        """Test the flag methods report their closed-form counts."""
        assert main(["synth", str(unitary_file), "--method", method]) == 0
        assert f"cnots={cnots}" in capsys.readouterr().out

    def test_skeleton(self, unitary_file, tmp_path):
        """Test the skeleton writes JSON only."""
        out = tmp_path / "skeleton"
        assert main(["synth", str(unitary_file), "--method", "flag-nb1", "--skeleton", "--out", str(out)]) == 0
        assert (tmp_path / "skeleton.circuit.json").exists()
        assert not (tmp_path / "skeleton.qasm").exists()

    def test_corrupted_input(self, tmp_path, capsys):
        """Test unreadable JSON exits with 2."""
        path = tmp_path / "bad.mat.json"
        path.write_text('{"dim": 2, "data": [[1, 0]')
        assert main(["synth", str(path)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        """Test a missing input exits with 2."""
        assert main(["synth", str(tmp_path / "absent.mat.json")]) == 2

    def test_non_unitary(self, tmp_path):
        """Test a non-unitary matrix exits with 3."""
        path = tmp_path / "ones.mat.json"
        path.write_text(emit_matrix(np.ones((2, 2))))
        assert main(["synth", str(path)]) == 3


class TestVerify:
    """Test the verify command."""

    def test_match(self, unitary_file, tmp_path, capsys):
        """Test a synthesized circuit verifies."""
        main(["synth", str(unitary_file)])
        capsys.readouterr()
        assert main(["verify", str(tmp_path / "u.circuit.json"), str(unitary_file)]) == 0
        assert capsys.readouterr().out.startswith("residual=")

    def test_perturbed_angle(self, unitary_file, tmp_path):
        """Test a perturbed rotation exits with 4."""
        main(["synth", str(unitary_file)])
        circuit_path = tmp_path / "u.circuit.json"
        data = json.loads(circuit_path.read_text())
        gate = next(g for g in data["gates"] if g["kind"] in ("RZ", "RY"))
        gate["angles"][0] += 0.1
        circuit_path.write_text(json.dumps(data))
        assert main(["verify", str(circuit_path), str(unitary_file)]) == 4

    def test_width_mismatch(self, unitary_file, tmp_path):
        """Test matrix and circuit of different widths exit with 2."""
        main(["synth", str(unitary_file)])
        other = tmp_path / "v.mat.json"
        other.write_text(emit_matrix(np.eye(4)))
        assert main(["verify", str(tmp_path / "u.circuit.json"), str(other)]) == 2


class TestCounts:
    """Test the counts command."""

    def test_synthesis_table(self, capsys):
        """Test the n=3 table lists SDM with 19 CNOTs."""
        assert main(["counts", "--n", "3"]) == 0
        rows = json.loads(capsys.readouterr().out.splitlines()[-1])
        sdm = next(row for row in rows if row["method"] == "SDM")
        assert (sdm["rotations"], sdm["cnots"]) == (63, 19)

    def test_subroutine_table_with_mps_row(self, capsys):
        """Test the mps-prep row is appended for a chain length."""
        assert main(["counts", "--table", "subroutines", "--n", "2", "--k", "1", "--length", "4"]) == 0
        rows = json.loads(capsys.readouterr().out.splitlines()[-1])
        assert rows[-1]["subroutine"] == "mps-prep"

    def test_invalid_n(self):
        """Test n below one exits with 2."""
        assert main(["counts", "--n", "0"]) == 2


class TestEstimate:
    """Test the estimate command."""

    def test_flag_decomposition(self, capsys):
        """Test the chosen lambda gives 67 Toffolis per multiplexed flag."""
        assert main(["estimate", "--n", "5", "--b", "16"]) == 0
        report = json.loads(capsys.readouterr().out.splitlines()[-1])
        blocks = {block["name"]: block["value"] for block in report["blocks"]}
        assert report["params"]["lambda"] == 2
        assert blocks["mux-flag"] == 67
        assert blocks["diagonal"] == 79

    def test_mps(self, capsys):
        """Test one MPS isometry at n=2."""
        assert main(["estimate", "--n", "2", "--b", "4", "--lambda", "1", "--lambda-prime", "2", "--mps"]) == 0
        report = json.loads(capsys.readouterr().out.splitlines()[-1])
        assert report["ours"] == 28

    def test_lambda_not_power_of_two(self):
        """Test lambda must be a power of two."""
        assert main(["estimate", "--n", "5", "--b", "16", "--lambda", "3"]) == 2

    def test_aux_cap_not_binding(self, capsys):
        """Test a roomy auxiliary register keeps lambda and adds no warning."""
        assert main(["estimate", "--n", "5", "--b", "16", "--aux", "256"]) == 0
        report = json.loads(capsys.readouterr().out.splitlines()[-1])
        assert report["params"]["lambda"] == 2
        assert report["warnings"] == []

    def test_aux_cap_binding(self, capsys):
        """Test a small auxiliary register lowers lambda and says so."""
        assert main(["estimate", "--n", "5", "--b", "16", "--aux", "16"]) == 0
        report = json.loads(capsys.readouterr().out.splitlines()[-1])
        assert report["params"]["lambda"] == 1
        assert report["warnings"] == ["lambda chosen from floor(aux / b) = 1"]


class TestMps:
    """Test the mps command."""

    def test_ghz(self, ghz_mps, tmp_path, capsys):
        """Test GHZ synthesis passes fidelity and the count audit."""
        path = tmp_path / "ghz.mps.json"
        path.write_text(emit_mps(ghz_mps))
        assert main(["mps", "synth", str(path)]) == 0
        out = capsys.readouterr().out
        assert "fidelity=1.0000000000" in out or "fidelity=0.9999999999" in out
        assert "audit=PASS" in out
        assert (tmp_path / "ghz.circuit.json").exists()
        assert (tmp_path / "ghz.qasm").exists()

    def test_skeleton_verify(self, mps_factory, tmp_path):
        """Test verification of the phase-gradient skeleton writes nothing."""
        path = tmp_path / "chain.mps.json"
        path.write_text(emit_mps(mps_factory(6, 4)))
        assert main(["mps", "verify", str(path), "--target", "skeleton"]) == 0
        assert not (tmp_path / "chain.circuit.json").exists()

    def test_malformed(self, tmp_path):
        """Test a malformed document exits with 2."""
        path = tmp_path / "bad.mps.json"
        path.write_text(json.dumps({"version": 1, "length": 2, "tensors": []}))
        assert main(["mps", "synth", str(path)]) == 2


class TestMain:
    """Test error handling in the entry point."""

    def test_unexpected_exception(self, capsys):
        """Test a crash inside a command prints the error, is logged and exits with 1."""
        with patch("src.cli.commands.resource_service.synthesis_table", side_effect=RuntimeError("boom")), \
                patch("src.cli.commands.logger") as logger:
            assert main(["counts", "--n", "3"]) == 1
        assert "error: boom" in capsys.readouterr().err
        message, exc = logger.log_exception.call_args.args
        assert message == "command crashed" and isinstance(exc, RuntimeError)
