import numpy as np
import pytest

from src.core.config import Tolerances, settings
from src.core.exceptions import NumericalBreakdown, UnsupportedRange
from src.models.circuit import GateKind
from src.services import flag_service
from src.services.circuit_service import count, to_matrix
from src.services.flag_service import (
    asymmetric_two_qubit_decomp,
    core_decomp,
    flag_synthesize,
    kak_matrix,
    one_qubit_flag,
    two_qubit_flag,
)
from src.services.resource_service import synthesis_counts
from src.utils.bits import ruler_sequence
from src.utils.linalg import frobenius, haar_random_unitary
from tests.helpers import flag_product, multiplexer


class TestSmallFlags:
    """Test one- and two-qubit flags."""

    def test_one_qubit_flag(self, haar):
        """Test u = diag(delta) . R_Y R_Z."""
        u = haar(1)
        factor = one_qubit_flag(u, 0)
        assert frobenius(flag_product(factor.delta, factor.flag, 1), u) < 1e-12
        assert count(factor.flag).rotations == 2

    def test_two_qubit_flag(self, haar):
        """Test the two-qubit flag has 12 rotations and 2 CZ."""
        for _ in range(10):
            v = haar(2)
            factor = two_qubit_flag(v, [0, 1])
            assert frobenius(flag_product(factor.delta, factor.flag, 2), v) < 1e-9
            resources = count(factor.flag)
            assert (resources.rotations, resources.two_qubit_cliffords) == (12, 2)
            assert all(g.kind in (GateKind.RZ, GateKind.RY, GateKind.CZ) for g in factor.flag.gates)

    def test_two_qubit_flag_on_identity(self):
        """Test a locally trivial input."""
        factor = two_qubit_flag(np.eye(4), [0, 1])
        assert frobenius(flag_product(factor.delta, factor.flag, 2), np.eye(4)) < 1e-9

    def test_two_qubit_flag_needs_4x4(self, haar):
        """Test other sizes are refused."""
        with pytest.raises(UnsupportedRange):
            two_qubit_flag(haar(3), [0, 1])

    def test_asymmetric_decomposition(self, haar):
        """Test the CNOT . R_ZZ form reassembles."""
        v = haar(2)
        assert frobenius(kak_matrix(asymmetric_two_qubit_decomp(v)), v) < 1e-10

    def test_asymmetric_residual_limit_from_settings(self, haar, monkeypatch):
        """Test the reassembly check honours the configured unitarity tolerance."""
        v = haar(2)
        monkeypatch.setattr(flag_service, "frobenius", lambda a, b: 1e-6)
        with pytest.raises(NumericalBreakdown, match="asymmetric"):
            asymmetric_two_qubit_decomp(v)
        monkeypatch.setattr(settings, "tolerances", Tolerances(unitarity=1e-5))
        asymmetric_two_qubit_decomp(v)


class TestCoreDecomp:
    """Test multiplexed flag decomposition."""

    @pytest.mark.parametrize("nb", [1, 2])
    @pytest.mark.parametrize("k, m", [(0, 2), (1, 2), (0, 3), (1, 3), (2, 2)])
    def test_lowered_multiplexer(self, rng, nb, k, m):
        """Test diag(delta) . flag equals the multiplexer."""
        blocks = np.stack([haar_random_unitary(2 ** m, rng) for _ in range(2 ** k)])
        factor = core_decomp(blocks, list(range(k)), list(range(k, k + m)), nb=nb, kappa=True)
        assert factor.flag.is_elementary
        assert frobenius(flag_product(factor.delta, factor.flag, k + m), multiplexer(blocks)) < 1e-8

    def test_rejects_bad_nb(self, haar):
        """Test nb outside {1, 2} is refused."""
        with pytest.raises(UnsupportedRange):
            core_decomp(haar(2)[None], [], [0, 1], nb=3)


class TestFlagSynthesize:
    """Test full unitary synthesis through the flag decomposition."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_flag_counts_and_exactness(self, haar, n):
        """Test 4^n - 1 rotations and the FlagDecomp CNOT count."""
        u = haar(n)
        circuit = flag_synthesize(u, nb=2)
        assert frobenius(to_matrix(circuit), u) < 1e-9
        resources = count(circuit)
        assert resources.rotations == 4 ** n - 1
        assert resources.global_phases == 1
        if n >= 2:
            assert resources.two_qubit_cliffords == synthesis_counts("FlagDecomp", n).cnots

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_bergholm_counts_and_exactness(self, haar, n):
        """Test nb=1 reproduces the CSD04B row."""
        u = haar(n)
        circuit = flag_synthesize(u, nb=1)
        assert frobenius(to_matrix(circuit), u) < 1e-9
        resources = count(circuit)
        assert resources.rotations == 4 ** n - 1
        assert resources.two_qubit_cliffords == synthesis_counts("CSD04B", n).cnots

    def test_table_values_at_three_qubits(self, haar):
        """Test 25 CNOTs for nb=2 and 27 for nb=1."""
        u = haar(3)
        assert count(flag_synthesize(u, nb=2)).two_qubit_cliffords == 25
        assert count(flag_synthesize(u, nb=1)).two_qubit_cliffords == 27

    def test_table_values_at_six_qubits(self, haar):
        """Test 1999 CNOTs for nb=2 and 2015 for nb=1, both with 4095 rotations."""
        u = haar(6)
        for nb, cnots in ((2, 1999), (1, 2015)):
            circuit = flag_synthesize(u, nb=nb)
            assert frobenius(to_matrix(circuit), u) < 1e-9
            resources = count(circuit)
            assert (resources.rotations, resources.two_qubit_cliffords) == (4095, cnots)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_gray_code_targets(self, rng, n):
        """Test MuxFlag targets of the nb=1 skeleton follow the ruler sequence."""
        circuit = flag_synthesize(haar_random_unitary(2 ** n, rng), nb=1, lowered=False)
        targets = [g.target for g in circuit.gates if g.kind == GateKind.MUX_FLAG]
        assert targets == [n - 1 - bit for bit in ruler_sequence(2 ** n - 1)]

    def test_skeleton_matches_lowered(self, haar):
        """Test the hierarchical skeleton has the same matrix."""
        u = haar(3)
        assert frobenius(to_matrix(flag_synthesize(u, nb=1, lowered=False)), u) < 1e-9
