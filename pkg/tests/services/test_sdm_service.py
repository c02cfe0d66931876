import numpy as np
import pytest

from src.core.exceptions import UnsupportedRange
from src.models.circuit import GateKind
from src.services.circuit_service import count, to_matrix
from src.services.flag_service import asymmetric_two_qubit_decomp, core_decomp
from src.services.resource_service import flag_cost_audit, synthesis_counts, subroutine_counts
from src.services.sdm_service import (
    de_mux,
    one_qubit_unitary,
    re_de_mux,
    rec_flag_dec,
    sdm,
    two_qubit_unitary,
)
from src.utils.linalg import frobenius, haar_random_unitary, mux_ry_matrix
from tests.helpers import controlled, flag_product


def _embed(m: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(2), m)


class TestDeMux:
    """Test de-multiplexing of a block pair."""

    def test_identity(self, rng):
        """Test k0 = m0 D m1 and k1 = m0 D^dagger m1."""
        for _ in range(20):
            k0, k1 = haar_random_unitary(8, rng), haar_random_unitary(8, rng)
            m0, theta, m1 = de_mux(k0, k1)
            d = np.diag(np.exp(-0.5j * theta))
            assert frobenius(m0 @ d @ m1, k0) < 1e-10
            assert frobenius(m0 @ d.conj() @ m1, k1) < 1e-10

    def test_equal_blocks(self, rng):
        """Test identical blocks give zero angles."""
        k = haar_random_unitary(4, rng)
        m0, theta, m1 = de_mux(k, k)
        assert np.allclose(theta, 0.0, atol=1e-10)
        assert frobenius(m0 @ m1, k) < 1e-10


class TestReDeMux:
    """Test absorption of owed CY gates into a CSD core."""

    @pytest.mark.parametrize("owed_left, owed_right", [(True, True), (False, True), (True, False), (False, False)])
    def test_fragment_identity(self, rng, owed_left, owed_right):
        """Test CY^l . m_left . MuxRY . m_right . CY^r = m_left' . MuxRY' . m_right'."""
        m_left, m_right = haar_random_unitary(4, rng), haar_random_unitary(4, rng)
        theta = rng.uniform(0, np.pi, 4)
        cy = controlled(GateKind.CY, 1, 0, 3)
        eye = np.eye(8)
        before = ((cy if owed_left else eye) @ _embed(m_left) @ mux_ry_matrix(theta) @ _embed(m_right)
                  @ (cy if owed_right else eye))

        left, theta_prime, right = re_de_mux(m_left, m_right, theta, owed_left, owed_right)
        after = _embed(left) @ mux_ry_matrix(theta_prime) @ _embed(right)
        assert frobenius(after, before) < 1e-9


class TestSmallUnitaries:
    """Test exact one- and two-qubit synthesis."""

    def test_one_qubit(self, haar):
        """Test three rotations and a global phase."""
        u = haar(1)
        circuit = one_qubit_unitary(u, 0)
        assert frobenius(to_matrix(circuit), u) < 1e-12
        assert count(circuit).rotations == 3

    def test_two_qubit(self, haar):
        """Test 15 rotations and 3 CNOTs."""
        for _ in range(20):
            v = haar(2)
            circuit = two_qubit_unitary(v)
            assert frobenius(to_matrix(circuit), v) < 1e-9
            resources = count(circuit)
            assert (resources.rotations, resources.two_qubit_cliffords, resources.global_phases) == (15, 3, 1)

    def test_two_qubit_layout(self, haar):
        """Test three CNOT(0 -> 1) gates with the RX x RZ layer between the first two."""
        v = haar(2)
        gates = two_qubit_unitary(v).gates
        kak = asymmetric_two_qubit_decomp(v)
        cnots = [i for i, g in enumerate(gates) if g.kind == GateKind.CNOT]
        assert len(cnots) == 3
        assert all(gates[i].qubits == (0, 1) for i in cnots)
        middle = gates[cnots[0] + 1:cnots[1]]
        assert [(g.kind, g.qubits) for g in middle] == [(GateKind.RX, (0,)), (GateKind.RZ, (1,))]
        assert np.isclose(np.cos(middle[0].angles[0] / 2), np.cos(kak.theta / 2))

    @pytest.mark.parametrize("v", [np.eye(4), np.diag([1, 1, 1, -1]), np.kron([[0, 1], [1, 0]], np.eye(2))])
    def test_two_qubit_special_inputs(self, v):
        """Test identity, CZ and a local gate reconstruct through the fixed template."""
        circuit = two_qubit_unitary(np.asarray(v, dtype=complex))
        assert frobenius(to_matrix(circuit), v) < 1e-9


class TestRecFlagDec:
    """Test the recursive flag decomposition."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_reconstruction(self, haar, n):
        """Test v = diag(delta) . flag with 4^n - 2^n rotations."""
        v = haar(n)
        factor = rec_flag_dec(v, list(range(n)))
        assert frobenius(flag_product(factor.delta, factor.flag, n), v) < 1e-9
        assert count(factor.flag).rotations == 4 ** n - 2 ** n

    @pytest.mark.parametrize("n, cnots", [(3, 18), (4, 97), (5, 445), (6, 1905)])
    def test_cnot_counts(self, haar, n, cnots):
        """Test the counted flag cost against 1/2 4^n - (n+12)/8 2^n + 1."""
        factor = rec_flag_dec(haar(n), list(range(n)))
        measured = count(factor.flag).two_qubit_cliffords
        assert measured == cnots == subroutine_counts("nq-flag", n).count.two_qubit_cliffords

        report = flag_cost_audit(n, measured)
        assert report.passed
        assert "does not match" in report.notes[0]

    def test_saving_over_plain_flag(self, haar):
        """Test the saving over core_decomp(nb=2) is (n-2) 2^(n-3)."""
        for n in (3, 4, 5):
            v = haar(n)
            plain = count(core_decomp(v[None], [], list(range(n)), nb=2, kappa=True).flag).two_qubit_cliffords
            ours = count(rec_flag_dec(v, list(range(n))).flag).two_qubit_cliffords
            assert plain - ours == (n - 2) * 2 ** (n - 3)

    def test_rejects_mismatched_qubits(self, haar):
        """Test the qubit list must match the matrix."""
        with pytest.raises(UnsupportedRange):
            rec_flag_dec(haar(3), [0, 1])


class TestSdm:
    """Test selective de-multiplexing synthesis."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_exactness_and_counts(self, haar, n):
        """Test exact reconstruction, 4^n - 1 rotations and the SDM CNOT count."""
        samples = {5: 2, 6: 1}.get(n, 5)
        for _ in range(samples):
            u = haar(n)
            circuit = sdm(u)
            assert frobenius(to_matrix(circuit), u) < 1e-9
            resources = count(circuit)
            assert resources.rotations == 4 ** n - 1
            assert resources.global_phases == 1
            if n >= 2:
                assert resources.two_qubit_cliffords == synthesis_counts("SDM", n).cnots

    def test_nineteen_cnots_at_three_qubits(self, haar):
        """Test n=3 needs 19 CNOTs."""
        assert count(sdm(haar(3))).two_qubit_cliffords == 19

    def test_identity(self):
        """Test the identity synthesizes exactly."""
        circuit = sdm(np.eye(8, dtype=complex))
        assert frobenius(to_matrix(circuit), np.eye(8)) < 1e-9

    def test_relabelled_qubits(self, haar):
        """Test synthesis onto a shifted register."""
        u = haar(3)
        circuit = sdm(u, [1, 2, 3])
        assert circuit.width == 4
        assert frobenius(to_matrix(circuit), np.kron(np.eye(2), u)) < 1e-9

    @pytest.mark.parametrize("n, cnots", [(3, 19), (4, 95), (5, 432), (6, 1861)])
    def test_closed_form_cnots(self, haar, n, cnots):
        """Test the counted CNOTs against 1/2 4^n - 3/8 (n+2) 2^n + n - 1."""
        resources = count(sdm(haar(n)))
        assert (resources.rotations, resources.two_qubit_cliffords) == (4 ** n - 1, cnots)

    @pytest.mark.parametrize("n", [3, 4])
    def test_symmetrized_y_multiplexer(self, haar, n):
        """Test the R_Y multiplexer alternates RY and CZ on the head qubit and ends on the owed CZ."""
        size = 2 ** (n - 1)
        head_gates = [g for g in sdm(haar(n)).gates if 0 in g.qubits]
        kinds = [g.kind for g in head_gates]
        assert kinds.count(GateKind.CNOT) == 0
        assert kinds.count(GateKind.CY) == 2 * (size - 1)
        assert kinds.count(GateKind.CZ) == size

        y_section = head_gates[2 * size - 1:4 * size - 1]
        assert [g.kind for g in y_section] == [GateKind.RY, GateKind.CZ] * size
        assert y_section[-1].qubits == (1, 0)
