import numpy as np
import pytest
from pydantic import ValidationError

from src.models.circuit import Axis, Circuit, Gate, GateKind, ResourceCount, canonical_angle


class TestGate:
    """Test gate construction and validation."""

    def test_rotation_angle_is_canonical(self):
        """Test rotation angles are reduced to (-2pi, 2pi]."""
        gate = Gate.rz(5 * np.pi, 0)
        assert -2 * np.pi < gate.angles[0] <= 2 * np.pi
        assert np.isclose(gate.angles[0], np.pi)

    def test_canonical_angle_keeps_small_values(self):
        """Test canonical_angle leaves in-range values alone."""
        assert canonical_angle(0.25) == 0.25
        assert canonical_angle(2 * np.pi) == pytest.approx(2 * np.pi)

    def test_mux_rot_shape(self):
        """Test MuxRot needs 2^k angles."""
        gate = Gate.mux_rot(Axis.Y, [0.1, 0.2, 0.3, 0.4], [0, 1], 2)
        assert gate.num_controls == 2 and gate.target == 2
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.MUX_ROT, axis=Axis.Y, qubits=(0, 1), angles=(0.1,))

    def test_mux_flag_halves(self):
        """Test MuxFlag stores theta_z followed by theta_y."""
        gate = Gate.mux_flag([0.1, 0.2], [0.3, 0.4], [0], 1)
        assert np.allclose(gate.theta_z, [0.1, 0.2])
        assert np.allclose(gate.theta_y, [0.3, 0.4])

    def test_duplicate_qubits_rejected(self):
        """Test two-qubit gates need distinct qubits."""
        with pytest.raises(ValidationError):
            Gate.controlled(GateKind.CNOT, 1, 1)

    def test_diagonal_needs_unit_phases(self):
        """Test Diagonal rejects non-unit phases when built directly."""
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.DIAGONAL, qubits=(0,), phases=(1 + 0j, 2 + 0j))

    def test_axis_only_for_mux_rot(self):
        """Test axis is rejected on other kinds."""
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.RZ, qubits=(0,), angles=(0.1,), axis=Axis.Z)

    def test_elementary_flag(self):
        """Test elementary and hierarchical kinds are told apart."""
        assert Gate.global_phase(0.3).is_elementary
        assert not Gate.diagonal([1, 1j], [0]).is_elementary


class TestCircuit:
    """Test circuit containers."""

    def test_rejects_qubit_outside_width(self):
        """Test gates must fit the width."""
        with pytest.raises(ValidationError):
            Circuit(width=1, gates=(Gate.controlled(GateKind.CZ, 0, 1),))

    def test_of_concatenates(self):
        """Test Circuit.of joins circuits and gate lists in order."""
        first = Circuit(width=2, gates=(Gate.rz(0.1, 0),))
        joined = Circuit.of(2, first, [Gate.ry(0.2, 1)])
        assert [g.kind for g in joined.gates] == [GateKind.RZ, GateKind.RY]
        assert len(joined) == 2
        assert joined.is_elementary

    def test_widened(self):
        """Test widening keeps gates."""
        circuit = Circuit(width=1, gates=(Gate.rz(0.1, 0),)).widened(3)
        assert circuit.width == 3 and len(circuit) == 1


class TestResourceCount:
    """Test resource count arithmetic."""

    def test_add(self):
        """Test counts add field by field."""
        total = ResourceCount(rotations=2, two_qubit_cliffords=1) + ResourceCount(rotations=3, global_phases=1)
        assert total.rotations == 5
        assert total.two_qubit_cliffords == 1
        assert total.global_phases == 1
