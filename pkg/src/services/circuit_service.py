"""
Matrix oracle, statevector simulation, gate counting and lowering.
"""
from typing import List, Optional

import numpy as np

from src.core.config import settings
from src.core.exceptions import SizeExceeded, WidthExceeded
from src.models.circuit import (
    ONE_QUBIT_CLIFFORDS,
    ROTATION_AXIS,
    ROTATIONS,
    TWO_QUBIT_CLIFFORDS,
    Axis,
    Circuit,
    Gate,
    GateKind,
    ResourceCount,
)
from src.services.multiplexer_service import dec_mux_1QF, decompose_diagonal, mottonen
from src.utils.linalg import flag_matrix, rx, ry, rz

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

FIXED_MATRICES = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    GateKind.S: np.diag([1, 1j]),
    GateKind.SDG: np.diag([1, -1j]),
    GateKind.X: PAULI_X,
    GateKind.Z: PAULI_Z,
}
CONTROLLED_PAULI = {GateKind.CNOT: PAULI_X, GateKind.CY: PAULI_Y, GateKind.CZ: PAULI_Z}
AXIS_MATRIX = {Axis.X: rx, Axis.Y: ry, Axis.Z: rz}


def gate_blocks(gate: Gate) -> np.ndarray:
    """Target blocks (2^k, 2, 2) of any non-diagonal gate, indexed by control state."""
    kind = gate.kind
    if kind in ROTATIONS:
        return AXIS_MATRIX[ROTATION_AXIS[kind]](gate.angles[0])[None]
    if kind in ONE_QUBIT_CLIFFORDS:
        return FIXED_MATRICES[kind][None]
    if kind in TWO_QUBIT_CLIFFORDS:
        return np.stack([IDENTITY, CONTROLLED_PAULI[kind]])
    if kind == GateKind.MUX_ROT:
        build = AXIS_MATRIX[gate.axis]
        return np.stack([build(theta) for theta in gate.angles])
    if kind == GateKind.MUX_FLAG:
        return np.stack([flag_matrix(z, y) for z, y in zip(gate.theta_z, gate.theta_y)])
    if kind == GateKind.MUX_U2:
        return np.asarray(gate.blocks, dtype=complex).reshape(-1, 2, 2)
    raise ValueError(f"{kind.value} has no block form")


def _apply(tensor: np.ndarray, gate: Gate) -> np.ndarray:
    """Apply gate to a tensor of shape (2,)*n + extra."""
    if gate.kind == GateKind.GLOBAL_PHASE:
        return tensor * np.exp(1j * gate.angles[0])

    qubits = list(gate.qubits)
    k = len(qubits)
    front = np.moveaxis(tensor, qubits, list(range(k)))
    shape = front.shape
    if gate.kind == GateKind.DIAGONAL:
        flat = front.reshape(2 ** k, -1) * np.asarray(gate.phases, dtype=complex)[:, None]
    else:
        flat = np.einsum("jab,jbr->jar", gate_blocks(gate), front.reshape(2 ** (k - 1), 2, -1))
    return np.moveaxis(flat.reshape(shape), list(range(k)), qubits)


def to_matrix(circuit: Circuit) -> np.ndarray:
    """Dense unitary G_m ... G_1 of the circuit."""
    n = circuit.width
    if n > settings.max_width:
        raise WidthExceeded("circuit too wide for a dense matrix", width=n, limit=settings.max_width)
    dim = 2 ** n
    tensor = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for gate in circuit.gates:
        tensor = _apply(tensor, gate)
    return tensor.reshape(dim, dim)


def apply_to_state(circuit: Circuit, state: Optional[np.ndarray] = None) -> np.ndarray:
    """Statevector after running the circuit; |0...0> when no state is given."""
    n = circuit.width
    if n > settings.max_mps_length:
        raise SizeExceeded("circuit too wide for statevector simulation", width=n,
                           limit=settings.max_mps_length)
    if state is None:
        state = np.zeros(2 ** n, dtype=complex)
        state[0] = 1.0
    tensor = np.asarray(state, dtype=complex).reshape((2,) * n)
    for gate in circuit.gates:
        tensor = _apply(tensor, gate)
    return tensor.reshape(-1)


def _count_elementary(gate: Gate) -> ResourceCount:
    kind = gate.kind
    if kind in ROTATIONS:
        return ResourceCount(rotations=1)
    if kind in ONE_QUBIT_CLIFFORDS:
        return ResourceCount(other_cliffords=1)
    if kind in TWO_QUBIT_CLIFFORDS:
        return ResourceCount(two_qubit_cliffords=1)
    if kind == GateKind.GLOBAL_PHASE:
        return ResourceCount(global_phases=1)
    raise ValueError(f"cannot count {kind.value}")


def count(circuit: Circuit) -> ResourceCount:
    """Elementary gate counts of the circuit after lowering every hierarchical gate."""
    total = ResourceCount()
    for gate in lower(circuit).gates:
        total = total + _count_elementary(gate)
    total.parameters = total.rotations + total.global_phases
    return total


def lower_gate(gate: Gate, width: int) -> List[Gate]:
    kind = gate.kind
    if gate.is_elementary:
        return [gate]
    if kind == GateKind.MUX_ROT:
        return list(mottonen(gate.angles, gate.axis, gate.controls, gate.target).gates)
    if kind == GateKind.DIAGONAL:
        return list(decompose_diagonal(np.asarray(gate.phases), gate.qubits, lowered=True).gates)
    if kind in (GateKind.MUX_FLAG, GateKind.MUX_U2):
        flags, delta = dec_mux_1QF(gate_blocks(gate), gate.controls, gate.target)
        return list(flags.gates) + list(decompose_diagonal(delta, gate.qubits, lowered=True).gates)
    raise ValueError(f"cannot lower {kind.value}")


def lower(circuit: Circuit) -> Circuit:
    """Expand hierarchical gates into {Clifford + Rot} elementary gates."""
    if circuit.is_elementary:
        return circuit
    gates: List[Gate] = []
    for gate in circuit.gates:
        gates.extend(lower_gate(gate, circuit.width))
    return Circuit(width=circuit.width, gates=tuple(gates))
