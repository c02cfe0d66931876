"""
Lowering of multiplexed rotations, multiplexed single-qubit flags and
diagonal unitaries into elementary gates.
"""
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import settings
from src.core.exceptions import IncompatibleEntangler, NumericalBreakdown
from src.core.logger import get_logger
from src.models.circuit import Axis, Circuit, Gate, GateKind
from src.utils.bits import gray, popcount, trailing_zeros
from src.utils.linalg import euler_delta, euler_zyz, frobenius

logger = get_logger(__name__)


class Symmetry(str, Enum):
    NONE = "none"
    LEFT = "left"
    RIGHT = "right"


ENTANGLER_AXIS = {GateKind.CNOT: Axis.X, GateKind.CY: Axis.Y, GateKind.CZ: Axis.Z}
DEFAULT_ENTANGLER = {Axis.Z: GateKind.CNOT, Axis.Y: GateKind.CNOT, Axis.X: GateKind.CZ}

S_DAG = np.diag([1.0, -1.0j])
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2)
QUARTER = np.array([np.exp(0.25j * np.pi), np.exp(-0.25j * np.pi)])


def _width(*qubit_groups: Sequence[int]) -> int:
    return max((q for group in qubit_groups for q in group), default=-1) + 1


def mottonen_angles(angles: np.ndarray) -> np.ndarray:
    """theta_hat = M^T theta / 2^k with M[x, i] = (-1)^{popcount(x & gray(i))}."""
    angles = np.asarray(angles, dtype=float)
    size = len(angles)
    signs = np.array([[(-1) ** popcount(x & gray(i)) for i in range(size)] for x in range(size)])
    return signs.T @ angles / size


def entangler_controls(controls: Sequence[int]) -> List[int]:
    """Control of the entangler following each rotation, in Gray-code order."""
    k = len(controls)
    size = 2 ** k
    picks = [controls[k - 1 - trailing_zeros(i + 1)] for i in range(size - 1)]
    return picks + [controls[0]]


def mottonen(angles: Sequence[float], axis: Axis, controls: Sequence[int], target: int,
             sym: Symmetry = Symmetry.NONE, entangler: Optional[GateKind] = None) -> Circuit:
    """Multiplexed rotation as alternating rotations and entanglers.

    With sym=RIGHT the final entangler is left out and
    multiplexer = CQ . circuit for CQ = CQ(controls[0], target), so the
    caller owes one CQ after the circuit. With sym=LEFT
    multiplexer = circuit . CQ and the CQ is owed before it.
    """
    axis = Axis(axis)
    sym = Symmetry(sym)
    entangler = entangler or DEFAULT_ENTANGLER[axis]
    if ENTANGLER_AXIS[entangler] == axis:
        raise IncompatibleEntangler(
            f"{entangler.value} conjugation commutes with R{axis.value}",
            axis=axis.value, entangler=entangler.value,
        )
    angles = np.asarray(angles, dtype=float)
    if len(angles) != 2 ** len(controls):
        raise ValueError(f"expected {2 ** len(controls)} angles, got {len(angles)}")
    width = _width(controls, [target])

    if not controls:
        return Circuit(width=width, gates=(Gate.rotation(axis, angles[0], target),))

    if sym == Symmetry.LEFT:
        half = len(angles) // 2
        angles = np.concatenate([angles[:half], -angles[half:]])
    reduced = mottonen_angles(angles)
    picks = entangler_controls(controls)

    gates = []
    for i, theta in enumerate(reduced):
        gates.append(Gate.rotation(axis, theta, target))
        if i < len(reduced) - 1 or sym == Symmetry.NONE:
            gates.append(Gate.controlled(entangler, picks[i], target))
    return Circuit(width=width, gates=tuple(gates))


def balance_diagonal(delta10: np.ndarray, delta11: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """diag(delta10_i, delta11_i) = delta_prime_i . R_Z(theta_z_i)."""
    delta10 = np.asarray(delta10, dtype=complex)
    delta11 = np.asarray(delta11, dtype=complex)
    theta_z = np.angle(delta11 * delta10.conj())
    delta_prime = delta10 * np.exp(0.5j * theta_z)
    return theta_z, delta_prime


def diagonal_rotations(delta: np.ndarray, qubits: Sequence[int]) -> Tuple[List[Gate], float]:
    """Peel the least significant qubit repeatedly; returns MuxRot(Z) gates and the leftover phase."""
    current = np.asarray(delta, dtype=complex)
    gates = []
    for m in range(len(qubits), 0, -1):
        theta_z, current = balance_diagonal(current[0::2], current[1::2])
        gates.append(Gate.mux_rot(Axis.Z, theta_z, qubits[:m - 1], qubits[m - 1]))
    return gates, float(np.angle(current[0]))


def decompose_diagonal(delta: np.ndarray, qubits: Sequence[int], lowered: bool = True,
                       width: Optional[int] = None) -> Circuit:
    """Diagonal unitary as multiplexed R_Z gates and one global phase."""
    delta = np.asarray(delta, dtype=complex)
    if len(delta) != 2 ** len(qubits):
        raise ValueError(f"diagonal of length {len(delta)} does not fit {len(qubits)} qubits")
    width = width if width is not None else _width(qubits)
    rotations, alpha = diagonal_rotations(delta, qubits)

    gates: List[Gate] = []
    for gate in rotations:
        if lowered:
            gates.extend(mottonen(gate.angles, Axis.Z, gate.controls, gate.target).gates)
        elif gate.num_controls == 0:
            gates.append(Gate.rz(gate.angles[0], gate.target))
        else:
            gates.append(gate)
    gates.append(Gate.global_phase(alpha))
    return Circuit(width=width, gates=tuple(gates))


def demux_u2_node(k0: np.ndarray, k1: np.ndarray) -> Tuple[Tuple[float, float], np.ndarray, np.ndarray]:
    """K0 = r^dagger L0 d L1 and K1 = r L0 d^dagger L1 with r = diag(e^{i rho}), d = diag(e^{+-i pi/4})."""
    k0 = np.asarray(k0, dtype=complex)
    k1 = np.asarray(k1, dtype=complex)
    x = k0 @ k1.conj().T
    phi = float(np.angle(np.linalg.det(x)))
    a = x[0, 0] * np.exp(-0.5j * phi)
    arg_a = float(np.angle(a)) if abs(a) >= settings.tolerances.kernel else 0.0

    rho0 = (np.pi - phi) / 4 - arg_a / 2
    rho1 = (3 * np.pi - phi) / 4 + arg_a / 2
    r = np.diag([np.exp(1j * rho0), np.exp(1j * rho1)])
    y = r @ x @ r

    hermitian = (-1j * y + (-1j * y).conj().T) / 2
    _, vectors = np.linalg.eigh(hermitian)
    l0 = vectors[:, ::-1]
    d = np.diag(QUARTER)
    residual = frobenius(l0 @ d @ d @ l0.conj().T, y)
    if residual > settings.tolerances.unitarity:
        raise NumericalBreakdown("r X r does not have eigenvalues +-i", residual=residual)
    l1 = d @ l0.conj().T @ r.conj().T @ k1
    return (rho0, rho1), l0, l1


def _absorb_hadamard(gates: List[Gate]) -> None:
    """H . R_Y(b) R_Z(a) = i R_Y(pi/2 - b) R_Z(a + pi), applied to the trailing flag."""
    ry_gate, rz_gate = gates[-1], gates[-2]
    gates[-2] = Gate.rz(rz_gate.angles[0] + np.pi, rz_gate.target)
    gates[-1] = Gate.ry(np.pi / 2 - ry_gate.angles[0], ry_gate.target)


def _dec_mux(blocks: np.ndarray, controls: Sequence[int], target: int,
             cnot: bool) -> Tuple[List[Gate], np.ndarray]:
    if not controls:
        theta_z, theta_y, omega, phi = euler_zyz(blocks[0])
        return [Gate.rz(theta_z, target), Gate.ry(theta_y, target)], euler_delta(omega, phi)

    half = len(blocks) // 2
    rhos, lefts, rights = [], [], []
    for y in range(half):
        rho, l0, l1 = demux_u2_node(blocks[y], blocks[half + y])
        rhos.append(rho)
        lefts.append(l0)
        rights.append(S_DAG @ l1)
    rhos = np.asarray(rhos)

    phase = 1.0
    right_gates, right_delta = _dec_mux(np.asarray(rights), controls[1:], target, cnot)
    if cnot:
        # CZ = H CNOT H; the trailing H lands on the last flag of the right half
        _absorb_hadamard(right_gates)
        phase = 1.0j

    right_delta = right_delta.reshape(half, 2)
    lefts = [lefts[y] @ np.diag(right_delta[y]) for y in range(half)]
    if cnot:
        lefts = [block @ HADAMARD for block in lefts]
    left_gates, left_delta = _dec_mux(np.asarray(lefts), controls[1:], target, cnot)

    outer_off = np.exp(0.25j * np.pi) * np.exp(-1j * rhos)
    outer_on = np.exp(-0.25j * np.pi) * np.exp(1j * rhos)
    delta = np.concatenate([outer_off.reshape(-1), outer_on.reshape(-1)])
    delta = delta * np.tile(left_delta, 2) * phase

    entangler = GateKind.CNOT if cnot else GateKind.CZ
    gates = right_gates + [Gate.controlled(entangler, controls[0], target)] + left_gates
    return gates, delta


def dec_mux_1QF(blocks: np.ndarray, controls: Sequence[int], target: int,
                entangler: GateKind = GateKind.CZ,
                width: Optional[int] = None) -> Tuple[Circuit, np.ndarray]:
    """Multiplexed U(2) as single-qubit flags and entanglers followed by a diagonal.

    Returns (flags, delta) with diag(delta) . matrix(flags) equal to the
    multiplexer; delta is ordered over (controls..., target).
    """
    blocks = np.asarray(blocks, dtype=complex).reshape(-1, 2, 2)
    if len(blocks) != 2 ** len(controls):
        raise ValueError(f"expected {2 ** len(controls)} blocks, got {len(blocks)}")
    if entangler not in (GateKind.CZ, GateKind.CNOT):
        raise IncompatibleEntangler("dec_mux_1QF emits CZ or CNOT", entangler=str(entangler))
    gates, delta = _dec_mux(blocks, list(controls), target, entangler == GateKind.CNOT)
    width = width if width is not None else _width(controls, [target])
    return Circuit(width=width, gates=tuple(gates)), delta
