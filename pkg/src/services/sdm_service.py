"""
Selective de-multiplexing synthesis.

A unitary is split by a cosine-sine decomposition on its first qubit and both
block-diagonal factors are fully de-multiplexed. The four resulting
(n-1)-qubit unitaries are handled asymmetrically: three of them only need to
be synthesized up to a trailing diagonal, which is merged into the next one,
and only the last is synthesized exactly by recursion.
"""
from typing import List, Sequence, Tuple

import numpy as np

from src.core.config import settings
from src.core.exceptions import NumericalBreakdown, UnsupportedRange
from src.core.logger import get_logger
from src.models.circuit import Axis, Circuit, Gate, GateKind
from src.models.factorization import FlagFactorization
from src.services.flag_service import asymmetric_two_qubit_decomp, core_decomp, one_qubit_flag, two_qubit_flag
from src.services.multiplexer_service import Symmetry, mottonen
from src.utils.linalg import as_unitary, csd, eig_unitary, euler_zyz, frobenius

logger = get_logger(__name__)

PAULI_Z = np.diag([1.0, -1.0])


def _width(qubits: Sequence[int]) -> int:
    return max(qubits) + 1


def de_mux(k0: np.ndarray, k1: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """k0 = m0 D m1 and k1 = m0 D^dagger m1 with D = diag(e^{-i theta_z / 2})."""
    k0 = np.asarray(k0, dtype=complex)
    k1 = np.asarray(k1, dtype=complex)
    basis, phases = eig_unitary(k0 @ k1.conj().T)
    root = np.exp(0.5j * phases)
    m1 = root[:, None] * (basis.conj().T @ k1)

    residual = frobenius(basis @ (root[:, None] * m1), k0)
    if residual > settings.tolerances.breakdown:
        raise NumericalBreakdown("de-multiplexing failed", residual=residual)
    return basis, -phases, m1


def _first_qubit_z(dim: int) -> np.ndarray:
    return np.kron(PAULI_Z, np.eye(dim // 2))


def re_de_mux(m_left: np.ndarray, m_right: np.ndarray, theta_y: np.ndarray,
              owed_left: bool = True, owed_right: bool = True) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Absorb CY(q1, q0) gates around m_left . MuxRY(theta_y) . m_right.

    The fragment CY^{owed_left} . m_left . MuxRY(theta_y) . m_right . CY^{owed_right}
    equals m_left' . MuxRY(theta_y') . m_right'; m_left and m_right act on the
    qubits after q0 and q1 is the first of them.
    """
    m_left = np.asarray(m_left, dtype=complex)
    m_right = np.asarray(m_right, dtype=complex)
    dim = m_left.shape[0]
    # in the frame rotated by RX(pi/2) on q0, R_Y becomes R_Z and CY becomes CZ
    half = np.exp(-0.5j * np.asarray(theta_y))
    z1 = _first_qubit_z(dim)

    upper = m_left @ (half[:, None] * m_right)
    lower = m_left @ (half.conj()[:, None] * m_right)
    if owed_left:
        lower = z1 @ lower
    if owed_right:
        lower = lower @ z1
    left, theta, right = de_mux(upper, lower)
    return left, theta, right


def _euler_gates(u: np.ndarray, qubit: int) -> Tuple[List[Gate], float]:
    """u = e^{-i phi} R_Z(omega) R_Y(theta_y) R_Z(theta_z) as three rotations; returns phase -phi."""
    theta_z, theta_y, omega, phi = euler_zyz(u)
    return [Gate.rz(theta_z, qubit), Gate.ry(theta_y, qubit), Gate.rz(omega, qubit)], -phi


def one_qubit_unitary(u: np.ndarray, qubit: int) -> Circuit:
    gates, phase = _euler_gates(as_unitary(u), qubit)
    return Circuit(width=qubit + 1, gates=tuple(gates + [Gate.global_phase(phase)]))


def two_qubit_unitary(v: np.ndarray, qubits: Sequence[int] = (0, 1)) -> Circuit:
    """Three-CNOT circuit with 15 rotations and one global phase.

    Read off the asymmetric decomposition: CNOT . R_ZZ(-psi) equals
    R_Z(-psi) on the second qubit after a CNOT, so
    v = e^{i alpha} RZ_1(-psi) CNOT (a x b) CNOT (RX(theta) x RZ(phi)) CNOT (c x d).
    """
    v = as_unitary(v)
    q0, q1 = qubits
    kak = asymmetric_two_qubit_decomp(v)
    phase = kak.alpha

    gates: List[Gate] = []
    for u, qubit in ((kak.c, q0), (kak.d, q1)):
        slot, slot_phase = _euler_gates(u, qubit)
        gates.extend(slot)
        phase += slot_phase
    gates.extend([
        Gate.controlled(GateKind.CNOT, q0, q1),
        Gate.rx(kak.theta, q0),
        Gate.rz(kak.phi, q1),
        Gate.controlled(GateKind.CNOT, q0, q1),
    ])
    for u, qubit in ((kak.a, q0), (kak.b, q1)):
        slot, slot_phase = _euler_gates(u, qubit)
        gates.extend(slot)
        phase += slot_phase
    gates.extend([Gate.controlled(GateKind.CNOT, q0, q1), Gate.rz(-kak.psi, q1), Gate.global_phase(phase)])
    return Circuit(width=_width(qubits), gates=tuple(gates))


def _split(v: np.ndarray):
    parts = csd(v)
    m00, theta0, m01 = de_mux(parts.k00, parts.k01)
    m10, theta1, m11 = de_mux(parts.k10, parts.k11)
    return parts.theta_y, (m00, theta0, m01), (m10, theta1, m11)


def rec_flag_dec(v: np.ndarray, qubits: Sequence[int]) -> FlagFactorization:
    """Flag decomposition with one selective de-multiplexing step per level."""
    v = as_unitary(v)
    qubits = list(qubits)
    n = len(qubits)
    if v.shape[0] != 2 ** n:
        raise UnsupportedRange("matrix does not match the qubit list", dim=v.shape[0], qubits=n)
    if n == 1:
        return one_qubit_flag(v, qubits[0])
    if n == 2:
        return two_qubit_flag(v, qubits)

    head, rest = qubits[0], qubits[1:]
    width = _width(qubits)
    theta_y, (m00, theta0, m01), (m10, theta1, m11) = _split(v)

    rz_right = mottonen(theta1, Axis.Z, rest, head, sym=Symmetry.RIGHT, entangler=GateKind.CY)
    m01, theta_y, m10 = re_de_mux(m01, m10, theta_y, owed_left=False, owed_right=True)
    ry_right = mottonen(theta_y, Axis.Y, rest, head, sym=Symmetry.RIGHT, entangler=GateKind.CZ)

    f11 = rec_flag_dec(m11, rest)
    f10 = rec_flag_dec(m10 * f11.delta[None, :], rest)

    half = np.exp(-0.5j * theta0)
    upper = m00 @ (half[:, None] * m01)
    lower = m00 @ (half.conj()[:, None] * m01) @ _first_qubit_z(len(half))
    blocks = np.stack([upper, lower]) * f10.delta[None, None, :]
    head_flag = core_decomp(blocks, [head], rest, nb=2, kappa=True)

    flag = Circuit.of(width, f11.flag.gates, rz_right.gates, f10.flag.gates, ry_right.gates,
                      head_flag.flag.gates)
    return FlagFactorization(flag=flag, delta=head_flag.delta)


def sdm(v: np.ndarray, qubits: Sequence[int] = None) -> Circuit:
    """Exact {Clifford + Rot} synthesis by selective de-multiplexing."""
    v = as_unitary(v)
    n = v.shape[0].bit_length() - 1
    qubits = list(range(n)) if qubits is None else list(qubits)
    if len(qubits) != n:
        raise UnsupportedRange("matrix does not match the qubit list", dim=v.shape[0], qubits=len(qubits))
    if n == 1:
        return one_qubit_unitary(v, qubits[0])
    if n == 2:
        return two_qubit_unitary(v, qubits)

    head, rest = qubits[0], qubits[1:]
    width = _width(qubits)
    theta_y, (m00, theta0, m01), (m10, theta1, m11) = _split(v)

    rz_right = mottonen(theta1, Axis.Z, rest, head, sym=Symmetry.RIGHT, entangler=GateKind.CY)
    rz_left = mottonen(theta0, Axis.Z, rest, head, sym=Symmetry.LEFT, entangler=GateKind.CY)
    m01, theta_y, m10 = re_de_mux(m01, m10, theta_y, owed_left=True, owed_right=True)
    ry_right = mottonen(theta_y, Axis.Y, rest, head, sym=Symmetry.RIGHT, entangler=GateKind.CZ)
    # f01 is not multiplexed on the head qubit, so the CZ owed by ry_right stays a gate
    owed_cz = Gate.controlled(GateKind.CZ, rest[0], head)

    f11 = rec_flag_dec(m11, rest)
    f10 = rec_flag_dec(m10 * f11.delta[None, :], rest)
    f01 = rec_flag_dec(m01 * f10.delta[None, :], rest)
    tail = sdm(m00 * f01.delta[None, :], rest)

    circuit = Circuit.of(width, f11.flag.gates, rz_right.gates, f10.flag.gates, ry_right.gates, [owed_cz],
                         f01.flag.gates, rz_left.gates, tail.gates)
    logger.debug("sdm level finished", qubits=n, gates=len(circuit))
    return circuit
