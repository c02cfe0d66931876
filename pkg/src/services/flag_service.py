"""
Flag decomposition V = diag(delta) . F.

The flag F of an n-qubit unitary carries 4^n - 2^n rotation angles; the
remaining 2^n phases sit in the trailing diagonal, which callers either merge
into neighbouring operators or lower with decompose_diagonal.
"""
from typing import List, Sequence, Tuple

import numpy as np

from src.core.config import settings
from src.core.exceptions import NumericalBreakdown, UnsupportedRange
from src.core.logger import get_logger
from src.models.circuit import Circuit, Gate, GateKind
from src.models.factorization import CsdResult, FlagFactorization, TwoQubitKak
from src.services.multiplexer_service import balance_diagonal, dec_mux_1QF, decompose_diagonal
from src.utils.concurrency import parallel_map
from src.utils.linalg import as_unitary, csd, euler_delta, euler_zyz, flag_matrix, frobenius, num_qubits, rx, rz
from src.utils.two_qubit import (
    CNOT,
    CZ,
    conjugate_pair_angles,
    local_equivalence,
    special,
    trace_imbalance,
)

logger = get_logger(__name__)


def _width(*groups: Sequence[int]) -> int:
    return max((q for group in groups for q in group), default=-1) + 1


def flag_gates(theta_z: np.ndarray, theta_y: np.ndarray, controls: Sequence[int], target: int) -> List[Gate]:
    if not controls:
        return [Gate.rz(theta_z[0], target), Gate.ry(theta_y[0], target)]
    return [Gate.mux_flag(theta_z, theta_y, controls, target)]


def mux_u2_to_flags(blocks: np.ndarray, controls: Sequence[int], target: int,
                    kappa: bool) -> Tuple[List[Gate], np.ndarray]:
    """Multiplexed U(2) as flag gates plus a (2^k, 2) diagonal executed after them."""
    if kappa:
        flags, delta = dec_mux_1QF(blocks, controls, target)
        return list(flags.gates), delta.reshape(-1, 2)
    angles = np.array([euler_zyz(block) for block in blocks])
    delta = np.array([euler_delta(omega, phi) for _, _, omega, phi in angles])
    return flag_gates(angles[:, 0], angles[:, 1], controls, target), delta


def one_qubit_flag(u: np.ndarray, qubit: int) -> FlagFactorization:
    u = as_unitary(u)
    theta_z, theta_y, omega, phi = euler_zyz(u)
    flag = Circuit(width=qubit + 1, gates=(Gate.rz(theta_z, qubit), Gate.ry(theta_y, qubit)))
    return FlagFactorization(flag=flag, delta=euler_delta(omega, phi))


def rzz(psi: float) -> np.ndarray:
    return np.diag(np.exp(0.5j * psi * np.array([-1, 1, 1, -1])))


def kak_matrix(kak: TwoQubitKak) -> np.ndarray:
    core = CNOT @ np.kron(rx(kak.theta), rz(kak.phi)) @ CNOT
    return (np.exp(1j * kak.alpha) * CNOT @ rzz(-kak.psi) @ np.kron(kak.a, kak.b)
            @ core @ np.kron(kak.c, kak.d))


def asymmetric_two_qubit_decomp(v: np.ndarray) -> TwoQubitKak:
    """V = e^{i alpha} CNOT R_ZZ(-psi) (a x b) exp(-i(theta XX + phi ZZ)/2) (c x d)."""
    v = as_unitary(v)
    vc, alpha = special(CNOT @ v)
    imbalance, balance = trace_imbalance(vc)
    psi = -float(np.arctan2(imbalance, balance))
    balanced = rzz(psi) @ vc

    mu, nu = conjugate_pair_angles(balanced)
    theta, phi = (mu + nu) / 2, (mu - nu) / 2
    core = CNOT @ np.kron(rx(theta), rz(phi)) @ CNOT
    g, a, b, c, d = local_equivalence(balanced, core)

    kak = TwoQubitKak(a=a, b=b, c=c, d=d, alpha=alpha + float(np.angle(g)),
                      psi=psi, theta=theta, phi=phi)
    residual = frobenius(kak_matrix(kak), v)
    if residual > settings.tolerances.unitarity:
        raise NumericalBreakdown("asymmetric two-qubit decomposition failed", residual=residual)
    return kak


def two_qubit_flag_slots(v: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    """Six U(2) slots and a 4-phase diagonal with v = D . (a1 x a0) CZ (RX(s) x RX(t)) CZ (b1 x b0).

    Slots come back in execution order [b1, b0, RX(s), RX(t), a1, a0]; even
    slots act on the first qubit.
    """
    unit, quarter = special(v)
    imbalance, balance = trace_imbalance(unit)
    beta = float(np.arctan2(imbalance, balance))
    fix = np.array([1.0, 1.0, np.exp(-1j * beta), np.exp(1j * beta)])
    balanced = fix[:, None] * unit

    mu, nu = conjugate_pair_angles(balanced)
    s, t = (mu + nu) / 2, (mu - nu) / 2
    core = CZ @ np.kron(rx(s), rx(t)) @ CZ
    g, a1, a0, b1, b0 = local_equivalence(balanced, core)

    diagonal = np.exp(1j * quarter) * g * fix.conj()
    return [b1, b0, rx(s), rx(t), a1, a0], diagonal


def _two_qubit_base(blocks: np.ndarray, mux: Sequence[int], targets: Sequence[int],
                    kappa: bool) -> Tuple[List[Gate], np.ndarray]:
    size = len(blocks)
    solved = parallel_map(two_qubit_flag_slots, blocks)
    slots = [np.stack([entry[0][i] for entry in solved]) for i in range(6)]
    final = np.stack([entry[1] for entry in solved]).reshape(size, 2, 2)

    pending = [np.ones((size, 2), dtype=complex), np.ones((size, 2), dtype=complex)]
    gates: List[Gate] = []
    for stage in range(3):
        if stage:
            gates.append(Gate.controlled(GateKind.CZ, targets[0], targets[1]))
        for wire in range(2):
            blocks_in = slots[2 * stage + wire] * pending[wire][:, None, :]
            wire_gates, pending[wire] = mux_u2_to_flags(blocks_in, mux, targets[wire], kappa)
            gates.extend(wire_gates)

    delta = final * pending[0][:, :, None] * pending[1][:, None, :]
    return gates, delta.reshape(-1)


def two_qubit_flag(v: np.ndarray, qubits: Sequence[int]) -> FlagFactorization:
    """12 rotations in six single-qubit flags around two CZ gates."""
    v = as_unitary(v)
    if v.shape != (4, 4):
        raise UnsupportedRange("two_qubit_flag needs a 4x4 unitary", dim=v.shape[0])
    gates, delta = _two_qubit_base(v[None], [], list(qubits), kappa=True)
    return FlagFactorization(flag=Circuit(width=_width(qubits), gates=tuple(gates)), delta=delta)


def _core(blocks: np.ndarray, mux: List[int], targets: List[int], nb: int,
          kappa: bool) -> Tuple[List[Gate], np.ndarray]:
    m = len(targets)
    if m == 1:
        gates, delta = mux_u2_to_flags(blocks, mux, targets[0], kappa)
        return gates, delta.reshape(-1)
    if m == 2 and nb == 2:
        return _two_qubit_base(blocks, mux, targets, kappa)

    size = len(blocks)
    half = 2 ** (m - 1)
    head, rest = targets[0], targets[1:]
    parts: List[CsdResult] = parallel_map(csd, blocks)

    rights = np.stack([k for part in parts for k in (part.k10, part.k11)])
    right_gates, right_delta = _core(rights, mux + [head], rest, nb, kappa)

    right_delta = right_delta.reshape(size, 2, half)
    theta_z, delta_prime = balance_diagonal(right_delta[:, 0, :], right_delta[:, 1, :])
    theta_y = np.stack([part.theta_y for part in parts])
    if kappa:
        flag_blocks = np.stack([flag_matrix(z, y) for z, y in zip(theta_z.reshape(-1), theta_y.reshape(-1))])
        flags, flag_delta = dec_mux_1QF(flag_blocks, mux + rest, head)
        middle_gates = list(flags.gates)
        merged = delta_prime[:, None, :] * flag_delta.reshape(size, half, 2).transpose(0, 2, 1)
    else:
        middle_gates = flag_gates(theta_z.reshape(-1), theta_y.reshape(-1), mux + rest, head)
        merged = np.repeat(delta_prime[:, None, :], 2, axis=1)

    lefts = np.stack([
        k * merged[j, bit][None, :]
        for j, part in enumerate(parts)
        for bit, k in enumerate((part.k00, part.k01))
    ])
    left_gates, left_delta = _core(lefts, mux + [head], rest, nb, kappa)
    return right_gates + middle_gates + left_gates, left_delta


def core_decomp(blocks: np.ndarray, mux_qubits: Sequence[int], target_qubits: Sequence[int],
                nb: int = 2, kappa: bool = False) -> FlagFactorization:
    """Flag decomposition of a multiplexer over mux_qubits with blocks on target_qubits.

    delta is ordered over (mux_qubits..., target_qubits...). With kappa the
    flag part is lowered to {Clifford + Rot}; otherwise it stays as
    multiplexed flag gates.
    """
    blocks = np.asarray(blocks, dtype=complex)
    m = len(target_qubits)
    if nb not in (1, 2) or m < nb:
        raise UnsupportedRange("core_decomp needs nb in {1, 2} and at least nb targets", nb=nb, targets=m)
    if blocks.shape != (2 ** len(mux_qubits), 2 ** m, 2 ** m):
        raise ValueError(f"blocks of shape {blocks.shape} do not fit the qubit layout")
    gates, delta = _core(blocks, list(mux_qubits), list(target_qubits), nb, kappa)
    flag = Circuit(width=_width(mux_qubits, target_qubits), gates=tuple(gates))
    logger.debug("core_decomp finished", mux=len(mux_qubits), targets=m, nb=nb, kappa=kappa,
                 gates=len(gates))
    return FlagFactorization(flag=flag, delta=delta)


def flag_synthesize(u: np.ndarray, nb: int = 2, lowered: bool = True) -> Circuit:
    """Full unitary as a flag circuit followed by its diagonal."""
    u = as_unitary(u)
    n = num_qubits(u.shape[0])
    nb = min(nb, n)
    qubits = list(range(n))
    factor = core_decomp(u[None], [], qubits, nb=nb, kappa=lowered)
    diagonal = decompose_diagonal(factor.delta, qubits, lowered=lowered, width=n)
    circuit = factor.flag.widened(n).then(diagonal)
    logger.debug("flag synthesis finished", n=n, nb=nb, lowered=lowered, gates=len(circuit))
    return circuit
