"""
MPS preparation circuits.

Layout on L qubits: the bond register lives on qubits 0..n-1. Bulk site j
(1-based, j > n) owns qubit j-1, starts in |0> and is prepared by a site
unitary acting on (qubit j-1, bond register). Sites run from L down to n+1
and a boundary unitary on the bond register finishes sites 1..n.
"""
from typing import List, Optional

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.exceptions import ChiTooSmall, NotIsometry, SizeExceeded, UnsupportedRange
from src.core.logger import get_logger
from src.models.circuit import Axis, Circuit, Gate, GateKind
from src.models.mps import MPS, CanonicalForm, IsometryStack
from src.services.circuit_service import to_matrix
from src.services.flag_service import core_decomp, flag_synthesize
from src.services.multiplexer_service import Symmetry, balance_diagonal, mottonen
from src.services.sdm_service import de_mux, re_de_mux, rec_flag_dec
from src.services.synthesis_service import Method, synthesize_unitary
from src.utils.concurrency import parallel_map
from src.utils.linalg import csd

logger = get_logger(__name__)


def left_canonicalize(mps: MPS) -> MPS:
    """QR sweep; the returned state is normalized and R diagonals are made non-negative."""
    tensors = [t.copy() for t in mps.tensors]
    for site in range(mps.length):
        left, _, right = tensors[site].shape
        q, r = scipy.linalg.qr(tensors[site].reshape(2 * left, right), mode="economic")
        diag = np.diag(r)
        signs = np.ones_like(diag)
        nonzero = np.abs(diag) > 0
        signs[nonzero] = diag[nonzero] / np.abs(diag[nonzero])
        q = q * signs[None, :]
        r = signs.conj()[:, None] * r
        tensors[site] = q.reshape(left, 2, q.shape[1])
        if site + 1 < mps.length:
            tensors[site + 1] = np.einsum("ab,bsc->asc", r, tensors[site + 1])
    return MPS(tensors=tensors, canonical_form=CanonicalForm.LEFT)


def pad_bond(mps: MPS, chi: int) -> MPS:
    """Zero-pad every internal bond to chi."""
    if max(mps.bonds, default=1) > chi:
        raise ChiTooSmall("bond dimension exceeds chi", max_bond=mps.max_bond, chi=chi)
    last = mps.length - 1
    tensors = []
    for site, tensor in enumerate(mps.tensors):
        left = 1 if site == 0 else chi
        right = 1 if site == last else chi
        padded = np.zeros((left, 2, right), dtype=complex)
        padded[:tensor.shape[0], :, :tensor.shape[2]] = tensor
        tensors.append(padded)
    return MPS(tensors=tensors, canonical_form=mps.canonical_form)


def _complete_columns(matrix: np.ndarray, tol: float) -> np.ndarray:
    """Replace null columns by an orthonormal completion of the others.

    Candidates are identity columns, picked by largest residual norm after
    modified Gram-Schmidt against the accepted columns (ties by index).
    """
    matrix = np.array(matrix, dtype=complex)
    dim = matrix.shape[0]
    norms = np.linalg.norm(matrix, axis=0)
    kept = norms > tol
    columns = matrix[:, kept]
    gram_residual = float(np.linalg.norm(columns.conj().T @ columns - np.eye(columns.shape[1])))
    if gram_residual > settings.tolerances.unitarity:
        raise NotIsometry("columns are not orthonormal", residual=gram_residual)

    basis = [columns[:, i] for i in range(columns.shape[1])]
    candidates = list(np.eye(dim, dtype=complex))
    for position in np.flatnonzero(~kept):
        best, best_norm = None, -1.0
        for candidate in candidates:
            v = candidate.copy()
            for b in basis:
                v = v - (b.conj() @ v) * b
            norm = float(np.linalg.norm(v))
            if norm > best_norm + settings.tolerances.kernel:
                best, best_norm = v, norm
        vector = best / best_norm
        basis.append(vector)
        matrix[:, position] = vector
    return matrix


def unitary_complete(iso: np.ndarray) -> np.ndarray:
    """Square unitary whose leading columns are iso."""
    iso = np.asarray(iso, dtype=complex)
    rows, cols = iso.shape
    if cols > rows:
        raise NotIsometry("isometry has more columns than rows", shape=iso.shape)
    norms = np.linalg.norm(iso, axis=0)
    if np.any(np.abs(norms - 1.0) > settings.tolerances.unitarity):
        raise NotIsometry("isometry columns must have unit norm", shape=iso.shape)
    square = np.zeros((rows, rows), dtype=complex)
    square[:, :cols] = iso
    return _complete_columns(square, tol=0.5)


def _bond_qubits(mps: MPS, chi: Optional[int]) -> int:
    if chi is None:
        chi = max(2, mps.max_bond)
        chi = 1 << int(np.ceil(np.log2(chi)))
    n = int(chi).bit_length() - 1
    if chi < 2 or 2 ** n != chi:
        raise UnsupportedRange("chi must be a power of two >= 2", chi=chi)
    if n > mps.length:
        raise UnsupportedRange("bond register is wider than the chain", chi=chi, length=mps.length)
    return n


def prepare(mps: MPS, chi: Optional[int] = None) -> MPS:
    """Left-canonical form padded to a power-of-two bond dimension."""
    if mps.length < 2:
        raise UnsupportedRange("MPS preparation needs at least two sites", length=mps.length)
    canonical = left_canonicalize(mps)
    n = _bond_qubits(canonical, chi)
    return pad_bond(canonical, 2 ** n)


def isometry_stack(mps: MPS) -> IsometryStack:
    """Complete every site isometry of a padded left-canonical MPS into a unitary."""
    chi = mps.tensors[1].shape[0]
    n = int(chi).bit_length() - 1
    tol = settings.tolerances.kernel

    def site_unitary(tensor: np.ndarray) -> np.ndarray:
        left, _, right = tensor.shape
        square = np.zeros((2 * chi, 2 * chi), dtype=complex)
        square[:, :right] = tensor.transpose(1, 0, 2).reshape(2 * left, right)
        return _complete_columns(square, tol)

    bulk = parallel_map(site_unitary, mps.tensors[n:])

    head = mps.tensors[0][0]
    for tensor in mps.tensors[1:n]:
        head = np.einsum("pa,asb->psb", head, tensor).reshape(-1, tensor.shape[2])
    boundary = np.zeros((chi, chi), dtype=complex)
    boundary[:, :head.shape[1]] = head
    boundary = _complete_columns(boundary, tol)
    return IsometryStack(bond_qubits=n, length=mps.length, bulk=bulk, boundary=boundary)


def mps_to_circuit_clifford_rot(mps: MPS, chi: Optional[int] = None) -> Circuit:
    """Lowered preparation circuit with the gauge unitary of each site merged into the next.

    Every site unitary acts on its own qubit plus the same bond register,
    qubits 0..n-1; the register does not slide along the chain. A chain of
    length L therefore needs L qubits in total.
    """
    padded = prepare(mps, chi)
    stack = isometry_stack(padded)
    n, length = stack.bond_qubits, padded.length
    bond = list(range(n))
    eye2 = np.eye(2)

    gauge = np.eye(2 ** n, dtype=complex)
    gates: List[Gate] = []
    for site in range(length, n, -1):
        top = site - 1
        unitary = stack.bulk[site - n - 1] @ np.kron(eye2, gauge)
        parts = csd(unitary)
        m00, theta0, m01 = de_mux(parts.k00, parts.k01)
        m01, theta_y, entry = re_de_mux(m01, parts.k10, parts.theta_y, owed_left=True, owed_right=False)

        entry_flag = rec_flag_dec(entry, bond)
        ry = mottonen(theta_y, Axis.Y, bond, top, sym=Symmetry.LEFT, entangler=GateKind.CZ)
        middle_flag = rec_flag_dec(m01 * entry_flag.delta[None, :], bond)
        rz = mottonen(theta0, Axis.Z, bond, top, sym=Symmetry.LEFT, entangler=GateKind.CY)
        gauge = m00 * middle_flag.delta[None, :]

        gates.extend(entry_flag.flag.gates)
        gates.extend(ry.gates)
        gates.extend(middle_flag.flag.gates)
        gates.extend(rz.gates)

    boundary = synthesize_unitary(stack.boundary @ gauge, Method.SDM, qubits=bond)
    circuit = Circuit.of(length, gates, boundary.gates)
    logger.debug("clifford+rot MPS circuit built", length=length, bond_qubits=n, gates=len(circuit))
    return circuit


def mps_skeleton_phase_gradient(mps: MPS, chi: Optional[int] = None) -> Circuit:
    """Hierarchical preparation skeleton: per site one MuxRot(Y), one multiplexed flag and one MuxRot(Z).

    The CSD of every site and the left merge of its entry flag run
    independently; the diagonal then travels along the chain in execution
    order and ends in the boundary unitary.
    """
    padded = prepare(mps, chi)
    stack = isometry_stack(padded)
    n, length = stack.bond_qubits, padded.length
    bond = list(range(n))
    sites = list(range(length, n, -1))

    def split(unitary: np.ndarray):
        parts = csd(unitary)
        entry = core_decomp(parts.k10[None], [], bond, nb=1, kappa=False)
        exits = np.stack([parts.k00, parts.k01]) * entry.delta[None, None, :]
        return parts.theta_y, entry.flag, exits

    split_sites = parallel_map(split, [stack.bulk[site - n - 1] for site in sites])

    # entry flag of each site merges into the exit multiplexer of the site run before it
    exits = [s[2].copy() for s in split_sites]
    for position in range(1, len(sites)):
        entry = to_matrix(split_sites[position][1].widened(n))
        exits[position - 1] = np.einsum("ab,kbc->kac", entry, exits[position - 1])

    gates: List[Gate] = list(split_sites[0][1].gates) if sites else []
    carried = np.ones(2 ** n, dtype=complex)
    for position, site in enumerate(sites):
        top = site - 1
        theta_y = split_sites[position][0]
        blocks = exits[position] * carried[None, None, :]
        exit_flag = core_decomp(blocks, [top], bond, nb=1, kappa=False)
        delta = exit_flag.delta.reshape(2, -1)
        theta_z, carried = balance_diagonal(delta[0], delta[1])

        gates.append(Gate.mux_rot(Axis.Y, theta_y, bond, top))
        gates.extend(exit_flag.flag.gates)
        gates.append(Gate.mux_rot(Axis.Z, theta_z, bond, top))

    boundary = flag_synthesize(stack.boundary * carried[None, :], nb=1, lowered=False)
    circuit = Circuit.of(length, gates, boundary.gates)
    logger.debug("phase-gradient MPS skeleton built", length=length, bond_qubits=n, gates=len(circuit))
    return circuit


def mps_statevector(mps: MPS) -> np.ndarray:
    """Dense contraction A^{s1} ... A^{sL}; qubit 0 is the most significant bit."""
    if mps.length > settings.max_mps_length or mps.max_bond > settings.max_mps_chi:
        raise SizeExceeded("MPS too large for dense contraction", length=mps.length, chi=mps.max_bond,
                           max_length=settings.max_mps_length, max_chi=settings.max_mps_chi)
    vector = mps.tensors[0][0]
    for tensor in mps.tensors[1:]:
        vector = np.einsum("pa,asb->psb", vector, tensor).reshape(-1, tensor.shape[2])
    return vector[:, 0]


def random_mps(length: int, chi: int, rng: np.random.Generator) -> MPS:
    """Random left-canonical MPS with bonds min(chi, 2^j, 2^(L-j))."""
    if length < 1 or chi < 1:
        raise UnsupportedRange("random_mps needs length >= 1 and chi >= 1", length=length, chi=chi)
    bonds = [1] + [min(chi, 2 ** j, 2 ** (length - j)) for j in range(1, length)] + [1]
    tensors = []
    for site in range(length):
        shape = (bonds[site], 2, bonds[site + 1])
        tensors.append(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return left_canonicalize(MPS(tensors=tensors))


def fidelity(target: np.ndarray, prepared: np.ndarray) -> float:
    return float(abs(np.vdot(target, prepared)))
