"""
Dense complex linear-algebra kernels.

All functions are pure; tolerances come from the shared settings record.
"""
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.exceptions import NonUnitaryInput, NotSymmetric, NumericalBreakdown, UnsupportedRange
from src.core.logger import get_logger
from src.models.factorization import CsdResult

logger = get_logger(__name__)

# Symmetric-pencil mixing angles tried in order by eig_symmetric_unitary_real_basis.
_PENCIL_ANGLES = (0.5772156649, 1.2020569031, 2.6854520010, 0.1234567891, 1.9021130326, 3.0)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def num_qubits(dim: int) -> int:
    """log2 of a power-of-two dimension >= 2."""
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise UnsupportedRange("dimension must be a power of two >= 2", dim=dim)
    return n


def frobenius(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def unitarity_residual(u: np.ndarray) -> float:
    return frobenius(u.conj().T @ u, np.eye(u.shape[0]))


def as_unitary(u, tol: Optional[float] = None) -> np.ndarray:
    """Validate and return u as a complex unitary of power-of-two dimension."""
    tol = settings.tolerances.unitarity if tol is None else tol
    arr = np.asarray(u, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NonUnitaryInput("matrix must be square", shape=arr.shape)
    num_qubits(arr.shape[0])
    residual = unitarity_residual(arr)
    if residual > tol:
        raise NonUnitaryInput("matrix is not unitary", residual=residual, tolerance=tol)
    return arr


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR factorization of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = scipy.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def mux_ry_matrix(theta_y: np.ndarray) -> np.ndarray:
    """[[C, -S], [S, C]] with C = diag(cos(theta/2)), S = diag(sin(theta/2))."""
    c = np.diag(np.cos(np.asarray(theta_y) / 2))
    s = np.diag(np.sin(np.asarray(theta_y) / 2))
    return np.block([[c, -s], [s, c]]).astype(complex)


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    return scipy.linalg.block_diag(*blocks).astype(complex)


def csd(u: np.ndarray) -> CsdResult:
    """Equal-partition cosine-sine decomposition on the first qubit."""
    u = as_unitary(u)
    dim = u.shape[0]
    if dim < 4:
        raise UnsupportedRange("csd needs at least two qubits", dim=dim)
    half = dim // 2
    (u1, u2), theta, (v1h, v2h) = scipy.linalg.cossin(u, p=half, q=half, separate=True)
    theta_y = np.clip(2.0 * np.asarray(theta), 0.0, np.pi)

    result = CsdResult(k00=u1, k01=u2, k10=v1h, k11=v2h, theta_y=theta_y)
    residual = frobenius(block_diag(u1, u2) @ mux_ry_matrix(theta_y) @ block_diag(v1h, v2h), u)
    if residual > settings.tolerances.breakdown:
        raise NumericalBreakdown("csd reassembly failed", residual=residual, dim=dim)
    return result


def _principal_phases(eigenvalues: np.ndarray) -> np.ndarray:
    phases = np.angle(eigenvalues)
    phases[np.abs(eigenvalues + 1.0) < settings.tolerances.degeneracy] = np.pi
    return phases


def eig_unitary(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """x = basis . diag(e^{i phases}) . basis^dagger with a unitary basis.

    The complex Schur form of a normal matrix is diagonal and its Schur vectors
    are orthonormal even inside eigenvalue clusters.
    """
    t, basis = scipy.linalg.schur(np.asarray(x, dtype=complex), output="complex")
    phases = _principal_phases(np.diag(t).copy())
    residual = frobenius(basis @ np.diag(np.exp(1j * phases)) @ basis.conj().T, x)
    if residual > settings.tolerances.breakdown:
        raise NumericalBreakdown("eigendecomposition of unitary failed", residual=residual)
    return basis, phases


def eig_symmetric_unitary_real_basis(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """s = O . diag(e^{i phases}) . O^T with O real orthogonal.

    Real and imaginary parts of a symmetric unitary commute, so a generic real
    combination of them shares the eigenbasis.
    """
    s = np.asarray(s, dtype=complex)
    asymmetry = frobenius(s, s.T)
    if asymmetry > settings.tolerances.unitarity:
        raise NotSymmetric("matrix is not symmetric", residual=asymmetry)
    real, imag = s.real, s.imag
    real, imag = (real + real.T) / 2, (imag + imag.T) / 2

    best = None
    for t in _PENCIL_ANGLES:
        _, basis = np.linalg.eigh(np.cos(t) * real + np.sin(t) * imag)
        phases = np.angle(np.diag(basis.T @ s @ basis))
        residual = frobenius(basis @ np.diag(np.exp(1j * phases)) @ basis.T, s)
        if best is None or residual < best[0]:
            best = (residual, basis, phases)
        if residual <= settings.tolerances.kernel * 100:
            break

    residual, basis, phases = best
    if residual > settings.tolerances.reconstruction:
        raise NumericalBreakdown("real eigenbasis of symmetric unitary not found", residual=residual)
    return basis, phases


def euler_zyz(u: np.ndarray) -> Tuple[float, float, float, float]:
    """u = diag(e^{-i(phi+omega/2)}, e^{-i(phi-omega/2)}) . R_Y(theta_y) . R_Z(theta_z).

    Returns (theta_z, theta_y, omega, phi) with theta_y in [0, pi]. Under gimbal
    lock theta_z is set to 0 and the azimuth goes into omega.
    """
    u = np.asarray(u, dtype=complex)
    phi = -0.5 * float(np.angle(np.linalg.det(u)))
    v = np.exp(1j * phi) * u
    a, b = v[0, 0], v[1, 0]
    theta_y = 2.0 * float(np.arctan2(abs(b), abs(a)))
    eps = settings.tolerances.kernel
    if abs(b) < eps:
        return 0.0, theta_y, -2.0 * float(np.angle(a)), phi
    if abs(a) < eps:
        return 0.0, theta_y, 2.0 * float(np.angle(b)), phi
    omega = float(np.angle(b) - np.angle(a))
    theta_z = float(-np.angle(a) - np.angle(b))
    return theta_z, theta_y, omega, phi


def euler_delta(omega: float, phi: float) -> np.ndarray:
    return np.array([np.exp(-1j * (phi + omega / 2)), np.exp(-1j * (phi - omega / 2))])


def flag_matrix(theta_z: float, theta_y: float) -> np.ndarray:
    return ry(theta_y) @ rz(theta_z)
