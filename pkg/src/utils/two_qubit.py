"""
Two-qubit invariants and local-equivalence solving in the magic basis.
"""
from itertools import combinations
from typing import Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.core.config import settings
from src.core.exceptions import NumericalBreakdown
from src.utils.linalg import eig_symmetric_unitary_real_basis, frobenius

MAGIC = np.array([[1, 0, 0, 1j],
                  [0, 1j, 1, 0],
                  [0, 1j, -1, 0],
                  [1, 0, 0, -1j]]) * np.sqrt(0.5)
MAGIC_CONJ_T = np.conj(MAGIC.T)

# Y (x) Y
SIGMA_YY = np.array([[0, 0, 0, -1],
                     [0, 0, 1, 0],
                     [0, 1, 0, 0],
                     [-1, 0, 0, 0]], dtype=complex)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def special(u: np.ndarray) -> Tuple[np.ndarray, float]:
    """(u / det(u)^{1/4}, arg(det u) / 4)."""
    quarter = float(np.angle(np.linalg.det(u))) / 4
    return u * np.exp(-1j * quarter), quarter


def gamma(u: np.ndarray) -> np.ndarray:
    return u @ SIGMA_YY @ u.T @ SIGMA_YY


def trace_imbalance(u: np.ndarray) -> Tuple[float, float]:
    """(Im m2 - Im m1, Re m1 + Re m2) for m1, m2 the anti-diagonal of u sigma u^T.

    A diagonal correction whose angle is atan2 of this pair makes tr gamma real.
    """
    m = u @ SIGMA_YY @ u.T
    m1, m2 = m[0, 3], m[1, 2]
    return float(m2.imag - m1.imag), float(m1.real + m2.real)


def conjugate_pair_angles(u: np.ndarray) -> Tuple[float, float]:
    """(mu, nu) with spectrum of gamma(u) = {e^{+-i mu}, e^{+-i nu}}; tr gamma(u) must be real."""
    values = np.linalg.eigvals(gamma(u))
    best = None
    for first in combinations(range(4), 2):
        if 0 not in first:
            continue
        second = tuple(i for i in range(4) if i not in first)
        cost = (abs(values[first[0]] - np.conj(values[first[1]]))
                + abs(values[second[0]] - np.conj(values[second[1]])))
        if best is None or cost < best[0]:
            best = (cost, first, second)
    _, first, second = best
    return abs(float(np.angle(values[first[0]]))), abs(float(np.angle(values[second[0]])))


def kron_factor(matrix: np.ndarray) -> Tuple[complex, np.ndarray, np.ndarray]:
    """Split matrix = g * kron(f1, f2) with unit-determinant f1, f2."""
    # Use the entry with the largest magnitude as a reference point.
    a, b = max(((i, j) for i in range(4) for j in range(4)), key=lambda t: abs(matrix[t]))

    f1 = np.zeros((2, 2), dtype=np.complex128)
    f2 = np.zeros((2, 2), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            f1[(a >> 1) ^ i, (b >> 1) ^ j] = matrix[a ^ (i << 1), b ^ (j << 1)]
            f2[(a & 1) ^ i, (b & 1) ^ j] = matrix[a ^ i, b ^ j]

    f1 /= (np.sqrt(np.linalg.det(f1)) or 1)
    f2 /= (np.sqrt(np.linalg.det(f2)) or 1)

    g = matrix[a, b] / (f1[a >> 1, b >> 1] * f2[a & 1, b & 1])
    if np.real(g) < 0:
        f1 *= -1
        g = -g
    return g, f1, f2


def local_equivalence(v: np.ndarray, w: np.ndarray):
    """Solve v = g (a1 x a0) w (b1 x b0) for v, w in SU(4) with equal gamma spectra.

    Returns (g, a1, a0, b1, b0).
    """
    m_v = MAGIC_CONJ_T @ v @ MAGIC
    m_w = MAGIC_CONJ_T @ w @ MAGIC
    p, phases_v = eig_symmetric_unitary_real_basis(m_v.T @ m_v)
    q, phases_w = eig_symmetric_unitary_real_basis(m_w.T @ m_w)

    cost = np.abs(np.exp(1j * phases_v)[:, None] - np.exp(1j * phases_w)[None, :])
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(4, dtype=int)
    order[cols] = rows
    p = p[:, order]
    if np.linalg.det(p) * np.linalg.det(q) < 0:
        p[:, 0] = -p[:, 0]

    root_inv = np.diag(np.exp(-0.5j * phases_w))
    left = (m_v @ p @ root_inv).real @ (m_w @ q @ root_inv).real.T
    right = q @ p.T

    g_left, a1, a0 = kron_factor(MAGIC @ left @ MAGIC_CONJ_T)
    g_right, b1, b0 = kron_factor(MAGIC @ right @ MAGIC_CONJ_T)
    g = g_left * g_right

    residual = frobenius(g * np.kron(a1, a0) @ w @ np.kron(b1, b0), v)
    if residual > settings.tolerances.reconstruction:
        raise NumericalBreakdown("local equivalence failed", residual=residual)
    return g, a1, a0, b1, b0
