"""Shared assertions and reference constructions for the test suite."""
import numpy as np

from src.models.circuit import Circuit, Gate, GateKind
from src.services.circuit_service import to_matrix


def multiplexer(blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix of a multiplexer whose controls precede its targets."""
    blocks = np.asarray(blocks, dtype=complex)
    size, dim = blocks.shape[0], blocks.shape[1]
    out = np.zeros((size * dim, size * dim), dtype=complex)
    for j, block in enumerate(blocks):
        out[j * dim:(j + 1) * dim, j * dim:(j + 1) * dim] = block
    return out


def gate_matrix(gate: Gate, width: int) -> np.ndarray:
    return to_matrix(Circuit(width=width, gates=(gate,)))


def controlled(kind: GateKind, control: int, target: int, width: int) -> np.ndarray:
    return gate_matrix(Gate.controlled(kind, control, target), width)


def flag_product(delta: np.ndarray, flag: Circuit, width: int) -> np.ndarray:
    """diag(delta) . matrix(flag) on `width` qubits."""
    return np.asarray(delta)[:, None] * to_matrix(flag.widened(width))
