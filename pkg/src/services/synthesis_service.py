"""
Unitary synthesis entry point shared by the CLI and MPS boundary blocks.
"""
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from src.core.exceptions import UnsupportedRange, WidthExceeded
from src.core.config import settings
from src.core.logger import get_logger
from src.models.circuit import Circuit
from src.services.flag_service import flag_synthesize
from src.services.sdm_service import sdm
from src.utils.linalg import as_unitary, num_qubits

logger = get_logger(__name__)


class Method(str, Enum):
    FLAG = "flag"
    FLAG_NB1 = "flag-nb1"
    SDM = "sdm"


def _relabel(circuit: Circuit, qubits: Sequence[int]) -> Circuit:
    mapping = list(qubits)
    gates = tuple(gate.model_copy(update={"qubits": tuple(mapping[q] for q in gate.qubits)})
                  for gate in circuit.gates)
    return Circuit(width=max(mapping) + 1, gates=gates)


def synthesize_unitary(u: np.ndarray, method: Method = Method.SDM, lowered: bool = True,
                       qubits: Optional[Sequence[int]] = None) -> Circuit:
    """Circuit for u on the given qubits (default 0..n-1, first qubit most significant).

    lowered=False keeps MuxFlag and Diagonal gates for the flag methods.
    """
    u = as_unitary(u)
    n = num_qubits(u.shape[0])
    if n > settings.max_width:
        raise WidthExceeded("unitary too wide to synthesize", width=n, limit=settings.max_width)
    qubits = list(range(n)) if qubits is None else list(qubits)
    if len(qubits) != n:
        raise UnsupportedRange("qubit list does not match the unitary", qubits=len(qubits), width=n)
    method = Method(method)

    if method == Method.SDM:
        circuit = sdm(u, qubits)
    else:
        nb = 2 if method == Method.FLAG else 1
        circuit = _relabel(flag_synthesize(u, nb=nb, lowered=lowered), qubits)
    logger.debug("unitary synthesized", method=method.value, n=n, gates=len(circuit))
    return circuit
