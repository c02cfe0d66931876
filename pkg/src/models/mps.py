"""
Matrix product state and isometry-stack models.
"""
from enum import Enum
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import settings


class CanonicalForm(str, Enum):
    NONE = "none"
    LEFT = "left"


def isometry_residual(tensor: np.ndarray) -> float:
    """Distance of sum_s A^s^dagger A^s from the projector onto the non-null right-bond columns."""
    left, _, right = tensor.shape
    matrix = tensor.transpose(1, 0, 2).reshape(2 * left, right)
    gram = matrix.conj().T @ matrix
    support = (np.linalg.norm(matrix, axis=0) > settings.tolerances.kernel).astype(float)
    return float(np.linalg.norm(gram - np.diag(support)))


class MPS(BaseModel):
    """Open-boundary qubit MPS; tensors[j] has shape (left_bond, 2, right_bond)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tensors: List[np.ndarray]
    canonical_form: CanonicalForm = CanonicalForm.NONE

    @field_validator("tensors", mode="before")
    @classmethod
    def _as_complex(cls, value):
        return [np.asarray(t, dtype=complex) for t in value]

    @model_validator(mode="after")
    def _check_bonds(self) -> "MPS":
        if not self.tensors:
            raise ValueError("an MPS needs at least one site")
        for site, tensor in enumerate(self.tensors):
            if tensor.ndim != 3 or tensor.shape[1] != 2:
                raise ValueError(f"site {site}: expected shape (l, 2, r), got {tensor.shape}")
        for site in range(len(self.tensors) - 1):
            if self.tensors[site].shape[2] != self.tensors[site + 1].shape[0]:
                raise ValueError(f"bond {site}: right dimension {self.tensors[site].shape[2]} does not "
                                 f"match left dimension {self.tensors[site + 1].shape[0]}")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        if self.canonical_form == CanonicalForm.LEFT:
            worst = max(isometry_residual(t) for t in self.tensors)
            if worst > settings.tolerances.unitarity:
                raise ValueError(f"tensors are not left isometries (residual {worst:.2e})")
        return self

    @property
    def length(self) -> int:
        return len(self.tensors)

    @property
    def bonds(self) -> List[int]:
        """Internal bond dimensions, left to right."""
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bonds, default=1)


class IsometryStack(BaseModel):
    """Completed site unitaries of a padded left-canonical MPS.

    bulk[i] belongs to site n + 1 + i (1-based) and acts on the fresh site
    qubit (most significant) followed by the n bond qubits; boundary maps
    the bond register onto the first n sites.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    bond_qubits: int = Field(ge=1)
    length: int = Field(ge=1)
    bulk: List[np.ndarray]
    boundary: np.ndarray

    @property
    def chi(self) -> int:
        return 2 ** self.bond_qubits
