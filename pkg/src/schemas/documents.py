"""
On-disk document schemas for matrices, circuits and MPS.

Complex numbers are stored as [re, im] pairs.
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

ComplexPair = Tuple[float, float]

FORMAT_VERSION = 1


class MatrixDocument(BaseModel):
    """`.mat.json`: a square matrix stored row-major."""

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=1)
    data: List[ComplexPair]

    @model_validator(mode="after")
    def _check_size(self) -> "MatrixDocument":
        if len(self.data) != self.dim * self.dim:
            raise ValueError(f"expected {self.dim * self.dim} entries for dim {self.dim}, got {len(self.data)}")
        return self


class GateDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str
    qubits: List[int] = []
    angles: Optional[List[float]] = None
    axis: Optional[str] = None
    phases: Optional[List[ComplexPair]] = None
    blocks: Optional[List[List[ComplexPair]]] = None


class CircuitDocument(BaseModel):
    """`.circuit.json`"""

    model_config = ConfigDict(extra="forbid")

    version: int = FORMAT_VERSION
    width: int = Field(ge=0)
    gates: List[GateDocument] = []

    @model_validator(mode="after")
    def _check_version(self) -> "CircuitDocument":
        if self.version != FORMAT_VERSION:
            raise ValueError(f"unsupported circuit format version {self.version}")
        return self


class TensorDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    shape: Tuple[int, int, int]
    data: List[ComplexPair]

    @model_validator(mode="after")
    def _check_size(self) -> "TensorDocument":
        left, phys, right = self.shape
        if phys != 2 or left < 1 or right < 1:
            raise ValueError(f"tensor shape must be (l, 2, r) with l, r >= 1, got {list(self.shape)}")
        if len(self.data) != left * phys * right:
            raise ValueError(f"shape {list(self.shape)} needs {left * phys * right} entries, got {len(self.data)}")
        return self


class MpsDocument(BaseModel):
    """`.mps.json`: tensors listed left to right, data flat and row-major."""

    model_config = ConfigDict(extra="forbid")

    version: int = FORMAT_VERSION
    length: int = Field(ge=1)
    tensors: List[TensorDocument]

    @model_validator(mode="after")
    def _check_length(self) -> "MpsDocument":
        if self.version != FORMAT_VERSION:
            raise ValueError(f"unsupported MPS format version {self.version}")
        if len(self.tensors) != self.length:
            raise ValueError(f"length {self.length} does not match {len(self.tensors)} tensors")
        return self
