"""
Cost-model parameters and report records.
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.models.circuit import ResourceCount


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


class CostParams(BaseModel):
    """Parameters of the phase-gradient Toffoli formulas."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    n: int = Field(ge=1)
    b: int = Field(ge=1, description="bits per rotation angle")
    lambda_: int = Field(1, alias="lambda", description="QROM rows loaded in parallel")
    lambda_prime: int = Field(1, description="rows of the sign-block QROM")
    aux_qubits: Optional[int] = Field(None, ge=0)

    @field_validator("lambda_", "lambda_prime")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if not _is_power_of_two(v):
            raise ValueError("must be a power of two >= 1")
        return v


class CostLine(BaseModel):
    name: str
    value: int
    raw: int
    formula: str = ""

    @property
    def clamped(self) -> bool:
        return self.value != self.raw


class ResourceReport(BaseModel):
    """Toffoli costs of our construction against a baseline."""

    title: str
    params: CostParams
    blocks: List[CostLine] = []
    ours: int
    baseline: int
    savings: int
    baseline_blocks: List[CostLine] = []
    warnings: List[str] = []


class SynthesisRow(BaseModel):
    method: str
    n: int
    rotations: int
    cnots: int
    approximate: bool = False

    def as_count(self) -> ResourceCount:
        return ResourceCount(rotations=self.rotations, two_qubit_cliffords=self.cnots)


class SubroutineRow(BaseModel):
    subroutine: str
    n: int = 0
    k: int = 0
    count: ResourceCount
    diagonal: bool = False
    comment: str = ""


class AuditEntry(BaseModel):
    category: str
    expected: int
    measured: int

    @property
    def matches(self) -> bool:
        return self.expected == self.measured


class AuditReport(BaseModel):
    formula_id: str
    entries: List[AuditEntry]
    notes: List[str] = []

    @property
    def passed(self) -> bool:
        return all(entry.matches for entry in self.entries)

    def mismatches(self) -> List[str]:
        return [f"{e.category}: expected {e.expected}, measured {e.measured} ({self.formula_id}, "
                f"delta {e.measured - e.expected:+d})" for e in self.entries if not e.matches]
