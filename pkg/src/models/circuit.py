"""
Gate and circuit data model.

Conventions: qubit 0 is the most significant bit of basis-state indices,
gates are stored in execution order, R_P(theta) = exp(-i theta P / 2) and
GlobalPhase(alpha) = exp(i alpha). Multiplexed gates list their controls
first and their target last; block j acts when the controls read j
(first control most significant).
"""
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.config import settings

FOUR_PI = 4.0 * np.pi


def canonical_angle(theta: float) -> float:
    """Reduce an angle to (-2pi, 2pi]; rotations are 4pi-periodic."""
    theta = float(theta)
    return theta - FOUR_PI * np.ceil((theta - 2.0 * np.pi) / FOUR_PI)


class GateKind(str, Enum):
    RZ = "RZ"
    RY = "RY"
    RX = "RX"
    H = "H"
    S = "S"
    SDG = "Sdg"
    X = "X"
    Z = "Z"
    CNOT = "CNOT"
    CZ = "CZ"
    CY = "CY"
    GLOBAL_PHASE = "GlobalPhase"
    MUX_ROT = "MuxRot"
    MUX_FLAG = "MuxFlag"
    DIAGONAL = "Diagonal"
    MUX_U2 = "MuxU2"


class Axis(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


ROTATIONS = {GateKind.RZ, GateKind.RY, GateKind.RX}
ONE_QUBIT_CLIFFORDS = {GateKind.H, GateKind.S, GateKind.SDG, GateKind.X, GateKind.Z}
TWO_QUBIT_CLIFFORDS = {GateKind.CNOT, GateKind.CZ, GateKind.CY}
HIERARCHICAL = {GateKind.MUX_ROT, GateKind.MUX_FLAG, GateKind.DIAGONAL, GateKind.MUX_U2}
ELEMENTARY = ROTATIONS | ONE_QUBIT_CLIFFORDS | TWO_QUBIT_CLIFFORDS | {GateKind.GLOBAL_PHASE}

ROTATION_AXIS = {GateKind.RX: Axis.X, GateKind.RY: Axis.Y, GateKind.RZ: Axis.Z}
AXIS_ROTATION = {axis: kind for kind, axis in ROTATION_AXIS.items()}


class Gate(BaseModel):
    """A single gate; see the module docstring for conventions."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: GateKind
    qubits: Tuple[int, ...] = ()
    angles: Tuple[float, ...] = ()
    axis: Optional[Axis] = None
    phases: Tuple[complex, ...] = ()
    blocks: Tuple[Tuple[complex, complex, complex, complex], ...] = ()

    @model_validator(mode="after")
    def _check_shape(self) -> "Gate":
        kind, qubits = self.kind, self.qubits
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind.value}: qubit indices must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"{kind.value}: negative qubit index in {qubits}")

        if kind in ROTATIONS:
            self._expect(len(qubits) == 1 and len(self.angles) == 1, "one qubit and one angle")
        elif kind in ONE_QUBIT_CLIFFORDS:
            self._expect(len(qubits) == 1 and not self.angles, "one qubit")
        elif kind in TWO_QUBIT_CLIFFORDS:
            self._expect(len(qubits) == 2 and not self.angles, "control and target")
        elif kind == GateKind.GLOBAL_PHASE:
            self._expect(not qubits and len(self.angles) == 1, "no qubits and one angle")
        elif kind == GateKind.MUX_ROT:
            self._expect(self.axis is not None, "an axis")
            self._expect(len(qubits) >= 1 and len(self.angles) == 2 ** (len(qubits) - 1),
                         "2^k angles for k controls")
        elif kind == GateKind.MUX_FLAG:
            self._expect(len(qubits) >= 1 and len(self.angles) == 2 ** len(qubits),
                         "2^k theta_z followed by 2^k theta_y angles")
        elif kind == GateKind.DIAGONAL:
            self._expect(len(qubits) >= 1 and len(self.phases) == 2 ** len(qubits),
                         "2^n phases for n qubits")
            moduli = np.abs(np.asarray(self.phases, dtype=complex))
            self._expect(bool(np.all(np.abs(moduli - 1.0) <= settings.tolerances.unitarity)), "unit-modulus phases")
        elif kind == GateKind.MUX_U2:
            self._expect(len(qubits) >= 1 and len(self.blocks) == 2 ** (len(qubits) - 1),
                         "2^k blocks for k controls")
        if kind not in (GateKind.MUX_ROT,) and self.axis is not None:
            raise ValueError(f"{kind.value}: axis is only meaningful for MuxRot")
        return self

    def _expect(self, condition: bool, what: str) -> None:
        if not condition:
            raise ValueError(f"{self.kind.value} requires {what}")

    # --- constructors -------------------------------------------------

    @classmethod
    def rotation(cls, axis: Axis, theta: float, target: int) -> "Gate":
        return cls(kind=AXIS_ROTATION[Axis(axis)], qubits=(target,), angles=(canonical_angle(theta),))

    @classmethod
    def rz(cls, theta: float, target: int) -> "Gate":
        return cls.rotation(Axis.Z, theta, target)

    @classmethod
    def ry(cls, theta: float, target: int) -> "Gate":
        return cls.rotation(Axis.Y, theta, target)

    @classmethod
    def rx(cls, theta: float, target: int) -> "Gate":
        return cls.rotation(Axis.X, theta, target)

    @classmethod
    def single(cls, kind: GateKind, target: int) -> "Gate":
        return cls(kind=kind, qubits=(target,))

    @classmethod
    def controlled(cls, kind: GateKind, control: int, target: int) -> "Gate":
        return cls(kind=kind, qubits=(control, target))

    @classmethod
    def global_phase(cls, alpha: float) -> "Gate":
        return cls(kind=GateKind.GLOBAL_PHASE, angles=(float(np.angle(np.exp(1j * alpha))),))

    @classmethod
    def mux_rot(cls, axis: Axis, angles: Iterable[float], controls: Sequence[int], target: int) -> "Gate":
        return cls(kind=GateKind.MUX_ROT, axis=Axis(axis), qubits=(*controls, target),
                   angles=tuple(canonical_angle(a) for a in angles))

    @classmethod
    def mux_flag(cls, theta_z: Iterable[float], theta_y: Iterable[float],
                 controls: Sequence[int], target: int) -> "Gate":
        angles = tuple(canonical_angle(a) for a in theta_z) + tuple(canonical_angle(a) for a in theta_y)
        return cls(kind=GateKind.MUX_FLAG, qubits=(*controls, target), angles=angles)

    @classmethod
    def diagonal(cls, phases: Iterable[complex], qubits: Sequence[int]) -> "Gate":
        values = np.asarray(list(phases), dtype=complex)
        values = values / np.abs(values)
        return cls(kind=GateKind.DIAGONAL, qubits=tuple(qubits), phases=tuple(complex(p) for p in values))

    @classmethod
    def mux_u2(cls, blocks: np.ndarray, controls: Sequence[int], target: int) -> "Gate":
        flat = np.asarray(blocks, dtype=complex).reshape(-1, 4)
        return cls(kind=GateKind.MUX_U2, qubits=(*controls, target),
                   blocks=tuple(tuple(complex(x) for x in row) for row in flat))

    # --- views ----------------------------------------------------------

    @property
    def controls(self) -> Tuple[int, ...]:
        return self.qubits[:-1]

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def num_controls(self) -> int:
        if self.kind in (GateKind.MUX_ROT, GateKind.MUX_FLAG, GateKind.MUX_U2):
            return len(self.qubits) - 1
        return 0

    @property
    def theta_z(self) -> np.ndarray:
        half = len(self.angles) // 2
        return np.asarray(self.angles[:half])

    @property
    def theta_y(self) -> np.ndarray:
        half = len(self.angles) // 2
        return np.asarray(self.angles[half:])

    @property
    def is_elementary(self) -> bool:
        return self.kind in ELEMENTARY


class Circuit(BaseModel):
    """Ordered gate list; matrix(circuit) = G_m ... G_1."""

    model_config = ConfigDict(frozen=True)

    width: int = Field(ge=0)
    gates: Tuple[Gate, ...] = ()

    @model_validator(mode="after")
    def _check_qubits(self) -> "Circuit":
        for position, gate in enumerate(self.gates):
            if any(q >= self.width for q in gate.qubits):
                raise ValueError(
                    f"gate {position} ({gate.kind.value}) uses qubit outside width {self.width}: {gate.qubits}"
                )
        return self

    @classmethod
    def of(cls, width: int, *parts: Iterable[Gate]) -> "Circuit":
        gates = []
        for part in parts:
            gates.extend(part.gates if isinstance(part, Circuit) else part)
        return cls(width=width, gates=tuple(gates))

    def then(self, *parts: Iterable[Gate]) -> "Circuit":
        return Circuit.of(self.width, self, *parts)

    def widened(self, width: int) -> "Circuit":
        return Circuit(width=width, gates=self.gates)

    @property
    def is_elementary(self) -> bool:
        return all(gate.is_elementary for gate in self.gates)

    def __len__(self) -> int:
        return len(self.gates)


class ResourceCount(BaseModel):
    """Gate counts by category."""

    rotations: int = 0
    two_qubit_cliffords: int = 0
    other_cliffords: int = 0
    global_phases: int = 0
    parameters: int = 0

    def __add__(self, other: "ResourceCount") -> "ResourceCount":
        return ResourceCount(**{
            name: getattr(self, name) + getattr(other, name) for name in ResourceCount.model_fields
        })
