"""
Reading and writing of `.mat.json`, `.circuit.json`, `.mps.json` and OpenQASM 2 text.
"""
import json
from typing import List, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.core.exceptions import NotLowered, ParseError
from src.core.logger import get_logger
from src.models.circuit import Axis, Circuit, Gate, GateKind
from src.models.mps import MPS
from src.schemas.documents import (
    CircuitDocument,
    GateDocument,
    MatrixDocument,
    MpsDocument,
    TensorDocument,
)

logger = get_logger(__name__)

DocumentT = TypeVar("DocumentT", bound=BaseModel)

QASM_NAMES = {
    GateKind.RZ: "rz",
    GateKind.RY: "ry",
    GateKind.RX: "rx",
    GateKind.H: "h",
    GateKind.S: "s",
    GateKind.SDG: "sdg",
    GateKind.X: "x",
    GateKind.Z: "z",
    GateKind.CNOT: "cx",
    GateKind.CZ: "cz",
    GateKind.CY: "cy",
}


def _pairs(values: np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def _complex(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def _load(text: str, schema: Type[DocumentT]) -> DocumentT:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", position=f"line {exc.lineno} column {exc.colno}") from exc
    try:
        return schema.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or None
        raise ParseError(f"invalid {schema.__name__}: {first['msg']}", field=field,
                         errors=exc.error_count()) from exc


# --- matrices ----------------------------------------------------------------------------------

def parse_matrix(text: str) -> np.ndarray:
    document = _load(text, MatrixDocument)
    return _complex(document.data).reshape(document.dim, document.dim)


def emit_matrix(u: np.ndarray) -> str:
    u = np.asarray(u, dtype=complex)
    return MatrixDocument(dim=u.shape[0], data=_pairs(u)).model_dump_json()


# --- circuits ----------------------------------------------------------------------------------

def _gate_document(gate: Gate) -> GateDocument:
    document = GateDocument(kind=gate.kind.value, qubits=list(gate.qubits))
    if gate.angles:
        document.angles = list(gate.angles)
    if gate.axis is not None:
        document.axis = gate.axis.value
    if gate.phases:
        document.phases = _pairs(gate.phases)
    if gate.blocks:
        document.blocks = [_pairs(block) for block in gate.blocks]
    return document


def _gate(document: GateDocument, position: int) -> Gate:
    try:
        kind = GateKind(document.kind)
        return Gate(
            kind=kind,
            qubits=tuple(document.qubits),
            angles=tuple(document.angles or ()),
            axis=Axis(document.axis) if document.axis is not None else None,
            phases=tuple(_complex(document.phases)) if document.phases else (),
            blocks=tuple(tuple(_complex(block)) for block in document.blocks or ()),
        )
    except (ValueError, ValidationError) as exc:
        raise ParseError(str(exc).splitlines()[0], field="gates", position=f"gate {position}") from exc


def emit_json(circuit: Circuit) -> str:
    """Circuit document; floats are written in their shortest exact round-trip form."""
    document = CircuitDocument(width=circuit.width, gates=[_gate_document(g) for g in circuit.gates])
    return document.model_dump_json(exclude_none=True, indent=2)


def parse_json(text: str) -> Circuit:
    document = _load(text, CircuitDocument)
    gates = tuple(_gate(g, position) for position, g in enumerate(document.gates))
    try:
        return Circuit(width=document.width, gates=gates)
    except ValidationError as exc:
        raise ParseError(exc.errors()[0]["msg"], field="gates") from exc


def emit_qasm(circuit: Circuit) -> str:
    """OpenQASM 2 text of an elementary circuit; the global phase goes into a comment."""
    if not circuit.is_elementary:
        kinds = sorted({g.kind.value for g in circuit.gates if not g.is_elementary})
        raise NotLowered("circuit contains hierarchical gates", kinds=kinds)
    phase = sum(g.angles[0] for g in circuit.gates if g.kind == GateKind.GLOBAL_PHASE)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{max(circuit.width, 1)}];",
             f"// global phase: {float(np.angle(np.exp(1j * phase)))!r}"]
    for gate in circuit.gates:
        if gate.kind == GateKind.GLOBAL_PHASE:
            continue
        operands = ",".join(f"q[{q}]" for q in gate.qubits)
        name = QASM_NAMES[gate.kind]
        if gate.angles:
            lines.append(f"{name}({float(gate.angles[0])!r}) {operands};")
        else:
            lines.append(f"{name} {operands};")
    return "\n".join(lines) + "\n"


# --- MPS -----------------------------------------------------------------------------------------

def parse_mps(text: str) -> MPS:
    document = _load(text, MpsDocument)
    tensors = [_complex(t.data).reshape(t.shape) for t in document.tensors]
    try:
        return MPS(tensors=tensors)
    except ValidationError as exc:
        raise ParseError(exc.errors()[0]["msg"], field="tensors") from exc


def emit_mps(mps: MPS) -> str:
    tensors = [TensorDocument(shape=t.shape, data=_pairs(t)) for t in mps.tensors]
    return MpsDocument(length=mps.length, tensors=tensors).model_dump_json()
