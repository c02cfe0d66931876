"""
Command-line interface.

Exit codes: 0 success, 1 unexpected failure, 2 unreadable input or unsupported
range, 3 violated precondition, 4 failed verification.
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from src.core.config import settings
from src.core.exceptions import (
    FlagCompilerError,
    ParseError,
    UnsupportedRange,
    VerificationFailed,
    WidthExceeded,
)
from src.core.logger import LoggerFactory, LogLevel, get_logger
from src.models.circuit import Circuit, ResourceCount
from src.models.mps import MPS
from src.models.resources import AuditReport, CostParams
from src.services import resource_service, serialization_service
from src.services.circuit_service import apply_to_state, to_matrix
from src.services.mps_service import (
    fidelity,
    left_canonicalize,
    mps_skeleton_phase_gradient,
    mps_statevector,
    mps_to_circuit_clifford_rot,
    prepare,
)
from src.services.synthesis_service import Method, synthesize_unitary
from src.utils.linalg import as_unitary, frobenius, haar_random_unitary, num_qubits

logger = get_logger(__name__)

SYNTHESIS_ROW = {Method.SDM: "SDM", Method.FLAG: "FlagDecomp", Method.FLAG_NB1: "CSD04B"}


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", field="path") from exc


def _stem(path: str) -> str:
    name = str(path)
    for suffix in (".mat.json", ".circuit.json", ".mps.json", ".json"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return name


def _count_line(resources: ResourceCount, verdict: AuditReport) -> str:
    return (f"rotations={resources.rotations} cnots={resources.two_qubit_cliffords} "
            f"global_phases={resources.global_phases} audit={'PASS' if verdict.passed else 'FAIL'}")


def _expected_unitary_count(method: Method, n: int) -> ResourceCount:
    if n == 1:
        return ResourceCount(rotations=3)
    return resource_service.synthesis_counts(SYNTHESIS_ROW[method], n).as_count()


def _require_pass(report: AuditReport) -> None:
    if not report.passed:
        raise VerificationFailed("gate counts do not match the closed form", mismatches=report.mismatches())


def cmd_synth(args: argparse.Namespace) -> int:
    u = as_unitary(serialization_service.parse_matrix(_read(args.input)))
    method = Method(args.method)
    n = num_qubits(u.shape[0])
    circuit = synthesize_unitary(u, method, lowered=not args.skeleton)

    residual = frobenius(to_matrix(circuit), u)
    if residual > settings.tolerances.reconstruction:
        raise VerificationFailed("reconstruction failed", residual=residual)
    resources = resource_service.merged_count(circuit)
    report = resource_service.audit(circuit, _expected_unitary_count(method, n), SYNTHESIS_ROW[method])
    _require_pass(report)

    stem = args.out or _stem(args.input)
    Path(f"{stem}.circuit.json").write_text(serialization_service.emit_json(circuit))
    if not args.skeleton:
        Path(f"{stem}.qasm").write_text(serialization_service.emit_qasm(circuit))
    print(_count_line(resources, report))
    print(f"residual={residual:.3e}")
    logger.info("synth finished", method=method.value, n=n, residual=residual, out=stem)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    circuit = serialization_service.parse_json(_read(args.circuit))
    u = serialization_service.parse_matrix(_read(args.matrix))
    if circuit.width > settings.max_width:
        raise WidthExceeded("circuit too wide to verify", width=circuit.width, limit=settings.max_width)
    if u.shape[0] != 2 ** circuit.width:
        raise UnsupportedRange("matrix and circuit widths differ", dim=u.shape[0], width=circuit.width)
    residual = frobenius(to_matrix(circuit), u)
    print(f"residual={residual:.3e}")
    logger.info("verify finished", residual=residual, tol=args.tol)
    if residual > args.tol:
        raise VerificationFailed("circuit does not implement the matrix", residual=residual, tol=args.tol)
    return 0


def cmd_counts(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise UnsupportedRange("n must be at least 1", n=args.n)
    if args.table == "synthesis":
        rows = resource_service.synthesis_table(args.n)
        body = [(r.method, r.n, r.rotations, f"{'~' if r.approximate else ''}{r.cnots}") for r in rows]
        print(resource_service.format_table(["method", "n", "rotations", "cnots"], body))
    else:
        rows = resource_service.subroutine_table(args.n, args.k)
        if args.length is not None:
            rows.append(resource_service.subroutine_counts("mps-prep", args.n, length=args.length))
        body = [(r.subroutine, r.n, r.k, r.count.rotations, r.count.two_qubit_cliffords,
                 "+D" if r.diagonal else "", r.comment) for r in rows]
        print(resource_service.format_table(
            ["subroutine", "n", "k", "rotations", "cliffords", "diag", "comment"], body))
    print("[" + ", ".join(r.model_dump_json() for r in rows) + "]")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    register = args.n + 1 if args.mps else args.n
    lam, lam_prime = resource_service.choose_lambda(register, args.b, args.aux)
    try:
        params = CostParams(n=args.n, b=args.b, aux_qubits=args.aux,
                            lambda_=args.lambda_ or lam, lambda_prime=args.lambda_prime or lam_prime)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise UnsupportedRange(f"invalid cost parameters: {first['msg']}", field=first["loc"][0]) from exc
    report = resource_service.mps_toffoli(params) if args.mps else resource_service.toffoli_totals(params)
    unconstrained, _ = resource_service.choose_lambda(register, args.b)
    if args.lambda_ is None and lam < unconstrained:
        report.warnings.append(f"lambda chosen from floor(aux / b) = {args.aux // args.b}")
    print(resource_service.report_text(report))
    print(report.model_dump_json(by_alias=True))
    logger.info("estimate finished", n=args.n, mps=args.mps, ours=report.ours, savings=report.savings)
    return 0


def _mps_circuit(mps: MPS, target: str, chi: Optional[int]) -> Circuit:
    if target == "skeleton":
        return mps_skeleton_phase_gradient(mps, chi)
    return mps_to_circuit_clifford_rot(mps, chi)


def cmd_mps(args: argparse.Namespace) -> int:
    mps = serialization_service.parse_mps(_read(args.input))
    circuit = _mps_circuit(mps, args.target, args.chi)
    resources = resource_service.merged_count(circuit)

    target_state = mps_statevector(left_canonicalize(mps))
    overlap = fidelity(target_state, apply_to_state(circuit))
    print(f"fidelity={overlap:.12f}")
    if args.target == "clifford-rot":
        padded = prepare(mps, args.chi)
        n = int(padded.tensors[1].shape[0]).bit_length() - 1
        expected = resource_service.mps_circuit_counts(n, padded.length)
        report = resource_service.audit(circuit, expected, "mps-prep")
        print(_count_line(resources, report))
        _require_pass(report)
    else:
        print(f"rotations={resources.rotations} cnots={resources.two_qubit_cliffords}")
    if overlap < 1.0 - settings.tolerances.reconstruction:
        raise VerificationFailed("prepared state does not match the MPS", fidelity=overlap)

    if args.action == "synth":
        stem = args.out or _stem(args.input)
        Path(f"{stem}.circuit.json").write_text(serialization_service.emit_json(circuit))
        if circuit.is_elementary:
            Path(f"{stem}.qasm").write_text(serialization_service.emit_qasm(circuit))
    logger.info("mps finished", action=args.action, target=args.target, fidelity=overlap)
    return 0


def cmd_random(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise UnsupportedRange("n must be at least 1", n=args.n)
    if args.n > settings.max_width:
        raise WidthExceeded("unitary too wide", width=args.n, limit=settings.max_width)
    # PCG64, seeded explicitly
    rng = np.random.default_rng(args.seed)
    text = serialization_service.emit_matrix(haar_random_unitary(2 ** args.n, rng))
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagc",
        description="Parameter-optimal unitary and MPS synthesis with flag decompositions.",
    )
    parser.add_argument("--log-level", choices=[level.value for level in LogLevel], default=None,
                        help="override FLAGC_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="synthesize a unitary from a .mat.json file")
    synth.add_argument("input")
    synth.add_argument("--method", choices=[m.value for m in Method], default=Method.SDM.value)
    synth.add_argument("--skeleton", action="store_true", help="keep hierarchical MuxFlag and Diagonal gates")
    synth.add_argument("--out", help="output path without extension")
    synth.set_defaults(handler=cmd_synth)

    verify = commands.add_parser("verify", help="compare a circuit with a matrix")
    verify.add_argument("circuit")
    verify.add_argument("matrix")
    verify.add_argument("--tol", type=float, default=settings.tolerances.reconstruction)
    verify.set_defaults(handler=cmd_verify)

    counts = commands.add_parser("counts", help="print closed-form gate-count tables")
    counts.add_argument("--table", choices=["synthesis", "subroutines"], default="synthesis")
    counts.add_argument("--n", type=int, required=True)
    counts.add_argument("--k", type=int, default=0)
    counts.add_argument("--length", type=int, default=None, help="chain length for the mps-prep row")
    counts.set_defaults(handler=cmd_counts)

    estimate = commands.add_parser("estimate", help="Toffoli estimates for phase-gradient rotations")
    estimate.add_argument("--n", type=int, required=True)
    estimate.add_argument("--b", type=int, required=True, help="bits per angle")
    estimate.add_argument("--aux", type=int, default=None, help="available auxiliary qubits")
    estimate.add_argument("--lambda", dest="lambda_", type=int, default=None)
    estimate.add_argument("--lambda-prime", dest="lambda_prime", type=int, default=None)
    estimate.add_argument("--mps", action="store_true", help="estimate one MPS isometry instead")
    estimate.set_defaults(handler=cmd_estimate)

    mps = commands.add_parser("mps", help="prepare or verify an MPS circuit")
    mps.add_argument("action", choices=["synth", "verify"])
    mps.add_argument("input")
    mps.add_argument("--target", choices=["clifford-rot", "skeleton"], default="clifford-rot")
    mps.add_argument("--chi", type=int, default=None)
    mps.add_argument("--out", help="output path without extension")
    mps.set_defaults(handler=cmd_mps)

    random = commands.add_parser("random", help="write a Haar-random unitary")
    random.add_argument("--n", type=int, required=True)
    random.add_argument("--seed", type=int, default=0)
    random.add_argument("--out", default=None)
    random.set_defaults(handler=cmd_random)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        LoggerFactory.configure(LogLevel(args.log_level), settings.log_file_path, settings.log_json)
    try:
        return args.handler(args)
    except FlagCompilerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        logger.error("command failed", command=args.command, error=type(exc).__name__,
                     exit_code=exc.exit_code)
        return exc.exit_code
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        logger.log_exception("command crashed", exc, command=args.command, exit_code=1)
        return 1


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
