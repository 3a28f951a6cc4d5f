"""Independent verification of claimed primal/dual pairs for cloning problems.

The checks here recompute everything from the handed-in matrices with the
eigensolver; nothing is trusted from whatever produced them.  A pair whose
sides are both feasible and whose values agree within tolerance certifies the
optimal value, since any feasible dual point upper-bounds every feasible
primal value.

A serialization format is provided so certificates can be stored, shipped,
and re-checked later: a JSON object carrying the objective, both matrices as
nested [re, im] arrays, the tolerance, and the claimed value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _codec, linalg
from .exceptions import DimensionError, FileFormatError
from .sdp import CloningSdp

DEFAULT_CERTIFICATE_TOL = 1e-7


@dataclass(frozen=True)
class PrimalCheck:
    """Feasibility verdict and residuals for a claimed primal point."""

    feasible: bool
    value: float
    min_eigenvalue: float
    trace_defect: float


@dataclass(frozen=True)
class DualCheck:
    """Feasibility verdict and slack residual for a claimed dual point."""

    feasible: bool
    value: float
    min_eigenvalue: float


@dataclass(frozen=True)
class CertificateReport:
    """Joint verdict on a primal/dual pair.

    ``certified`` requires both sides feasible and the two objective values
    within ``tolerance`` of each other; the constructor enforces that the
    flag never disagrees with the recorded numbers.
    """

    primal: PrimalCheck
    dual: DualCheck
    gap: float
    tolerance: float
    certified: bool

    def __post_init__(self):
        consistent = (
            self.primal.feasible and self.dual.feasible and abs(self.gap) <= self.tolerance
        )
        if self.certified != consistent:
            raise ValueError("certificate verdict disagrees with its own checks")

    @property
    def primal_value(self) -> float:
        return self.primal.value

    @property
    def dual_value(self) -> float:
        return self.dual.value


def check_primal(
    x: np.ndarray, problem: CloningSdp, tol: float = DEFAULT_CERTIFICATE_TOL
) -> PrimalCheck:
    """Check positivity and the partial-trace constraint of a primal point."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (problem.dim, problem.dim):
        raise DimensionError(
            f"primal matrix has shape {x.shape}, expected {(problem.dim, problem.dim)}"
        )
    x = linalg.as_hermitian(x, tol=1e-6)
    min_eig = linalg.min_eigenvalue(x)
    defect = float(np.abs(problem.trace_out(x) - np.eye(problem.in_dim)).max())
    value = float(np.real(np.trace(problem.objective @ x)))
    return PrimalCheck(
        feasible=bool(min_eig >= -tol and defect <= tol),
        value=value,
        min_eigenvalue=min_eig,
        trace_defect=defect,
    )


def check_dual(
    y: np.ndarray, problem: CloningSdp, tol: float = DEFAULT_CERTIFICATE_TOL
) -> DualCheck:
    """Check that the lifted dual point dominates the objective."""
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (problem.in_dim, problem.in_dim):
        raise DimensionError(
            f"dual matrix has shape {y.shape}, expected {(problem.in_dim, problem.in_dim)}"
        )
    y = linalg.as_hermitian(y, tol=1e-6)
    slack_eig = linalg.min_eigenvalue(problem.lift_dual(y) - problem.objective)
    return DualCheck(
        feasible=bool(slack_eig >= -tol),
        value=float(np.real(np.trace(y))),
        min_eigenvalue=slack_eig,
    )


def certify(
    x: np.ndarray,
    y: np.ndarray,
    problem: CloningSdp,
    tol: float = DEFAULT_CERTIFICATE_TOL,
) -> CertificateReport:
    """Verify a primal/dual pair and report whether it certifies the value."""
    primal = check_primal(x, problem, tol)
    dual = check_dual(y, problem, tol)
    gap = dual.value - primal.value
    certified = primal.feasible and dual.feasible and abs(gap) <= tol
    return CertificateReport(
        primal=primal, dual=dual, gap=gap, tolerance=tol, certified=certified
    )


@dataclass(frozen=True)
class CertificateFile:
    """A deserialized certificate: problem, claimed pair, tolerance, value."""

    problem: CloningSdp
    primal_x: np.ndarray
    dual_y: np.ndarray
    tolerance: float
    value: float

    def verify(self) -> CertificateReport:
        return certify(self.primal_x, self.dual_y, self.problem, self.tolerance)


def certificate_payload(
    problem: CloningSdp,
    x: np.ndarray,
    y: np.ndarray,
    tolerance: float,
    value: float,
) -> dict:
    """JSON-ready certificate fields with matrices in nested [re, im] form."""
    return {
        "q": _codec.complex_to_pairs(problem.objective),
        "primal_x": _codec.complex_to_pairs(np.asarray(x, dtype=np.complex128)),
        "dual_y": _codec.complex_to_pairs(np.asarray(y, dtype=np.complex128)),
        "tolerance": float(tolerance),
        "value": float(value),
        "dims": list(problem.dims),
        "n_out": problem.n_out,
    }


def save_certificate(
    path: str,
    problem: CloningSdp,
    x: np.ndarray,
    y: np.ndarray,
    tolerance: float,
    value: float,
) -> None:
    """Write a certificate as JSON with matrices in nested [re, im] form."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(certificate_payload(problem, x, y, tolerance, value), handle, indent=1)


def load_certificate(path: str) -> CertificateFile:
    """Read a certificate file, rebuilding the problem from the stored objective.

    The input dimension is recovered from the dual matrix; an optional
    ``dims``/``n_out`` pair records finer factor structure and is validated
    against the recovered split when present.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot parse certificate file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise FileFormatError("certificate file must hold a JSON object")
    for field in ("q", "primal_x", "dual_y", "tolerance", "value"):
        if field not in payload:
            raise FileFormatError(f"certificate file is missing the {field} field")
    q = _codec.pairs_to_matrix(payload["q"], "q")
    x = _codec.pairs_to_matrix(payload["primal_x"], "primal_x")
    y = _codec.pairs_to_matrix(payload["dual_y"], "dual_y")
    tolerance = payload["tolerance"]
    value = payload["value"]
    if not isinstance(tolerance, (int, float)) or not 0 < float(tolerance) <= 1:
        raise FileFormatError(f"tolerance must be a number in (0, 1], got {tolerance!r}")
    if not isinstance(value, (int, float)):
        raise FileFormatError(f"value must be a number, got {value!r}")
    in_dim = y.shape[0]
    if q.shape[0] % in_dim != 0:
        raise FileFormatError(
            f"objective size {q.shape[0]} is not a multiple of the dual size {in_dim}"
        )
    out_dim = q.shape[0] // in_dim
    dims: tuple[int, ...] = (out_dim, in_dim)
    n_out = 1
    if "dims" in payload:
        raw = payload["dims"]
        if (
            not isinstance(raw, list)
            or not raw
            or any(not isinstance(v, int) or v < 1 for v in raw)
        ):
            raise FileFormatError(f"dims must be a list of positive integers, got {raw!r}")
        stored_n_out = payload.get("n_out", len(raw) - 1)
        if not isinstance(stored_n_out, int) or not 1 <= stored_n_out < len(raw):
            raise FileFormatError(f"n_out must be a factor split index, got {stored_n_out!r}")
        stored_out = int(np.prod(raw[:stored_n_out]))
        stored_in = int(np.prod(raw[stored_n_out:]))
        if (stored_out, stored_in) != (out_dim, in_dim):
            raise FileFormatError(
                f"stored dims {raw} split as {(stored_out, stored_in)} but the "
                f"matrices imply {(out_dim, in_dim)}"
            )
        dims = tuple(raw)
        n_out = stored_n_out
    try:
        problem = CloningSdp(q, dims=dims, n_out=n_out)
    except (DimensionError, ValueError) as exc:
        raise FileFormatError(f"stored objective is not a valid problem: {exc}") from exc
    if x.shape != q.shape:
        raise FileFormatError(
            f"primal matrix shape {x.shape} does not match the objective {q.shape}"
        )
    return CertificateFile(
        problem=problem, primal_x=x, dual_y=y, tolerance=float(tolerance), value=float(value)
    )
