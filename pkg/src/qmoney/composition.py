"""Parallel repetition and threshold composition of cloning problems.

Running n independent verifications multiplies the optimal counterfeiting
value: tensoring per-repetition optimal pairs gives matching feasible points
of the n-fold problem.  The only bookkeeping is a factor permutation, since
the tensor product groups factors per repetition while the n-fold problem
wants all clone factors in front of all input factors.

Threshold verification accepts when at least t of n repetitions pass.  Under
two conditions on the single-repetition ensemble (uniform average state, flat
optimal dual) the optimal value becomes a binomial tail in the
single-repetition value, and the dual certificate reduces to the norm of an
explicitly assembled success/failure operator sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import certificates, linalg, schemes
from .exceptions import CertificationError, DimensionError
from .sdp import CloningSdp

AVERAGE_STATE_TOL = 1e-10
NORM_CONDITION_TOL = 1e-9
DENSE_GUARD = 1024


@dataclass(frozen=True)
class RepetitionSpec:
    """A composed verification: base value, repetitions, acceptance threshold."""

    alpha: float
    n: int
    t: int

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"base value must lie in [0, 1], got {self.alpha}")
        if not 1 <= self.t <= self.n:
            raise ValueError(f"need 1 <= t <= n, got t={self.t}, n={self.n}")

    def value(self) -> float:
        return threshold_value(self.alpha, self.n, self.t)


def repeated_value(alpha: float, n: int) -> float:
    """Optimal value of n-fold parallel repetition: the n-th power."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"base value must lie in [0, 1], got {alpha}")
    if n < 0:
        raise ValueError(f"repetition count must be nonnegative, got {n}")
    return float(alpha**n)


def threshold_value(alpha: float, n: int, t: int) -> float:
    """Optimal counterfeiting value when t of n verifications must pass."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"base value must lie in [0, 1], got {alpha}")
    if not 1 <= t <= n:
        raise ValueError(f"need 1 <= t <= n, got t={t}, n={n}")
    return float(
        sum(math.comb(n, j) * alpha**j * (1.0 - alpha) ** (n - j) for j in range(t, n + 1))
    )


def _grouping_permutation(problems: list[CloningSdp]) -> list[int]:
    """Slot map sending per-problem factor runs to grouped (outputs, inputs) order.

    Source order is the tensor order: problem 0's factors, then problem 1's,
    and so on.  Target order lists every problem's output factors first (in
    problem order, preserving each problem's internal order) and then every
    problem's input factors.
    """
    total_out = sum(p.n_out for p in problems)
    perm: list[int] = []
    out_seen = 0
    in_seen = 0
    for p in problems:
        n_in = len(p.dims) - p.n_out
        for j in range(p.n_out):
            perm.append(out_seen + j)
        for j in range(n_in):
            perm.append(total_out + in_seen + j)
        out_seen += p.n_out
        in_seen += n_in
    return perm


def _tensor(mats: list[np.ndarray]) -> np.ndarray:
    acc = mats[0]
    for m in mats[1:]:
        acc = np.kron(acc, m)
    return acc


def repeated_sdp(problems: list[CloningSdp], perm: list[int] | None = None) -> CloningSdp:
    """The composed problem whose attacks clone every repetition at once.

    The objective is the tensor product of the component objectives with
    factors regrouped so all clone factors precede all input factors.  A
    custom slot map can be supplied; by default the grouping permutation is
    used.
    """
    if not problems:
        raise DimensionError("need at least one component problem")
    if len(problems) == 1:
        return problems[0]
    if perm is None:
        perm = _grouping_permutation(problems)
    source_dims = [d for p in problems for d in p.dims]
    w = linalg.permutation_operator(source_dims, perm)
    objective = w @ _tensor([p.objective for p in problems]) @ w.conj().T
    grouped_dims = [0] * len(source_dims)
    for j, slot in enumerate(perm):
        grouped_dims[slot] = source_dims[j]
    n_out = sum(p.n_out for p in problems)
    return CloningSdp(
        linalg.as_hermitian(objective, tol=1e-9), tuple(grouped_dims), n_out=n_out
    )


def tensor_certificates(
    x_list: list[np.ndarray],
    y_list: list[np.ndarray],
    problems: list[CloningSdp],
    perm: list[int] | None = None,
    tol: float = certificates.DEFAULT_CERTIFICATE_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Feasible pair for the composed problem from per-component pairs.

    Each component pair is feasibility-checked first; the products then
    inherit feasibility (positivity survives tensoring on both sides, and the
    lifted dual products dominate the objective products).  The primal factor
    is conjugated by the same grouping permutation as the composed objective.
    """
    if not x_list or len(x_list) != len(y_list) or len(x_list) != len(problems):
        raise DimensionError("need matching non-empty primal, dual, and problem lists")
    for i, (x, y, p) in enumerate(zip(x_list, y_list, problems)):
        primal = certificates.check_primal(x, p, tol)
        if not primal.feasible:
            raise CertificationError(
                f"component {i} primal point is infeasible: minimum eigenvalue "
                f"{primal.min_eigenvalue:.3e}, trace defect {primal.trace_defect:.3e}"
            )
        dual = certificates.check_dual(y, p, tol)
        if not dual.feasible:
            raise CertificationError(
                f"component {i} dual point is infeasible: slack eigenvalue "
                f"{dual.min_eigenvalue:.3e}"
            )
    if len(problems) == 1:
        return np.asarray(x_list[0], dtype=np.complex128), np.asarray(
            y_list[0], dtype=np.complex128
        )
    if perm is None:
        perm = _grouping_permutation(problems)
    source_dims = [d for p in problems for d in p.dims]
    w = linalg.permutation_operator(source_dims, perm)
    x = w @ _tensor([np.asarray(m, dtype=np.complex128) for m in x_list]) @ w.conj().T
    y = _tensor([np.asarray(m, dtype=np.complex128) for m in y_list])
    return linalg.as_hermitian(x, tol=1e-9), linalg.as_hermitian(y, tol=1e-9)


@dataclass(frozen=True)
class ThresholdOperators:
    """Success and failure operators of one verification round."""

    success: np.ndarray
    failure: np.ndarray


def build_threshold_operators(ensemble: schemes.Ensemble) -> ThresholdOperators:
    """Per-round success and failure operators for threshold composition.

    The success operator is the cloning objective.  The failure operator
    replaces the two-clone projector by its complement, so for ensembles with
    uniform average state the two sum to the identity over the round's space
    divided by the dimension.
    """
    d = ensemble.dim
    success = schemes.cloning_objective(ensemble)
    eye = np.eye(d * d, dtype=np.complex128)
    failure = np.zeros((d**3, d**3), dtype=np.complex128)
    for w, psi in ensemble.items:
        pair = np.kron(psi, psi)
        clone_part = eye - np.outer(pair, pair.conj())
        failure += w * np.kron(clone_part, np.outer(psi.conj(), psi))
    return ThresholdOperators(
        success=success, failure=linalg.as_hermitian(failure, tol=1e-10)
    )


def threshold_conditions_hold(ensemble: schemes.Ensemble, alpha: float) -> bool:
    """Whether the binomial-tail threshold analysis applies to this ensemble.

    Requires the ensemble average to be the maximally mixed state and the
    objective norm to equal alpha divided by the dimension, which makes the
    flat dual point optimal for the single round.
    """
    d = ensemble.dim
    average = ensemble.average_state()
    if np.abs(average - np.eye(d) / d).max() > AVERAGE_STATE_TOL:
        return False
    norm = linalg.operator_norm(schemes.cloning_objective(ensemble))
    return abs(norm - alpha / d) <= NORM_CONDITION_TOL


def _check_dense_guard(d: int, n: int) -> None:
    if d ** (3 * n) > DENSE_GUARD:
        raise DimensionError(
            f"dense threshold assembly needs dimension^(3n) <= {DENSE_GUARD}, "
            f"got {d ** (3 * n)}"
        )


def verify_r_norm(ensemble: schemes.Ensemble, n: int, t: int) -> tuple[float, float]:
    """Norm of the assembled threshold operator next to its closed form.

    Assembles R, the sum over outcome patterns with at least t successes of
    the tensor products of per-round success/failure operators, and returns
    its operator norm together with the binomial-tail formula evaluated at
    the base value implied by the objective norm.  Dense assembly is guarded
    by the d^(3n) size cap.
    """
    if not 1 <= t <= n:
        raise ValueError(f"need 1 <= t <= n, got t={t}, n={n}")
    d = ensemble.dim
    _check_dense_guard(d, n)
    ops = build_threshold_operators(ensemble)
    alpha = d * linalg.operator_norm(ops.success)
    size = d ** (3 * n)
    r = np.zeros((size, size), dtype=np.complex128)
    for pattern in range(2**n):
        bits = [(pattern >> i) & 1 for i in range(n)]
        if sum(bits) < t:
            continue
        r += _tensor([ops.success if b else ops.failure for b in bits])
    lhs = linalg.operator_norm(r)
    rhs = threshold_value(min(1.0, alpha), n, t) / d**n
    return lhs, rhs


def threshold_sdp(ensemble: schemes.Ensemble, n: int, t: int) -> CloningSdp:
    """The composed problem for at-least-t-of-n verification, ready to solve.

    The objective is the assembled R operator regrouped so clone factors
    precede input factors, matching the layout of :func:`repeated_sdp`.
    Dense assembly is guarded by the d^(3n) size cap.
    """
    if not 1 <= t <= n:
        raise ValueError(f"need 1 <= t <= n, got t={t}, n={n}")
    d = ensemble.dim
    _check_dense_guard(d, n)
    ops = build_threshold_operators(ensemble)
    size = d ** (3 * n)
    r = np.zeros((size, size), dtype=np.complex128)
    for pattern in range(2**n):
        bits = [(pattern >> i) & 1 for i in range(n)]
        if sum(bits) < t:
            continue
        r += _tensor([ops.success if b else ops.failure for b in bits])
    fake_components = [CloningSdp(ops.success, dims=(d, d, d))] * n
    perm = _grouping_permutation(fake_components)
    source_dims = [d] * (3 * n)
    w = linalg.permutation_operator(source_dims, perm)
    objective = linalg.as_hermitian(w @ r @ w.conj().T, tol=1e-9)
    return CloningSdp(objective, tuple([d] * (3 * n)), n_out=2 * n)
