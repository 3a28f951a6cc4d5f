"""Interior-point solver for the counterfeiting semidefinite program.

The primal problem maximizes <Q, X> over positive semidefinite X whose
partial trace over the leading (output) tensor factors is the identity on the
trailing (input) factors; feasible X are exactly the Choi operators of
channels from the input space to the output space.  The dual minimizes the
trace of Y over Hermitian Y on the input space with identity (x) Y - Q
positive semidefinite.  Both problems are strictly feasible (take a multiple
of the identity, respectively (||Q|| + 1) times the identity), so strong
duality holds and the optimum is attained on both sides.

The solver is a primal-dual path-following interior-point method working
directly on the complex Hermitian cone:

- iterates (X, Y, S) with X, S Hermitian positive definite;
- Nesterov-Todd scaling W, the unique positive definite matrix with
  W S W = X, computed from eigendecompositions;
- Newton directions obtained by eliminating dX and dS, leaving a small real
  symmetric positive definite system on the input space (dimension squared),
  assembled in an orthonormal Hermitian basis and solved by Cholesky;
- a Mehrotra-style adaptive centering weight from an affine predictor step,
  and a fraction-to-boundary line search along each direction.

Residual terms for infeasible iterates are carried through the Newton system,
so warm starts need not be feasible; the default start is exactly feasible
and keeps both residuals at roundoff level throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import linalg
from .exceptions import DimensionError, SolverError

DEFAULT_TOL = 1e-8
MIN_TOL = 1e-12
MAX_TOL = 1e-2
MAX_ITERATIONS = 200
STEP_FRACTION = 0.98
PSD_OBJECTIVE_TOL = 1e-9


@dataclass(frozen=True)
class CloningSdp:
    """Problem data: objective operator and the factor split of its space.

    ``dims`` lists the tensor factor dimensions of the space the objective
    acts on; the first ``n_out`` factors form the output (clone registers),
    the rest form the input.  The default treats all but the last factor as
    output, matching the (clone 1, clone 2, input) layout.
    """

    objective: np.ndarray
    dims: tuple[int, ...]
    n_out: int = -1

    def __post_init__(self):
        obj = linalg.as_hermitian(self.objective)
        dims = linalg.check_factored_dims(self.dims, obj.shape[0])
        n_out = self.n_out if self.n_out >= 0 else len(dims) - 1
        if not 1 <= n_out < len(dims):
            raise DimensionError(
                f"n_out must leave at least one input factor, got {n_out} of {len(dims)}"
            )
        min_eig = linalg.min_eigenvalue(obj)
        if min_eig < -PSD_OBJECTIVE_TOL:
            raise DimensionError(
                f"objective must be positive semidefinite, minimum eigenvalue {min_eig:.3e}"
            )
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "n_out", n_out)

    @property
    def dim(self) -> int:
        return self.objective.shape[0]

    @property
    def out_dim(self) -> int:
        return math.prod(self.dims[: self.n_out])

    @property
    def in_dim(self) -> int:
        return math.prod(self.dims[self.n_out :])

    def trace_out(self, x: np.ndarray) -> np.ndarray:
        """Partial trace over the output factors."""
        return linalg.partial_trace(
            x, (self.out_dim, self.in_dim), [1]
        )

    def lift_dual(self, y: np.ndarray) -> np.ndarray:
        """Embed an input-space operator as identity (x) y on the full space."""
        return np.kron(np.eye(self.out_dim, dtype=np.complex128), y)


@dataclass(frozen=True)
class IterateStats:
    """Per-iteration snapshot recorded by the solver."""

    iteration: int
    primal_value: float
    dual_value: float
    gap: float
    mu: float
    primal_infeasibility: float
    dual_infeasibility: float
    step_primal: float
    step_dual: float


@dataclass(frozen=True)
class Residuals:
    """Feasibility measures of a returned or checked solution pair."""

    primal_trace_defect: float
    primal_min_eigenvalue: float
    dual_min_eigenvalue: float


@dataclass(frozen=True)
class SdpSolution:
    """Solver output: primal/dual pair, values, gap, and run diagnostics."""

    primal_x: np.ndarray
    dual_y: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    residuals: Residuals
    iterations: int
    trace: tuple[IterateStats, ...] = ()
    block_solutions: tuple["SdpSolution", ...] | None = None

    def __post_init__(self):
        if self.gap < -1e-8:
            raise SolverError(
                f"solution violates weak duality: gap {self.gap:.3e}", solution=None
            )


def _hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal real basis of the d-dimensional Hermitian matrices."""
    basis = []
    s = 1.0 / math.sqrt(2.0)
    for i in range(d):
        m = np.zeros((d, d), dtype=np.complex128)
        m[i, i] = 1.0
        basis.append(m)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = s
            m[j, i] = s
            basis.append(m)
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = -1j * s
            m[j, i] = 1j * s
            basis.append(m)
    return basis


def _vec(h: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    return np.array([np.real(np.trace(b.conj().T @ h)) for b in basis])


def _unvec(coords: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    acc = np.zeros_like(basis[0])
    for c, b in zip(coords, basis):
        acc += c * b
    return acc


def _psd_power(m: np.ndarray, power: float, rel_floor: float = 1e-16) -> np.ndarray:
    """Hermitian matrix power via eigendecomposition.

    Eigenvalues are floored at ``rel_floor`` times the largest one, which caps
    the condition number of the result; roundoff can push tiny eigenvalues of
    nominally positive iterates below zero, and an uncapped negative power
    would blow the scaling up.
    """
    w, v = linalg.hermitian_eig(m)
    top = float(w[-1])
    if top <= 0.0:
        raise SolverError(f"matrix power {power} of a non-positive matrix (top eigenvalue {top:.3e})")
    w = np.maximum(w, top * rel_floor)
    return (v * (w**power)) @ v.conj().T


def _nt_scaling(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Nesterov-Todd scaling point: the positive W with W S W = X."""
    x_half = _psd_power(x, 0.5)
    inner = linalg.as_hermitian(x_half @ s @ x_half, tol=1e-8)
    inner_inv_half = _psd_power(inner, -0.5)
    return linalg.as_hermitian(x_half @ inner_inv_half @ x_half, tol=1e-8)


def _max_step(m: np.ndarray, dm: np.ndarray) -> float:
    """Largest alpha keeping m + alpha * dm positive semidefinite.

    Computed from the smallest eigenvalue of the direction in the metric of
    the current point.  Roundoff can leave the current point marginally
    indefinite near convergence, so the Cholesky factor is taken with an
    escalating diagonal shift.
    """
    n = m.shape[0]
    base = max(float(np.trace(m).real) / n, 1e-300)
    shift = 0.0
    chol = None
    for _ in range(5):
        try:
            chol = np.linalg.cholesky(m + shift * np.eye(n))
            break
        except np.linalg.LinAlgError:
            shift = 1e-14 * base if shift == 0.0 else shift * 100.0
    if chol is None:
        return 0.0
    inv_l = scipy.linalg.solve_triangular(
        chol, np.eye(n, dtype=np.complex128), lower=True, check_finite=False
    )
    scaled = inv_l @ dm @ inv_l.conj().T
    lam = float(np.linalg.eigvalsh((scaled + scaled.conj().T) / 2.0)[0])
    if lam >= 0.0:
        return np.inf
    return -1.0 / lam


def _solution_from_iterates(problem, x, y, s, iterations, stats):
    obj = problem.objective
    pval = float(np.real(np.trace(obj @ x)))
    dval = float(np.real(np.trace(y)))
    trace_defect = float(
        np.abs(problem.trace_out(x) - np.eye(problem.in_dim)).max()
    )
    residuals = Residuals(
        primal_trace_defect=trace_defect,
        primal_min_eigenvalue=linalg.min_eigenvalue(x),
        dual_min_eigenvalue=linalg.min_eigenvalue(problem.lift_dual(y) - obj),
    )
    return SdpSolution(
        primal_x=x,
        dual_y=y,
        primal_value=pval,
        dual_value=dval,
        gap=dval - pval,
        residuals=residuals,
        iterations=iterations,
        trace=tuple(stats),
    )


def solve(
    problem: CloningSdp,
    tol: float = DEFAULT_TOL,
    *,
    max_iterations: int = MAX_ITERATIONS,
    step_fraction: float = STEP_FRACTION,
    use_corrector: bool = True,
) -> SdpSolution:
    """Solve the counterfeiting SDP to the requested relative accuracy.

    Parameters
    ----------
    problem : CloningSdp
        Objective and factor structure.
    tol : float
        Relative duality-gap and feasibility target, clamped to
        [1e-12, 1e-2].  Default 1e-8.
    max_iterations : int
        Iteration cap; exhausting it raises :class:`SolverError` carrying the
        best iterate.
    step_fraction : float
        Fraction-to-boundary parameter in (0, 1).
    use_corrector : bool
        Adapt the centering weight from an affine predictor step.  Disabling
        it falls back to a fixed weight of 0.2.

    Returns
    -------
    SdpSolution
        Converged primal/dual pair with per-iteration statistics attached.
    """
    if not MIN_TOL <= tol <= MAX_TOL:
        raise ValueError(f"tol must lie in [{MIN_TOL}, {MAX_TOL}], got {tol}")
    if not 0.0 < step_fraction < 1.0:
        raise ValueError(f"step_fraction must lie in (0, 1), got {step_fraction}")

    obj = problem.objective
    n = problem.dim
    d_in = problem.in_dim
    d_out = problem.out_dim
    obj_norm = linalg.operator_norm(obj)

    if obj_norm == 0.0:
        x = np.eye(n, dtype=np.complex128) / d_out
        y = np.zeros((d_in, d_in), dtype=np.complex128)
        return _solution_from_iterates(problem, x, y, np.zeros_like(x), 0, [])

    basis = _hermitian_basis(d_in)
    eye_full = np.eye(n, dtype=np.complex128)
    eye_in = np.eye(d_in, dtype=np.complex128)

    # Strictly feasible start: X a multiple of the identity, Y far enough out
    # that the dual slack is positive definite.
    x = eye_full / d_out
    y = (obj_norm + 1.0) * eye_in
    s = linalg.as_hermitian(problem.lift_dual(y) - obj)

    obj_scale = 1.0 + abs(obj_norm)
    stats: list[IterateStats] = []
    best: tuple[float, np.ndarray, np.ndarray, np.ndarray] | None = None

    for iteration in range(1, max_iterations + 1):
        mu = float(np.real(np.trace(x @ s))) / n
        pval = float(np.real(np.trace(obj @ x)))
        dval = float(np.real(np.trace(y)))
        r_primal = eye_in - problem.trace_out(x)
        r_dual = linalg.as_hermitian(obj + s - problem.lift_dual(y), tol=1e-6)
        pinf = float(np.abs(r_primal).max())
        dinf = float(np.abs(r_dual).max())
        gap = float(np.real(np.trace(x @ s)))
        rel_gap = gap / max(1.0, (abs(pval) + abs(dval)) / 2.0)

        score = rel_gap + pinf + dinf
        if best is None or score < best[0]:
            best = (score, x.copy(), y.copy(), s.copy())

        if rel_gap <= tol and pinf <= tol * obj_scale and dinf <= tol * obj_scale:
            solution = _solution_from_iterates(problem, x, y, s, iteration - 1, stats)
            return solution

        w = _nt_scaling(x, s)
        w4 = w.reshape(d_out, d_in, d_out, d_in)
        # Gram tensor of the Schur complement map dY -> trace_out(W (1 x dY) W):
        # N(H)[i, j] = sum_{a, c, k, l} W[(a,i),(c,k)] H[k,l] W[(c,l),(a,j)].
        gram = np.einsum("aick,claj->ijkl", w4, w4)
        m = np.empty((d_in * d_in, d_in * d_in))
        for jj, hj in enumerate(basis):
            mj = np.einsum("ijkl,kl->ij", gram, hj)
            for ii, hi in enumerate(basis):
                m[ii, jj] = float(np.vdot(hi, mj).real)
        m = (m + m.T) / 2.0
        try:
            chol = scipy.linalg.cho_factor(m, check_finite=False)
            solve_m = lambda rhs: scipy.linalg.cho_solve(chol, rhs, check_finite=False)
        except scipy.linalg.LinAlgError:
            jitter = 1e-13 * max(1.0, np.trace(m) / m.shape[0])
            m_reg = m + jitter * np.eye(m.shape[0])
            solve_m = lambda rhs: np.linalg.solve(m_reg, rhs)

        s_inv = _psd_power(s, -1.0)

        def newton_direction(r_center):
            rhs_op = problem.trace_out(r_center + w @ r_dual @ w) - r_primal
            dy = _unvec(solve_m(_vec(rhs_op, basis)), basis)
            ds = linalg.as_hermitian(problem.lift_dual(dy) - r_dual, tol=1e-6)
            dx = linalg.as_hermitian(r_center - w @ ds @ w, tol=1e-6)
            return dx, dy, ds

        if use_corrector:
            dx_aff, _, ds_aff = newton_direction(-x)
            alpha_p_aff = min(1.0, step_fraction * _max_step(x, dx_aff))
            alpha_d_aff = min(1.0, step_fraction * _max_step(s, ds_aff))
            mu_aff = float(
                np.real(np.trace((x + alpha_p_aff * dx_aff) @ (s + alpha_d_aff * ds_aff)))
            ) / n
            sigma = min(1.0, max((mu_aff / mu) ** 3, 0.0)) if mu > 0 else 0.1
        else:
            sigma = 0.2

        dx, dy, ds = newton_direction(sigma * mu * s_inv - x)
        alpha_p = min(1.0, step_fraction * _max_step(x, dx))
        alpha_d = min(1.0, step_fraction * _max_step(s, ds))

        x = linalg.as_hermitian(x + alpha_p * dx, tol=1e-6)
        y = linalg.as_hermitian(y + alpha_d * dy, tol=1e-6)
        s = linalg.as_hermitian(s + alpha_d * ds, tol=1e-6)

        stats.append(
            IterateStats(
                iteration=iteration,
                primal_value=float(np.real(np.trace(obj @ x))),
                dual_value=float(np.real(np.trace(y))),
                gap=float(np.real(np.trace(x @ s))),
                mu=mu,
                primal_infeasibility=pinf,
                dual_infeasibility=dinf,
                step_primal=alpha_p,
                step_dual=alpha_d,
            )
        )

    _, bx, by, bs = best
    partial = _solution_from_iterates(problem, bx, by, bs, max_iterations, stats)
    raise SolverError(
        f"no convergence to tol {tol:.1e} within {max_iterations} iterations; "
        f"best relative gap {best[0]:.3e}",
        solution=partial,
    )


def dual_norm_bound(problem: CloningSdp) -> tuple[np.ndarray, float]:
    """The closed-form dual point ||Q|| times the identity and its objective value.

    Feasible by construction since lifting multiplies the identity by the
    output identity, and optimal exactly when the problem admits a flat dual
    optimum.  The value is in_dim * ||Q||.
    """
    norm = linalg.operator_norm(problem.objective)
    y = norm * np.eye(problem.in_dim, dtype=np.complex128)
    return y, float(problem.in_dim * norm)


def assemble_block_sdp(blocks: list[CloningSdp], weights: list[float]) -> CloningSdp:
    """Combine weighted same-shape subproblems into one problem.

    The combined space inserts a block-index factor at the head of the input
    group, and the combined objective is the direct sum of the weighted block
    objectives.  Feasible points decompose into one feasible point per block,
    so the combined optimal value is the weighted sum of block values.
    """
    if not blocks or len(blocks) != len(weights):
        raise DimensionError("need matching non-empty block and weight lists")
    first = blocks[0]
    if any(b.dims != first.dims or b.n_out != first.n_out for b in blocks):
        raise DimensionError("blocks must share one factor structure")
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise DimensionError("weights must be nonnegative and sum to 1")
    k = len(blocks)
    d_out, d_in = first.out_dim, first.in_dim
    big = np.zeros((d_out, k, d_in, d_out, k, d_in), dtype=np.complex128)
    for i, (b, wgt) in enumerate(zip(blocks, weights)):
        big[:, i, :, :, i, :] = wgt * b.objective.reshape(d_out, d_in, d_out, d_in)
    dims = first.dims[: first.n_out] + (k,) + first.dims[first.n_out :]
    total = d_out * k * d_in
    return CloningSdp(big.reshape(total, total), dims, n_out=first.n_out)


def solve_block_diagonal(
    blocks: list[CloningSdp], weights: list[float], tol: float = DEFAULT_TOL
) -> SdpSolution:
    """Solve weighted same-shape subproblems and assemble one solution.

    Each block is solved independently; the returned primal/dual pair lives on
    the combined space of :func:`assemble_block_sdp` and its value is the
    weighted sum of the block values.  Per-block solutions are kept on
    ``block_solutions``.
    """
    combined = assemble_block_sdp(blocks, weights)
    solutions = [solve(b, tol=tol) for b in blocks]
    k = len(blocks)
    d_out, d_in = blocks[0].out_dim, blocks[0].in_dim
    big_x = np.zeros((d_out, k, d_in, d_out, k, d_in), dtype=np.complex128)
    big_y = np.zeros((k, d_in, k, d_in), dtype=np.complex128)
    for i, (sol, wgt) in enumerate(zip(solutions, weights)):
        big_x[:, i, :, :, i, :] = sol.primal_x.reshape(d_out, d_in, d_out, d_in)
        big_y[i, :, i, :] = wgt * sol.dual_y
    total = d_out * k * d_in
    x = linalg.as_hermitian(big_x.reshape(total, total))
    y = linalg.as_hermitian(big_y.reshape(k * d_in, k * d_in))
    pval = float(sum(w * s.primal_value for w, s in zip(weights, solutions)))
    dval = float(sum(w * s.dual_value for w, s in zip(weights, solutions)))
    residuals = Residuals(
        primal_trace_defect=float(
            np.abs(combined.trace_out(x) - np.eye(combined.in_dim)).max()
        ),
        primal_min_eigenvalue=linalg.min_eigenvalue(x),
        dual_min_eigenvalue=linalg.min_eigenvalue(combined.lift_dual(y) - combined.objective),
    )
    return SdpSolution(
        primal_x=x,
        dual_y=y,
        primal_value=pval,
        dual_value=dval,
        gap=dval - pval,
        residuals=residuals,
        iterations=max(s.iterations for s in solutions),
        trace=(),
        block_solutions=tuple(solutions),
    )
