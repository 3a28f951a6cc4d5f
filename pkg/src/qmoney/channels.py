"""Quantum channels as Choi operators, and attack success probabilities.

A channel from a d-dimensional input space to an m-dimensional output space
is stored by its Choi operator, the m*d dimensional positive operator built by
applying the channel to one half of an unnormalized maximally entangled state.
Factor order is output first, input last, so for a counterfeiting channel with
two clone registers the factors read (clone 1, clone 2, input copy).

Two facts carry the whole package:

- complete positivity of the channel is positive semidefiniteness of the Choi
  operator, and trace preservation is the statement that tracing out the
  output factor leaves the identity on the input factor;
- the overlap of a channel output with a pure target state is a quadratic
  form in the Choi operator, with the input state entering entrywise
  conjugated in the standard basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import ChannelValidationError, DimensionError

CP_TOL = 1e-9
TP_TOL = 1e-9
KRAUS_TOL = 1e-10
CROSS_CHECK_TOL = 1e-12


@dataclass(frozen=True)
class ChoiOperator:
    """Choi operator of a completely positive trace-preserving map.

    Attributes
    ----------
    matrix : ndarray
        Hermitian PSD matrix of size (out_dim * in_dim) squared, output
        factor first, input factor last.
    in_dim, out_dim : int
        Input and output space dimensions.
    """

    matrix: np.ndarray
    in_dim: int
    out_dim: int

    def __post_init__(self):
        mat = linalg.as_hermitian(self.matrix)
        object.__setattr__(self, "matrix", mat)
        if self.in_dim < 1 or self.out_dim < 1:
            raise DimensionError(f"dimensions must be positive, got {self.in_dim}, {self.out_dim}")
        n = self.in_dim * self.out_dim
        if mat.shape != (n, n):
            raise DimensionError(
                f"Choi matrix has shape {mat.shape}, expected {(n, n)} "
                f"for out_dim {self.out_dim} and in_dim {self.in_dim}"
            )
        min_eig = linalg.min_eigenvalue(mat)
        if min_eig < -CP_TOL:
            raise ChannelValidationError(
                f"channel is not completely positive: minimum Choi eigenvalue {min_eig:.3e}"
            )
        reduced = linalg.partial_trace(mat, (self.out_dim, self.in_dim), [1])
        defect = np.abs(reduced - np.eye(self.in_dim)).max()
        if defect > TP_TOL:
            raise ChannelValidationError(
                f"channel is not trace preserving: partial trace defect {defect:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.in_dim * self.out_dim


def validate_kraus(kraus: list[np.ndarray], tol: float = KRAUS_TOL) -> list[np.ndarray]:
    """Check a Kraus family for shape consistency and the completeness sum."""
    if not kraus:
        raise ChannelValidationError("empty Kraus family")
    mats = [np.asarray(a, dtype=np.complex128) for a in kraus]
    shape = mats[0].shape
    if len(shape) != 2:
        raise DimensionError(f"Kraus operators must be matrices, got shape {shape}")
    if any(a.shape != shape for a in mats):
        raise DimensionError("Kraus operators must share one shape")
    total = sum(a.conj().T @ a for a in mats)
    defect = np.abs(total - np.eye(shape[1])).max()
    if defect > tol:
        raise ChannelValidationError(
            f"Kraus completeness sum deviates from the identity by {defect:.3e}"
        )
    return mats


def choi_from_kraus(kraus: list[np.ndarray], tol: float = KRAUS_TOL) -> ChoiOperator:
    """Assemble the Choi operator of the channel with the given Kraus family.

    Each Kraus operator A contributes the rank-one term vec(A) vec(A)*, where
    vec stacks rows, which places the output factor first and the input factor
    last as required.
    """
    mats = validate_kraus(kraus, tol)
    out_dim, in_dim = mats[0].shape
    acc = np.zeros((out_dim * in_dim,) * 2, dtype=np.complex128)
    for a in mats:
        v = a.reshape(-1)
        acc += np.outer(v, v.conj())
    return ChoiOperator(matrix=acc, in_dim=in_dim, out_dim=out_dim)


def apply_channel(choi: ChoiOperator, rho: np.ndarray) -> np.ndarray:
    """Apply the channel to an input operator.

    The action is recovered from the Choi operator by pairing the input factor
    with the transpose of rho and tracing it out.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    d = choi.in_dim
    if rho.shape != (d, d):
        raise DimensionError(f"input has shape {rho.shape}, channel expects {(d, d)}")
    j = choi.matrix.reshape(choi.out_dim, d, choi.out_dim, d)
    return np.einsum("aibj,ij->ab", j, rho)


def identity_choi(d: int) -> ChoiOperator:
    """Choi operator of the identity channel on C^d."""
    return choi_from_kraus([np.eye(d)])


def pair_with_conjugate(choi: ChoiOperator, target: np.ndarray, state: np.ndarray) -> float:
    """Overlap of the channel output on |state> with the pure |target>.

    Evaluates the quadratic form <target (x) conj(state)| J |target (x) conj(state)>,
    which equals <target| Phi(|state><state|) |target> for the channel Phi
    with Choi operator J.
    """
    target = np.asarray(target, dtype=np.complex128).ravel()
    state = np.asarray(state, dtype=np.complex128).ravel()
    if target.size != choi.out_dim or state.size != choi.in_dim:
        raise DimensionError(
            f"target/state sizes {target.size}/{state.size} do not match "
            f"channel dims {choi.out_dim}/{choi.in_dim}"
        )
    vec = np.kron(target, state.conj())
    return float(np.real(vec.conj() @ choi.matrix @ vec))


def success_probability(choi: ChoiOperator, ensemble) -> float:
    """Probability that both clones pass verification, averaged over the ensemble.

    For each ensemble state the counterfeiter feeds it to the channel and the
    issuer projects both output registers onto the state.  The value is
    computed along two independent routes, by applying the channel and taking
    the expectation directly, and through the Choi quadratic form with the
    conjugated input, and the two must agree to 1e-12.
    """
    d = ensemble.dim
    if choi.in_dim != d or choi.out_dim != d * d:
        raise DimensionError(
            f"channel dims ({choi.out_dim}, {choi.in_dim}) do not match a "
            f"two-clone attack on dimension {d}"
        )
    direct = 0.0
    quad = 0.0
    for weight, psi in ensemble.items:
        target = np.kron(psi, psi)
        out = apply_channel(choi, np.outer(psi, psi.conj()))
        direct += weight * float(np.real(target.conj() @ out @ target))
        quad += weight * pair_with_conjugate(choi, target, psi)
    if abs(direct - quad) > CROSS_CHECK_TOL:
        raise ChannelValidationError(
            f"success probability routes disagree: {direct!r} vs {quad!r}"
        )
    if not -1e-9 <= direct <= 1 + 1e-9:
        raise ChannelValidationError(f"success probability {direct!r} outside [0, 1]")
    return min(1.0, max(0.0, direct))
