"""Dense linear algebra kernels for operators on tensor-product spaces.

Conventions used across the package:

- Vectors and matrices are numpy arrays with complex128 entries.  A ket is a
  one-dimensional array; an operator on a space of dimension n is an (n, n)
  array with row-major index order.
- A tensor-product space is described by its factored dimensions, a tuple of
  positive integers whose product is the total dimension.  Composite indices
  are row-major: factor 0 is the most significant.
- Hermitian operators are symmetrized at the boundary by :func:`as_hermitian`,
  which repairs roundoff-sized defects and rejects anything larger.

Everything here is dense.  The problem sizes in this package top out around a
few hundred dimensions, where dense LAPACK kernels are both faster and more
trustworthy than sparse alternatives.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DimensionError, EigendecompositionError, HermiticityError

HERMITICITY_TOL = 1e-12


def as_hermitian(mat: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return the Hermitian part (m + m†)/2 of a nearly Hermitian matrix.

    Entrywise defects up to ``tol`` (relative to the largest entry) are treated
    as roundoff and silently repaired.  A larger defect is a logic error
    somewhere upstream, so it raises instead of being averaged away.
    """
    m = np.asarray(mat, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise HermiticityError("matrix has non-finite entries")
    defect = np.abs(m - m.conj().T).max() if m.size else 0.0
    scale = max(1.0, np.abs(m).max()) if m.size else 1.0
    if defect > tol * scale:
        raise HermiticityError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds {tol:.1e} * {scale:.3e}"
        )
    return (m + m.conj().T) / 2


def check_factored_dims(dims: Sequence[int], total: int | None = None) -> tuple[int, ...]:
    """Validate a tuple of factor dimensions, optionally against a total dimension."""
    out = tuple(int(d) for d in dims)
    if not out or any(d < 1 for d in out):
        raise DimensionError(f"factored dimensions must be positive, got {dims}")
    if total is not None and math.prod(out) != total:
        raise DimensionError(
            f"factored dimensions {out} have product {math.prod(out)}, expected {total}"
        )
    return out


def kron(a: np.ndarray, b: np.ndarray, *more: np.ndarray) -> np.ndarray:
    """Kronecker product of two or more matrices, row-major composite order."""
    out = np.kron(np.asarray(a), np.asarray(b))
    for m in more:
        out = np.kron(out, np.asarray(m))
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def outer(u: np.ndarray, v: np.ndarray | None = None) -> np.ndarray:
    """Rank-one operator |u><v| (|u><u| when v is omitted)."""
    u = np.asarray(u, dtype=np.complex128).ravel()
    w = u if v is None else np.asarray(v, dtype=np.complex128).ravel()
    return np.outer(u, w.conj())


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    Parameters
    ----------
    m : ndarray
        Operator on the full space, shape (N, N) with N = prod(dims).
    dims : sequence of int
        Dimension of each tensor factor, most significant first.
    keep : iterable of int
        Indices of the factors to retain, in their original order.

    Returns
    -------
    ndarray
        Operator on the retained factors, shape (K, K) with
        K = prod(dims[i] for i in keep).
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    dims = check_factored_dims(dims, m.shape[0])
    k = len(dims)
    kept = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= k for i in kept):
        raise DimensionError(f"keep indices {kept} out of range for {k} factors")
    tensor = m.reshape(dims + dims)
    row = list(range(k))
    col = [i + k if i in kept else i for i in range(k)]
    out = [i for i in kept] + [i + k for i in kept]
    reduced = np.einsum(tensor, row + col, out)
    kept_dim = math.prod(dims[i] for i in kept) if kept else 1
    return np.ascontiguousarray(reduced.reshape(kept_dim, kept_dim))


def partial_transpose(m: np.ndarray, dims: Sequence[int], which: Iterable[int]) -> np.ndarray:
    """Transpose the listed tensor factors in place of the full transpose.

    The transpose is taken entrywise in the standard basis of each listed
    factor, matching the convention used when pairing channel outputs with
    conjugated input states.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    dims = check_factored_dims(dims, m.shape[0])
    k = len(dims)
    chosen = sorted(set(int(i) for i in which))
    if any(i < 0 or i >= k for i in chosen):
        raise DimensionError(f"transpose indices {chosen} out of range for {k} factors")
    tensor = m.reshape(dims + dims)
    axes = list(range(2 * k))
    for i in chosen:
        axes[i], axes[i + k] = axes[i + k], axes[i]
    return np.ascontiguousarray(tensor.transpose(axes).reshape(m.shape))


def permutation_operator(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Unitary sending tensor factor j of the input to slot perm[j] of the output.

    With this convention the operators compose covariantly: for equal factor
    dimensions, ``permutation_operator(dims, sigma) @ permutation_operator(dims, tau)``
    equals ``permutation_operator(dims, [sigma[tau[j]] for j in ...])``.
    """
    dims = check_factored_dims(dims)
    k = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(k)):
        raise DimensionError(f"{perm} is not a permutation of 0..{k - 1}")
    total = math.prod(dims)
    tensor = np.eye(total, dtype=np.complex128).reshape(dims + dims)
    row_axes = [0] * k
    for j in range(k):
        row_axes[perm[j]] = j
    tensor = tensor.transpose(row_axes + list(range(k, 2 * k)))
    return np.ascontiguousarray(tensor.reshape(total, total))


def symmetric_projector(d: int, k: int) -> np.ndarray:
    """Orthogonal projector onto the symmetric subspace of k copies of C^d.

    Computed as the average of all k! permutation operators.  The projector
    has rank C(d + k - 1, k).
    """
    if d < 1 or k < 1:
        raise DimensionError(f"need d >= 1 and k >= 1, got d={d}, k={k}")
    dims = (d,) * k
    total = d**k
    acc = np.zeros((total, total), dtype=np.complex128)
    for perm in itertools.permutations(range(k)):
        acc += permutation_operator(dims, perm)
    return as_hermitian(acc / math.factorial(k), tol=1e-10)


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a Hermitian matrix.

    Returns
    -------
    (w, V)
        Eigenvalues ``w`` in ascending order and a unitary ``V`` whose columns
        are the matching eigenvectors, so that (V * w) @ V.conj().T
        reconstructs the input.

    Raises
    ------
    EigendecompositionError
        If the underlying factorization fails to converge.  The message
        carries the matrix size and norm for diagnosis.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        scale = np.abs(m).max() if m.size else 0.0
        raise EigendecompositionError(
            f"eigendecomposition failed for a {m.shape[0]}x{m.shape[0]} matrix "
            f"(max entry {scale:.3e}): {exc}"
        ) from exc
    return w, v


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending."""
    return hermitian_eig(m)[0]


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(eigenvalues(m)[0])


def operator_norm(m: np.ndarray) -> float:
    """Spectral norm of a Hermitian matrix (largest absolute eigenvalue)."""
    w = eigenvalues(m)
    return float(max(-w[0], w[-1], 0.0))
