"""Encoding of complex vectors and matrices as nested [re, im] pairs."""

from __future__ import annotations

import numpy as np

from .exceptions import FileFormatError


def complex_to_pairs(arr: np.ndarray) -> list:
    """Encode a complex vector or matrix as nested [re, im] lists."""
    a = np.asarray(arr, dtype=np.complex128)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    if a.ndim == 2:
        return [[[float(z.real), float(z.imag)] for z in row] for row in a]
    raise FileFormatError(f"cannot encode an array of rank {a.ndim}")


def _pair_to_complex(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        raise FileFormatError(f"{where}: expected a [re, im] number pair, got {entry!r}")
    return complex(float(entry[0]), float(entry[1]))


def pairs_to_vector(data, where: str = "vector") -> np.ndarray:
    """Decode a list of [re, im] pairs into a complex vector."""
    if not isinstance(data, (list, tuple)) or not data:
        raise FileFormatError(f"{where}: expected a non-empty list of [re, im] pairs")
    return np.array([_pair_to_complex(e, where) for e in data], dtype=np.complex128)


def pairs_to_matrix(data, where: str = "matrix") -> np.ndarray:
    """Decode nested [re, im] pairs into a complex matrix."""
    if not isinstance(data, (list, tuple)) or not data:
        raise FileFormatError(f"{where}: expected a non-empty list of rows")
    rows = [pairs_to_vector(row, where) for row in data]
    width = rows[0].size
    if any(r.size != width for r in rows):
        raise FileFormatError(f"{where}: ragged rows")
    return np.vstack(rows)
