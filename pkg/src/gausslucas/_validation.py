"""Input checks shared by the estimators.

scikit-learn's ``check_array`` rejects complex input, so points in C^M
are validated here: a complex array of shape (n, M), a real array of
shape (n, 2M) holding interleaved (re, im) pairs, or a 1D array of
points in C (real entries are real points).
"""
from __future__ import annotations

import numpy as np


def check_complex_points(X, n_coords: int | None = None, allow_empty: bool = False) -> np.ndarray:
    """Return a complex array of shape (n, M)."""
    arr = np.asarray(X)
    if arr.dtype == object:
        arr = np.asarray(arr.tolist(), dtype=complex)
    if np.iscomplexobj(arr):
        arr = arr.astype(complex)
        if arr.ndim == 1:
            arr = arr[:, None]
    else:
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 1:
            arr = np.stack([arr, np.zeros_like(arr)], axis=1)
        if arr.ndim != 2 or arr.shape[1] % 2:
            raise ValueError("real input must have shape (n, 2M) of (re, im) pairs, "
                             f"got {arr.shape}")
        arr = arr[:, 0::2] + 1j * arr[:, 1::2]
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D array of points, got shape {arr.shape}")
    if not allow_empty and arr.shape[0] == 0:
        raise ValueError("empty point set")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    if n_coords is not None and arr.shape[1] != n_coords:
        raise ValueError(f"expected points in C^{n_coords}, got C^{arr.shape[1]}")
    return arr


def check_roots(X) -> np.ndarray:
    """1D complex vector of non-zero roots."""
    arr = np.asarray(X, dtype=complex).ravel()
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("roots must be finite")
    if np.any(arr == 0):
        raise ValueError("roots of the canonical factor must be non-zero")
    return arr
