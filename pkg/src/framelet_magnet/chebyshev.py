"""Chebyshev polynomial fitting and matrix-free application.

Filters on [0, pi] are expanded in Chebyshev polynomials under the affine map
delta = (t + 1) * pi / 2. Applying the expansion to a Hermitian matrix Y with
spectrum in [0, pi] reduces to the three-term recurrence
T_0(X) = I, T_1(X) = X, T_{k+1}(X) = 2 X T_k(X) - T_{k-1}(X) on the shifted
operator X = (2/pi) Y - I, which only ever needs sparse matrix-vector
products.

The recurrence is the hot inner loop of the fast transform. A compiled
Cython kernel is used when available; otherwise a NumPy/SciPy fallback with
identical semantics is selected at import time. Set FRAMELET_MAGNET_PURE=1
to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import _cheb_numpy

if os.environ.get("FRAMELET_MAGNET_PURE", "") not in ("", "0"):
    _kernel = None
else:
    try:
        from . import _cheb_kernel as _kernel
    except ImportError:
        _kernel = None

HAVE_COMPILED_KERNEL = _kernel is not None


def kernel_backend() -> str:
    """Name of the recurrence backend selected at import time."""
    return "compiled" if HAVE_COMPILED_KERNEL else "numpy"


@dataclass(frozen=True)
class CsrHermitian:
    """Minimal CSR container for a Hermitian matrix, kernel-ready dtypes."""

    n: int
    indptr: np.ndarray  # int64, length n+1
    indices: np.ndarray  # int64, length nnz
    data: np.ndarray  # complex128, length nnz

    @classmethod
    def from_scipy(cls, matrix) -> "CsrHermitian":
        csr = sp.csr_matrix(matrix)
        csr.sum_duplicates()
        return cls(
            n=csr.shape[0],
            indptr=np.ascontiguousarray(csr.indptr, dtype=np.int64),
            indices=np.ascontiguousarray(csr.indices, dtype=np.int64),
            data=np.ascontiguousarray(csr.data, dtype=np.complex128),
        )

    @classmethod
    def from_dense(cls, matrix) -> "CsrHermitian":
        return cls.from_scipy(sp.csr_matrix(np.asarray(matrix, dtype=np.complex128)))

    @cached_property
    def scipy_csr(self):
        return sp.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.n, self.n)
        )

    def to_dense(self):
        return self.scipy_csr.toarray()


def chebyshev_fit(f, degree: int) -> np.ndarray:
    """Chebyshev expansion coefficients of a scalar function on [0, pi].

    Computed by Chebyshev-Gauss quadrature at degree+1 nodes; polynomials of
    degree <= `degree` are reproduced exactly (up to rounding), and for
    functions analytic near [0, pi] the sup error decays geometrically.
    """
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    n = degree + 1
    j = np.arange(n)
    angles = np.pi * (j + 0.5) / n
    nodes = np.cos(angles)
    values = np.asarray(f((nodes + 1.0) * np.pi / 2.0), dtype=np.float64)
    coeffs = np.empty(n)
    for k in range(n):
        coeffs[k] = (2.0 / n) * np.dot(values, np.cos(k * angles))
    coeffs[0] *= 0.5
    return coeffs


def chebyshev_eval(coeffs, delta):
    """Evaluate a fitted expansion at scalar arguments in [0, pi] (Clenshaw)."""
    t = 2.0 * np.asarray(delta, dtype=np.float64) / np.pi - 1.0
    b_next = np.zeros_like(t)
    b_cur = np.zeros_like(t)
    for c in coeffs[:0:-1]:
        b_cur, b_next = 2.0 * t * b_cur - b_next + c, b_cur
    return t * b_cur - b_next + coeffs[0]


def chebyshev_apply(op: CsrHermitian, alpha: float, coeffs, x):
    """Apply sum_k c_k T_k(alpha * L - I) to an N x D signal, matrix-free.

    `alpha` maps the spectrum of L into the Chebyshev domain [-1, 1]; for a
    filter fitted on [0, pi] and evaluated at L / 2^s, alpha = (2/pi) / 2^s.
    Cost is O(K * nnz * D); no dense matrix is ever formed.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    signal = np.asarray(x, dtype=np.complex128)
    single = signal.ndim == 1
    if single:
        signal = signal[:, None]
    if signal.shape[0] != op.n:
        raise ValueError(f"signal has {signal.shape[0]} rows, operator expects {op.n}")
    signal = np.ascontiguousarray(signal)
    if _kernel is not None:
        out = _kernel.cheb_apply(
            op.indptr, op.indices, op.data, float(alpha), coeffs, signal
        )
    else:
        out = _cheb_numpy.cheb_apply(op.scipy_csr, float(alpha), coeffs, signal)
    return out[:, 0] if single else out
