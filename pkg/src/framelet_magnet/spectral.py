"""Hermitian eigendecomposition and spectral bookkeeping for the exact transform."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure

UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of a Hermitian matrix, eigenvalues ascending.

    Column k of ``eigenvectors`` pairs with ``eigenvalues[k]``. Eigenvector
    phase and ordering inside degenerate eigenspaces are unconstrained;
    downstream quantities are basis-invariant.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    @property
    def lambda_max(self):
        return float(self.eigenvalues[-1])


def eig_hermitian(lap) -> EigenSystem:
    """Full eigendecomposition of a Hermitian matrix.

    Accepts a MagneticLaplacian or a raw Hermitian ndarray. Raises
    ConvergenceFailure if the solver fails or the result violates the
    unitarity / reconstruction contract, rather than returning garbage.
    """
    matrix = np.asarray(getattr(lap, "matrix", lap), dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ConvergenceFailure(f"expected a square matrix, got shape {matrix.shape}")
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"dense Hermitian eigensolver failed: {exc}") from exc
    n = matrix.shape[0]
    unitarity = np.max(np.abs(vectors.conj().T @ vectors - np.eye(n)))
    if not unitarity < UNITARITY_TOL:
        raise ConvergenceFailure(f"eigenvector unitarity residual {unitarity:.3e}")
    residual = np.max(np.abs((vectors * values) @ vectors.conj().T - matrix))
    if not residual < RECONSTRUCTION_TOL:
        raise ConvergenceFailure(f"eigendecomposition residual {residual:.3e}")
    return EigenSystem(eigenvalues=values, eigenvectors=vectors)


def dilation_base(lambda_max: float) -> int:
    """Smallest non-negative integer M with lambda_max <= 2^M * pi.

    Normalized magnetic Laplacians have spectrum inside [0, 2], so M = 0
    for every graph built here; larger spectra dilate upward.
    """
    if lambda_max < 0:
        raise ValueError(f"lambda_max must be non-negative, got {lambda_max}")
    m = 0
    while lambda_max > (2.0**m) * np.pi:
        m += 1
    return m
