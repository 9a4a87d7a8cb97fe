"""Chebyshev fitting, evaluation, and matrix application tests.

The matrix-application oracle is the dense eigendecomposition: applying a
fitted filter to a Hermitian matrix must match evaluating the same
expansion on its eigenvalues. Backend parity pins the compiled kernel to
the NumPy fallback bitwise.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from framelet_magnet import _cheb_numpy
from framelet_magnet.banks import make_bank
from framelet_magnet.chebyshev import (
    HAVE_COMPILED_KERNEL,
    CsrHermitian,
    chebyshev_apply,
    chebyshev_eval,
    chebyshev_fit,
    kernel_backend,
)
from framelet_magnet.graphs import Digraph, magnetic_laplacian_sparse


def _random_digraph(rng, n_nodes, p=0.3):
    mask = rng.random((n_nodes, n_nodes)) < p
    np.fill_diagonal(mask, False)
    return Digraph(n_nodes, [tuple(e) for e in np.argwhere(mask)])


def test_fit_reproduces_polynomials_exactly():
    def poly(d):
        return 0.3 * d**3 - d + 2.0

    coeffs = chebyshev_fit(poly, degree=5)
    grid = np.linspace(0.0, np.pi, 101)
    assert np.abs(chebyshev_eval(coeffs, grid) - poly(grid)).max() < 1e-12
    with pytest.raises(ValueError):
        chebyshev_fit(poly, degree=0)


def test_eval_matches_numpy_chebyshev():
    rng = np.random.default_rng(2)
    for _ in range(5):
        coeffs = rng.standard_normal(9)
        grid = np.linspace(0.0, np.pi, 67)
        mine = chebyshev_eval(coeffs, grid)
        reference = np.polynomial.chebyshev.chebval(2.0 * grid / np.pi - 1.0, coeffs)
        assert np.abs(mine - reference).max() < 1e-12


def test_fit_error_decays_for_smooth_filters():
    bank = make_bank("haar")
    grid = np.linspace(0.0, np.pi, 501)
    errs = []
    for degree in (4, 8, 16):
        coeffs = chebyshev_fit(lambda d: bank(0, d), degree)
        errs.append(np.abs(chebyshev_eval(coeffs, grid) - bank(0, grid)).max())
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 1e-10


def test_csr_container_round_trip():
    rng = np.random.default_rng(4)
    dense = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    dense = 0.5 * (dense + dense.conj().T)
    op = CsrHermitian.from_dense(dense)
    assert op.n == 6
    assert op.indptr.dtype == np.int64 and op.indices.dtype == np.int64
    assert np.abs(op.to_dense() - dense).max() == 0.0
    assert np.abs(op.scipy_csr.toarray() - dense).max() == 0.0


def test_apply_matches_dense_eigen_oracle():
    rng = np.random.default_rng(6)
    bank = make_bank("linear")
    for trial in range(4):
        g = _random_digraph(rng, 11)
        lap = magnetic_laplacian_sparse(g, 0.25)
        op = CsrHermitian.from_scipy(lap)
        values, vectors = np.linalg.eigh(lap.toarray())
        for degree in (1, 5, 32):
            coeffs = chebyshev_fit(lambda d: bank(1, d), degree)
            for alpha in (2.0 / np.pi, 1.0 / np.pi):
                x = rng.standard_normal((11, 3)) + 1j * rng.standard_normal((11, 3))
                got = chebyshev_apply(op, alpha, coeffs, x)
                # Oracle: evaluate the expansion on the spectrum directly.
                filt = np.polynomial.chebyshev.chebval(alpha * values - 1.0, coeffs)
                want = (vectors * filt) @ (vectors.conj().T @ x)
                assert np.abs(got - want).max() < 1e-10


def test_apply_shapes_and_edge_cases():
    rng = np.random.default_rng(8)
    g = _random_digraph(rng, 7)
    op = CsrHermitian.from_scipy(magnetic_laplacian_sparse(g, 0.1))
    coeffs = chebyshev_fit(lambda d: np.cos(d), 8)
    x1 = rng.standard_normal(7)
    col = chebyshev_apply(op, 2.0 / np.pi, coeffs, x1[:, None])
    vec = chebyshev_apply(op, 2.0 / np.pi, coeffs, x1)
    assert vec.shape == (7,)
    assert np.array_equal(col[:, 0], vec)
    with pytest.raises(ValueError):
        chebyshev_apply(op, 1.0, coeffs, np.zeros(6))
    # Single coefficient short-circuits to c_0 * x.
    only = chebyshev_apply(op, 1.0, np.array([2.5]), x1)
    assert np.array_equal(only, 2.5 * x1.astype(np.complex128))


def test_apply_handles_zero_matrix():
    # alpha * 0 - I = -I, so T_k contributes (-1)^k.
    op = CsrHermitian.from_dense(np.zeros((4, 4)))
    coeffs = np.array([0.5, 0.25, -0.125])
    x = np.arange(4, dtype=np.complex128)
    got = chebyshev_apply(op, 2.0 / np.pi, coeffs, x)
    factor = coeffs[0] - coeffs[1] + coeffs[2] * (2.0 * (-1.0) ** 2 - 1.0)
    assert np.abs(got - factor * x).max() < 1e-15


@pytest.mark.skipif(not HAVE_COMPILED_KERNEL, reason="compiled kernel not built")
def test_backend_parity_bitwise():
    from framelet_magnet import _cheb_kernel

    rng = np.random.default_rng(10)
    for trial in range(6):
        n = int(rng.integers(2, 40))
        d = int(rng.integers(1, 9))
        g = _random_digraph(rng, n, p=0.25)
        op = CsrHermitian.from_scipy(magnetic_laplacian_sparse(g, 0.25))
        coeffs = rng.standard_normal(int(rng.integers(2, 40)))
        x = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        x = np.ascontiguousarray(x)
        compiled = _cheb_kernel.cheb_apply(
            op.indptr, op.indices, op.data, 2.0 / np.pi, coeffs, x
        )
        fallback = _cheb_numpy.cheb_apply(op.scipy_csr, 2.0 / np.pi, coeffs, x)
        assert np.array_equal(compiled, fallback)


def test_pure_python_env_override():
    env = {**os.environ, "FRAMELET_MAGNET_PURE": "1"}
    out = subprocess.run(
        [sys.executable, "-c", "import framelet_magnet; print(framelet_magnet.kernel_backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"
    assert kernel_backend() in ("compiled", "numpy")
