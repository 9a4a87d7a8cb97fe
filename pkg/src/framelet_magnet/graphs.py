"""Directed graphs, adjacency decomposition, and the magnetic Laplacian.

A digraph is stored as an immutable edge list over ``n_nodes`` vertices.
The adjacency matrix splits into a symmetric part ``(A + A^T) / 2`` and a
skew-symmetric part ``A - A^T``; the normalized magnetic Laplacian combines
the degree-normalized symmetric part with unit-modulus phases
``exp(2*pi*1j*q * skew)`` that encode edge direction. The result is a
complex Hermitian, positive semi-definite matrix with spectrum in [0, 2].
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DataFormatError, InvalidCharge

CHARGE_MIN = 0.0
CHARGE_MAX = 0.25


@dataclass(frozen=True)
class Digraph:
    """Unweighted directed graph without self-loops or multi-edges."""

    n_nodes: int
    edges: tuple

    def __init__(self, n_nodes, edges):
        if n_nodes < 1:
            raise DataFormatError(f"need at least one node, got {n_nodes}")
        seen = set()
        clean = []
        for edge in edges:
            i, j = edge
            i, j = int(i), int(j)
            if not (0 <= i < n_nodes and 0 <= j < n_nodes):
                raise DataFormatError(f"edge ({i}, {j}) outside node range [0, {n_nodes})")
            if i == j:
                raise DataFormatError(f"self-loop at node {i} is not allowed")
            if (i, j) in seen:
                raise DataFormatError(f"duplicate edge ({i}, {j}); multi-edges are rejected")
            seen.add((i, j))
            clean.append((i, j))
        object.__setattr__(self, "n_nodes", int(n_nodes))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def edge_set(self):
        return frozenset(self.edges)

    @cached_property
    def adjacency(self):
        """Dense binary adjacency matrix, A[i, j] = 1 iff (i, j) is an edge."""
        a = np.zeros((self.n_nodes, self.n_nodes))
        for i, j in self.edges:
            a[i, j] = 1.0
        return a

    def has_edge(self, i, j):
        return (i, j) in self.edge_set

    def in_degrees(self):
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for _, j in self.edges:
            deg[j] += 1
        return deg

    def out_degrees(self):
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for i, _ in self.edges:
            deg[i] += 1
        return deg

    def reverse(self):
        """Digraph with every edge flipped."""
        return Digraph(self.n_nodes, [(j, i) for i, j in self.edges])


@dataclass(frozen=True)
class AdjacencyDecomposition:
    """Symmetric/skew-symmetric split of a digraph adjacency matrix."""

    a_sym: np.ndarray
    a_skew: np.ndarray
    d_sym: np.ndarray


@dataclass(frozen=True)
class MagneticLaplacian:
    """Normalized magnetic Laplacian with charge parameter q.

    Hermitian by construction; positive semi-definite with eigenvalues
    bounded by 2.
    """

    q: float
    matrix: np.ndarray

    @property
    def n_nodes(self):
        return self.matrix.shape[0]


def decompose_adjacency(g: Digraph) -> AdjacencyDecomposition:
    """Split the adjacency into symmetric and skew-symmetric parts.

    a_sym[i, j] = (A[i, j] + A[j, i]) / 2, a_skew[i, j] = A[i, j] - A[j, i],
    d_sym[i] = sum_j a_sym[i, j].
    """
    a = g.adjacency
    a_sym = 0.5 * (a + a.T)
    a_skew = a - a.T
    return AdjacencyDecomposition(a_sym=a_sym, a_skew=a_skew, d_sym=a_sym.sum(axis=1))


def _inv_sqrt_degrees(d_sym):
    # Pseudo-inverse convention: isolated nodes get scale 0, which zeroes
    # their row/column of the normalized adjacency and leaves diagonal 1.
    scale = np.zeros_like(d_sym)
    positive = d_sym > 0
    scale[positive] = 1.0 / np.sqrt(d_sym[positive])
    return scale


def magnetic_laplacian(g: Digraph, q: float) -> MagneticLaplacian:
    """Normalized magnetic Laplacian I - Psi(q) * (D^-1/2 A_sym D^-1/2).

    The phase matrix Psi(q)[i, j] = exp(2*pi*1j*q*a_skew[i, j]) multiplies the
    normalized symmetric adjacency elementwise. q = 0 recovers the standard
    symmetric normalized Laplacian; larger q stores more direction information.
    """
    if not (CHARGE_MIN <= q <= CHARGE_MAX):
        raise InvalidCharge(f"charge q={q} outside [{CHARGE_MIN}, {CHARGE_MAX}]")
    dec = decompose_adjacency(g)
    scale = _inv_sqrt_degrees(dec.d_sym)
    normalized = dec.a_sym * np.outer(scale, scale)
    phase = np.exp(2j * np.pi * q * dec.a_skew)
    lap = np.eye(g.n_nodes, dtype=np.complex128) - phase * normalized
    # Scrub any last-bit asymmetry from the elementwise products.
    lap = 0.5 * (lap + lap.conj().T)
    return MagneticLaplacian(q=float(q), matrix=lap)


def magnetic_laplacian_sparse(g: Digraph, q: float) -> sp.csr_matrix:
    """CSR magnetic Laplacian built straight from the edge list.

    Same matrix as :func:`magnetic_laplacian` without materializing a dense
    N x N array; used by the matrix-free transform on large graphs.
    """
    if not (CHARGE_MIN <= q <= CHARGE_MAX):
        raise InvalidCharge(f"charge q={q} outside [{CHARGE_MIN}, {CHARGE_MAX}]")
    n = g.n_nodes
    if g.n_edges == 0:
        return sp.identity(n, dtype=np.complex128, format="csr")
    rows, cols = np.array(g.edges).T
    ones = np.ones(len(rows))
    a = sp.coo_matrix((ones, (rows, cols)), shape=(n, n))
    a_sym = 0.5 * (a + a.T).tocoo()
    d_sym = np.asarray(a_sym.sum(axis=1)).ravel()
    scale = _inv_sqrt_degrees(d_sym)
    skew = (a - a.T).tocoo()
    skew_lookup = {(i, j): v for i, j, v in zip(skew.row, skew.col, skew.data)}
    data = np.empty(a_sym.nnz, dtype=np.complex128)
    for k, (i, j, v) in enumerate(zip(a_sym.row, a_sym.col, a_sym.data)):
        theta = 2.0 * np.pi * q * skew_lookup.get((i, j), 0.0)
        data[k] = -np.exp(1j * theta) * (scale[i] * v * scale[j])
    off_diag = sp.coo_matrix((data, (a_sym.row, a_sym.col)), shape=(n, n))
    return (sp.identity(n, dtype=np.complex128) + off_diag).tocsr()


def read_edge_list(path) -> Digraph:
    """Parse the tab-separated edge-list format.

    One edge per line as "src<TAB>dst" with 0-based integer ids. Lines
    starting with '#' are comments; a "#nodes=N" line overrides the node
    count (default: 1 + max id).
    """
    edges = []
    n_override = None
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("#nodes="):
                    try:
                        n_override = int(line[len("#nodes=") :])
                    except ValueError as exc:
                        raise DataFormatError(f"{path}:{lineno}: bad #nodes header: {line!r}") from exc
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataFormatError(f"{path}:{lineno}: expected 'src<TAB>dst', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: non-integer node id in {line!r}") from exc
            if i < 0 or j < 0:
                raise DataFormatError(f"{path}:{lineno}: negative node id in {line!r}")
            edges.append((i, j))
    if n_override is not None:
        n_nodes = n_override
    elif edges:
        n_nodes = 1 + max(max(i, j) for i, j in edges)
    else:
        raise DataFormatError(f"{path}: empty edge list and no #nodes header")
    return Digraph(n_nodes, edges)


def write_edge_list(g: Digraph, path):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"#nodes={g.n_nodes}\n")
        for i, j in g.edges:
            handle.write(f"{i}\t{j}\n")
