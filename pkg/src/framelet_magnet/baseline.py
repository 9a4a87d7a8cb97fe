"""Plain GCN on the symmetrized graph, used as the denoising comparator.

The model ignores edge direction entirely: the propagation matrix is the
symmetrically normalized binary adjacency with self-loops. Real weights,
ReLU between layers, logits from the last layer. It exposes the same
(loss_and_grad, evaluate, parameter_arrays) calling convention as the
framelet network, so nn.train runs it unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch
from .graphs import Digraph
from .nn import Batch, _cross_entropy, glorot_real


def propagation_matrix(graph: Digraph) -> np.ndarray:
    """Symmetrized renormalized adjacency: D^-1/2 (A_und + I) D^-1/2."""
    a = graph.adjacency
    sym = ((a + a.T) > 0).astype(float) + np.eye(graph.n_nodes)
    d = sym.sum(axis=1) ** -0.5
    return d[:, None] * sym * d[None, :]


@dataclass
class PlainGcn:
    prop: np.ndarray
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    dropout: float = 0.5


def init_gcn(
    graph: Digraph,
    feature_dim: int,
    hidden_dims: list[int],
    n_classes: int,
    rng: np.random.Generator,
    dropout: float = 0.5,
) -> PlainGcn:
    dims = [feature_dim] + list(hidden_dims) + [n_classes]
    weights = [glorot_real(rng, a, b) for a, b in zip(dims[:-1], dims[1:])]
    biases = [np.zeros(b) for b in dims[1:]]
    return PlainGcn(
        prop=propagation_matrix(graph),
        weights=weights,
        biases=biases,
        dropout=float(dropout),
    )


def parameter_arrays(model: PlainGcn) -> list[np.ndarray]:
    out = []
    for w, b in zip(model.weights, model.biases):
        out.append(w)
        out.append(b)
    return out


def _forward(model: PlainGcn, features, training, rng):
    h = np.asarray(features, dtype=np.float64)
    if h.shape[0] != model.prop.shape[0]:
        raise ShapeMismatch(
            f"features have {h.shape[0]} rows, graph has {model.prop.shape[0]}"
        )
    caches = []
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        mixed = model.prop @ h
        z = mixed @ w + b
        if i == last:
            caches.append((mixed, z, None))
            return z, caches
        h = np.maximum(z, 0.0)
        mask = None
        if training and model.dropout > 0.0:
            if rng is None:
                raise ValueError("dropout needs an rng when training")
            mask = (rng.random(h.shape) >= model.dropout) / (1.0 - model.dropout)
            h = h * mask
        caches.append((mixed, z, mask))


def loss_and_grad(model: PlainGcn, batch: Batch, training=True, rng=None):
    """Cross-entropy loss and gradients, node classification only."""
    logits, caches = _forward(model, batch.features, training, rng)
    sel = np.asarray(batch.nodes, dtype=np.int64)
    loss, d_sel = _cross_entropy(logits[sel], batch.labels)
    d_out = np.zeros_like(logits)
    d_out[sel] = d_sel
    grads = [None] * (2 * len(model.weights))
    for i in range(len(model.weights) - 1, -1, -1):
        mixed = caches[i][0]
        grads[2 * i] = mixed.T @ d_out
        grads[2 * i + 1] = d_out.sum(axis=0)
        if i > 0:
            d_h = model.prop @ (d_out @ model.weights[i].T)
            _, prev_z, prev_mask = caches[i - 1]
            if prev_mask is not None:
                d_h = d_h * prev_mask
            d_out = d_h * (prev_z > 0)
    return loss, grads


def evaluate(model: PlainGcn, batch: Batch):
    logits, _ = _forward(model, batch.features, False, None)
    sel = np.asarray(batch.nodes, dtype=np.int64)
    loss, _ = _cross_entropy(logits[sel], batch.labels)
    acc = float(np.mean(np.argmax(logits[sel], axis=1) == batch.labels))
    return loss, acc
