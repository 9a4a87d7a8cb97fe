"""Framelet spectral convolution network with hand-rolled gradients.

A conv layer filters the signal in the framelet domain: the input is
mixed by a complex weight matrix, decomposed by the transform, scaled by
one learnable real gain per coefficient row, synthesized back, and passed
through a split complex ReLU. After the last layer the representation is
unwound into real columns [Re | Im] and fed to a real linear head (after
row-pair concatenation for link tasks).

Gradients are computed by reverse-mode accumulation. Every complex
parameter is treated as two real parameters; the carrier array for a
complex tensor holds d(loss)/d(Re) + i * d(loss)/d(Im), so the pullback
of any complex-linear map is its conjugate transpose. Because all
transform operators are Hermitian, the pullback of analysis is synthesis
and vice versa, in both exact and Chebyshev modes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DataFormatError,
    IndexOutOfRange,
    NonFiniteLoss,
    ShapeMismatch,
)
from .framelets import FrameletCoefficients, FrameletSystem, mgft, reconstruct

TASKS = ("node", "link_existence", "link_direction")
CHECKPOINT_VERSION = "framelet-magnet-v1"


@dataclass
class FrameletConvLayer:
    """One spectral convolution layer.

    `weight` mixes feature channels (complex, d_in x d_out); `gains` is
    the learnable diagonal filter, one real gain per (block, node)
    coefficient row shared across channels, initialized at 1 so the
    untrained layer starts from the identity sandwich.
    """

    system: FrameletSystem
    weight: np.ndarray
    gains: np.ndarray

    def __post_init__(self):
        expected = (self.system.n_blocks, self.system.n_nodes)
        if self.gains.shape != expected:
            raise ShapeMismatch(f"gains shape {self.gains.shape}, expected {expected}")
        if self.weight.ndim != 2:
            raise ShapeMismatch("layer weight must be 2-D")


@dataclass
class Model:
    """Stack of conv layers, a real linear head, and task wiring.

    `activation` is "crelu" in normal use; "identity" is a hook for
    tightness tests. Link tasks concatenate the two node rows of each
    candidate pair before the head, so the head consumes 2x the unwound
    width.
    """

    layers: list[FrameletConvLayer]
    head_weight: np.ndarray
    head_bias: np.ndarray
    task: str
    dropout: float = 0.0
    activation: str = "crelu"

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.activation not in ("crelu", "identity"):
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def system(self) -> FrameletSystem:
        return self.layers[0].system


@dataclass(frozen=True)
class Batch:
    """Labeled examples for one loss evaluation.

    Node task: `nodes` lists the labeled node ids. Link tasks: `pairs`
    holds one ordered (i, j) node pair per example. `labels` aligns with
    whichever of the two is set.
    """

    features: np.ndarray
    labels: np.ndarray
    nodes: np.ndarray | None = None
    pairs: np.ndarray | None = None


def glorot_complex(rng: np.random.Generator, d_in: int, d_out: int) -> np.ndarray:
    """Complex Glorot-uniform init: Re and Im each uniform in +-a/sqrt(2)."""
    a = np.sqrt(6.0 / (d_in + d_out)) / np.sqrt(2.0)
    re = rng.uniform(-a, a, size=(d_in, d_out))
    im = rng.uniform(-a, a, size=(d_in, d_out))
    return re + 1j * im


def glorot_real(rng: np.random.Generator, d_in: int, d_out: int) -> np.ndarray:
    a = np.sqrt(6.0 / (d_in + d_out))
    return rng.uniform(-a, a, size=(d_in, d_out))


def init_model(
    system: FrameletSystem,
    feature_dim: int,
    hidden_dims: list[int],
    n_classes: int,
    task: str,
    rng: np.random.Generator,
    dropout: float | None = None,
    activation: str = "crelu",
) -> Model:
    """Build a model with freshly initialized parameters.

    `hidden_dims` gives the output width of each conv layer in order.
    Dropout defaults to 0.5 for the node task and 0 for link tasks, and
    is applied to the unwound real representation only.
    """
    if not hidden_dims:
        raise ValueError("need at least one conv layer width")
    dims = [feature_dim] + list(hidden_dims)
    layers = []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        layers.append(
            FrameletConvLayer(
                system=system,
                weight=glorot_complex(rng, d_in, d_out),
                gains=np.ones((system.n_blocks, system.n_nodes)),
            )
        )
    width = 2 * dims[-1]
    if task != "node":
        width *= 2
    if dropout is None:
        dropout = 0.5 if task == "node" else 0.0
    return Model(
        layers=layers,
        head_weight=glorot_real(rng, width, n_classes),
        head_bias=np.zeros(n_classes),
        task=task,
        dropout=float(dropout),
        activation=activation,
    )


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "identity":
        return z
    return np.maximum(z.real, 0.0) + 1j * np.maximum(z.imag, 0.0)


def _layer_forward(layer: FrameletConvLayer, x: np.ndarray, activation: str):
    if x.shape[1] != layer.weight.shape[0]:
        raise ShapeMismatch(
            f"layer input width {x.shape[1]}, weight expects {layer.weight.shape[0]}"
        )
    mixed = x @ layer.weight
    coeffs = mgft(layer.system, mixed).blocks
    scaled = layer.gains[:, :, None] * coeffs
    synth = reconstruct(layer.system, _wrap(layer.system, scaled))
    out = _activate(synth, activation)
    cache = (x, coeffs, synth)
    return out, cache


def _wrap(system: FrameletSystem, blocks: np.ndarray) -> FrameletCoefficients:
    return FrameletCoefficients(
        blocks=blocks,
        labels=system.labels,
        q=system.q,
        n_scales=system.n_scales,
        mode=system.mode,
    )


def conv_forward(layer: FrameletConvLayer, x: np.ndarray, activation: str = "crelu"):
    """Apply one conv layer: activate(synthesize(gains * analyze(x @ W)))."""
    return _layer_forward(layer, x, activation)[0]


def unwind(z: np.ndarray) -> np.ndarray:
    """Map complex N x D to real N x 2D with columns [Re | Im]."""
    z = np.asarray(z)
    return np.concatenate([z.real, z.imag], axis=1)


def pair_concat(h: np.ndarray, pairs) -> np.ndarray:
    """Concatenate the feature rows of each ordered node pair.

    Row k of the result is [h[i_k] | h[j_k]]; the order of i and j is
    significant for the direction task.
    """
    idx = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if idx.size and (idx.min() < 0 or idx.max() >= h.shape[0]):
        raise IndexOutOfRange("pair index outside node range")
    return np.concatenate([h[idx[:, 0]], h[idx[:, 1]]], axis=1)


def _forward_cache(model, features, pairs, training, rng):
    x = np.asarray(features)
    layer_caches = []
    for layer in model.layers:
        x, cache = _layer_forward(layer, x, model.activation)
        layer_caches.append(cache)
    h = unwind(x)
    mask = None
    if training and model.dropout > 0.0:
        if rng is None:
            raise ValueError("dropout needs an rng when training")
        keep = rng.random(h.shape) >= model.dropout
        mask = keep / (1.0 - model.dropout)
        h = h * mask
    if model.task == "node":
        rows = h
    else:
        if pairs is None:
            raise ShapeMismatch("link task needs node pairs")
        rows = pair_concat(h, pairs)
    if rows.shape[1] != model.head_weight.shape[0]:
        raise ShapeMismatch(
            f"head input width {rows.shape[1]}, "
            f"weight expects {model.head_weight.shape[0]}"
        )
    logits = rows @ model.head_weight + model.head_bias
    return logits, (layer_caches, h, mask, rows)


def forward(model: Model, features, pairs=None, training=False, rng=None):
    """Compute class logits: conv layers, unwind, pair rows, linear head."""
    return _forward_cache(model, features, pairs, training, rng)[0]


def _cross_entropy(logits: np.ndarray, labels: np.ndarray):
    # Max-subtraction keeps exp() finite even for logits around 1e4,
    # which denoising at extreme noise levels actually produces.
    n_classes = logits.shape[1]
    if labels.min() < 0 or labels.max() >= n_classes:
        raise IndexOutOfRange(f"label outside [0, {n_classes})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    picked = shifted[np.arange(len(labels)), labels]
    loss = float(np.mean(log_z - picked))
    probs = np.exp(shifted - log_z[:, None])
    grad = probs
    grad[np.arange(len(labels)), labels] -= 1.0
    grad /= len(labels)
    return loss, grad


def parameter_arrays(model: Model) -> list[np.ndarray]:
    """Trainable parameters as float64 arrays, complex ones as interleaved views.

    The views share memory with the model, so in-place optimizer updates
    mutate the complex parameters directly.
    """
    out = []
    for layer in model.layers:
        out.append(layer.weight.view(np.float64))
        out.append(layer.gains)
    out.append(model.head_weight)
    out.append(model.head_bias)
    return out


def loss_and_grad(model: Model, batch: Batch, training=True, rng=None):
    """Mean softmax cross-entropy and its gradient for every parameter.

    Returns (loss, grads) with grads aligned to parameter_arrays(model).
    Weight decay is an optimizer-side addition and is not included here,
    so the values agree with a finite-difference probe of the loss.
    Raises NonFiniteLoss if the forward pass or the loss overflows.
    """
    logits, (layer_caches, h, mask, rows) = _forward_cache(
        model, batch.features, batch.pairs, training, rng
    )
    if not np.all(np.isfinite(logits)):
        raise NonFiniteLoss("forward pass produced non-finite values")
    if model.task == "node":
        sel = np.asarray(batch.nodes, dtype=np.int64)
        loss, d_sel = _cross_entropy(logits[sel], batch.labels)
        d_logits = np.zeros_like(logits)
        d_logits[sel] = d_sel
    else:
        loss, d_logits = _cross_entropy(logits, batch.labels)
    if not np.isfinite(loss):
        raise NonFiniteLoss("loss is non-finite")

    grads = [None] * (2 * len(model.layers) + 2)
    grads[-2] = rows.T @ d_logits
    grads[-1] = d_logits.sum(axis=0)
    d_rows = d_logits @ model.head_weight.T
    if model.task == "node":
        d_h = d_rows
    else:
        half = h.shape[1]
        idx = np.asarray(batch.pairs, dtype=np.int64).reshape(-1, 2)
        d_h = np.zeros_like(h)
        np.add.at(d_h, idx[:, 0], d_rows[:, :half])
        np.add.at(d_h, idx[:, 1], d_rows[:, half:])
    if mask is not None:
        d_h = d_h * mask
    width = d_h.shape[1] // 2
    g_x = d_h[:, :width] + 1j * d_h[:, width:]

    for i in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[i]
        x_in, coeffs, synth = layer_caches[i]
        if model.activation == "crelu":
            g_z = (synth.real > 0) * g_x.real + 1j * ((synth.imag > 0) * g_x.imag)
        else:
            g_z = g_x
        g_scaled = mgft(layer.system, g_z).blocks
        grads[2 * i + 1] = np.sum((np.conj(coeffs) * g_scaled).real, axis=2)
        g_coeffs = layer.gains[:, :, None] * g_scaled
        g_mixed = reconstruct(layer.system, _wrap(layer.system, g_coeffs))
        grads[2 * i] = (np.conj(x_in).T @ g_mixed).view(np.float64)
        if i > 0:
            g_x = g_mixed @ np.conj(layer.weight).T
    return loss, grads


def evaluate(model: Model, batch: Batch):
    """Return (loss, accuracy) without dropout or gradient work."""
    logits, _ = _forward_cache(model, batch.features, batch.pairs, False, None)
    if model.task == "node":
        logits = logits[np.asarray(batch.nodes, dtype=np.int64)]
    loss, _ = _cross_entropy(logits, batch.labels)
    acc = float(np.mean(np.argmax(logits, axis=1) == batch.labels))
    return loss, acc


@dataclass
class TrainConfig:
    optimizer: str = "adam"
    lr: float = 5e-3
    weight_decay: float = 5e-4
    epochs: int = 3000
    patience: int = 500
    seed: int = 0


@dataclass
class TrainReport:
    train_loss: list[float] = field(default_factory=list)
    train_acc: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_acc: list[float] = field(default_factory=list)
    best_epoch: int = 0
    n_epochs: int = 0


class _Optimizer:
    """SGD or Adam over a list of float64 parameter arrays, in place.

    Weight decay is added to every gradient (classic L2-in-gradient
    coupling, applied to all parameter tensors alike).
    """

    def __init__(self, params: list[np.ndarray], config: TrainConfig):
        if config.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {config.optimizer!r}")
        self.params = params
        self.config = config
        self.step_count = 0
        if config.optimizer == "adam":
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]):
        cfg = self.config
        self.step_count += 1
        for k, (p, g) in enumerate(zip(self.params, grads)):
            if cfg.weight_decay:
                g = g + cfg.weight_decay * p
            if cfg.optimizer == "sgd":
                p -= cfg.lr * g
                continue
            self.m[k] = 0.9 * self.m[k] + 0.1 * g
            self.v[k] = 0.999 * self.v[k] + 0.001 * g * g
            m_hat = self.m[k] / (1.0 - 0.9**self.step_count)
            v_hat = self.v[k] / (1.0 - 0.999**self.step_count)
            p -= cfg.lr * m_hat / (np.sqrt(v_hat) + 1e-8)


def train(
    model,
    train_batch: Batch,
    val_batch: Batch,
    config: TrainConfig,
    loss_grad_fn=loss_and_grad,
    eval_fn=evaluate,
    param_fn=parameter_arrays,
):
    """Full-batch training with early stopping on validation loss.

    Deterministic for a fixed seed (the seed only drives dropout masks).
    The parameters with the best validation loss are restored before
    returning. The injectable fn arguments let other model classes with
    the same calling convention reuse this loop.
    """
    params = param_fn(model)
    opt = _Optimizer(params, config)
    rng = np.random.default_rng(config.seed)
    report = TrainReport()
    best_val = np.inf
    best_params = [p.copy() for p in params]
    since_best = 0
    for epoch in range(config.epochs):
        try:
            _, grads = loss_grad_fn(model, train_batch, training=True, rng=rng)
        except NonFiniteLoss as exc:
            raise NonFiniteLoss(f"{exc} (epoch {epoch})") from exc
        opt.step(grads)
        tr_loss, tr_acc = eval_fn(model, train_batch)
        va_loss, va_acc = eval_fn(model, val_batch)
        if not (np.isfinite(tr_loss) and np.isfinite(va_loss)):
            raise NonFiniteLoss(f"non-finite loss (epoch {epoch})")
        report.train_loss.append(tr_loss)
        report.train_acc.append(tr_acc)
        report.val_loss.append(va_loss)
        report.val_acc.append(va_acc)
        if va_loss < best_val:
            best_val = va_loss
            report.best_epoch = epoch
            best_params = [p.copy() for p in params]
            since_best = 0
        else:
            since_best += 1
            if since_best > config.patience:
                break
    for p, b in zip(params, best_params):
        p[...] = b
    report.n_epochs = len(report.train_loss)
    return report


def save_checkpoint(path, model: Model):
    """Write the model to a JSON checkpoint (complex arrays interleaved)."""
    sys = model.system
    doc = {
        "version": CHECKPOINT_VERSION,
        "task": model.task,
        "bank": sys.bank.name,
        "q": sys.q,
        "n_scales": sys.n_scales,
        "cheb_degree": sys.cheb_degree,
        "mode": sys.mode,
        "dropout": model.dropout,
        "activation": model.activation,
        "layers": [
            {
                "weight_shape": list(layer.weight.shape),
                "weight": layer.weight.view(np.float64).ravel().tolist(),
                "gains_shape": list(layer.gains.shape),
                "gains": layer.gains.ravel().tolist(),
            }
            for layer in model.layers
        ],
        "head_weight_shape": list(model.head_weight.shape),
        "head_weight": model.head_weight.ravel().tolist(),
        "head_bias": model.head_bias.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path, system: FrameletSystem) -> Model:
    """Rebuild a model from a checkpoint against a freshly built system.

    The system must match the checkpoint metadata (bank, q, levels,
    mode); rebuilding it from the graph is the caller's job since the
    checkpoint stores no graph.
    """
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != CHECKPOINT_VERSION:
        raise DataFormatError(f"unsupported checkpoint version {doc.get('version')!r}")
    mismatches = [
        name
        for name, have in [
            ("bank", system.bank.name),
            ("q", system.q),
            ("n_scales", system.n_scales),
            ("mode", system.mode),
        ]
        if doc[name] != have
    ]
    if mismatches:
        raise DataFormatError(f"checkpoint does not match system: {mismatches}")
    layers = []
    for spec in doc["layers"]:
        flat = np.array(spec["weight"])
        weight = flat.view(np.complex128).reshape(spec["weight_shape"])
        gains = np.array(spec["gains"]).reshape(spec["gains_shape"])
        layers.append(FrameletConvLayer(system=system, weight=weight, gains=gains))
    return Model(
        layers=layers,
        head_weight=np.array(doc["head_weight"]).reshape(doc["head_weight_shape"]),
        head_bias=np.array(doc["head_bias"]),
        task=doc["task"],
        dropout=doc["dropout"],
        activation=doc["activation"],
    )
