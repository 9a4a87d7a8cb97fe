"""Dataset ingestion, task construction, and experiment orchestration.

Datasets live in plain-text directories: edges.tsv (tab-separated edge
list with an optional '#nodes=N' header), features.csv (N rows of
comma-separated floats, optional), labels.csv (N rows, one integer,
optional). Splits are deterministic functions of (data, seed). An
experiment run repeats split -> train -> test over consecutive seeds and
reports mean and sample standard deviation of test accuracy.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import baseline, nn
from .banks import DEFAULT_SIGMOID_ALPHA, make_bank
from .errors import DataFormatError, InsufficientClassMembers, RetryExhausted
from .framelets import build_exact, build_fast
from .graphs import Digraph, magnetic_laplacian, magnetic_laplacian_sparse, read_edge_list
from .spectral import eig_hermitian

DEFAULT_CONFIG = {
    "task": "node",
    "dataset": None,
    "bank": "haar",
    "q": 0.25,
    "S": 2,
    "K": 32,
    "mode": "exact",
    "optimizer": "adam",
    "lr": 5e-3,
    "weight_decay": 5e-4,
    "epochs": 3000,
    "patience": 500,
    "dropout": None,
    "hidden_dims": [32],
    "n_repeats": 10,
    "seed": 0,
    "noise_sigma": 0.0,
    "node_split": "auto",
    "sigmoid_alpha": DEFAULT_SIGMOID_ALPHA,
}


@dataclass(frozen=True)
class Dataset:
    name: str
    graph: Digraph
    features: np.ndarray | None = None
    labels: np.ndarray | None = None

    def __post_init__(self):
        n = self.graph.n_nodes
        if self.features is not None and self.features.shape[0] != n:
            raise DataFormatError(
                f"{self.features.shape[0]} feature rows for {n} nodes"
            )
        if self.labels is not None and self.labels.shape[0] != n:
            raise DataFormatError(f"{self.labels.shape[0]} labels for {n} nodes")


@dataclass(frozen=True)
class NodeSplit:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    seed: int


@dataclass(frozen=True)
class LinkSplit:
    train_graph: Digraph
    task: str
    seed: int
    train_pairs: np.ndarray
    train_labels: np.ndarray
    val_pairs: np.ndarray
    val_labels: np.ndarray
    test_pairs: np.ndarray
    test_labels: np.ndarray


def load_dataset(path: str) -> Dataset:
    """Read a dataset directory (edges.tsv + optional features/labels csv)."""
    if not os.path.isdir(path):
        raise DataFormatError(f"{path} is not a dataset directory")
    graph = read_edge_list(os.path.join(path, "edges.tsv"))
    features = labels = None
    feat_path = os.path.join(path, "features.csv")
    if os.path.exists(feat_path):
        try:
            features = np.loadtxt(feat_path, delimiter=",", ndmin=2, dtype=np.float64)
        except ValueError as exc:
            raise DataFormatError(f"{feat_path}: {exc}") from exc
    label_path = os.path.join(path, "labels.csv")
    if os.path.exists(label_path):
        try:
            labels = np.loadtxt(label_path, ndmin=1, dtype=np.int64)
        except ValueError as exc:
            raise DataFormatError(f"{label_path}: {exc}") from exc
    return Dataset(
        name=os.path.basename(os.path.normpath(path)),
        graph=graph,
        features=features,
        labels=labels,
    )


def standardize_columns(x) -> np.ndarray:
    """Zero-mean unit-variance per column; constant columns map to zero."""
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    out = np.zeros_like(x)
    active = std > 0
    out[:, active] = (x[:, active] - mean[active]) / std[active]
    return out


def degree_features(graph: Digraph) -> np.ndarray:
    """Standardized in-degree and out-degree columns."""
    raw = np.stack([graph.in_degrees(), graph.out_degrees()], axis=1)
    return standardize_columns(raw)


def add_noise(features, sigma: float, seed: int) -> np.ndarray:
    """Add i.i.d. Gaussian noise with standard deviation sigma."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    features = np.asarray(features, dtype=np.float64)
    return features + sigma * rng.standard_normal(features.shape)


def node_split_citation(labels, seed: int, n_per_class: int = 20, n_val: int = 500):
    """Citation-style split: fixed per-class train quota, fixed-size val set."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_parts = []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        if len(members) < n_per_class:
            raise InsufficientClassMembers(
                f"class {c} has {len(members)} members, need {n_per_class}"
            )
        train_parts.append(rng.choice(members, size=n_per_class, replace=False))
    train = np.sort(np.concatenate(train_parts))
    rest = np.setdiff1d(np.arange(len(labels)), train)
    if len(rest) <= n_val:
        raise InsufficientClassMembers(
            f"{len(rest)} nodes left after the train quota, need more than {n_val}"
        )
    rest = rng.permutation(rest)
    return NodeSplit(
        train=train, val=np.sort(rest[:n_val]), test=np.sort(rest[n_val:]), seed=seed
    )


def node_split_fraction(labels, fractions=(0.6, 0.2, 0.2), seed: int = 0):
    """Random split by fractions; floor sizes for train/val, remainder test."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {fractions}")
    n = len(np.asarray(labels))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = int(np.floor(fractions[0] * n))
    n_val = int(np.floor(fractions[1] * n))
    return NodeSplit(
        train=np.sort(perm[:n_train]),
        val=np.sort(perm[n_train : n_train + n_val]),
        test=np.sort(perm[n_train + n_val :]),
        seed=seed,
    )


def _sample_nonedges(n_nodes, count, forbidden, rng):
    # `forbidden` accumulates, so repeated calls stay disjoint from each
    # other as well as from every true edge.
    out = []
    budget = 1000 * max(count, 1) + 10000
    while len(out) < count:
        budget -= 1
        if budget < 0:
            raise RetryExhausted(f"could not sample {count} distinct non-edges")
        u = int(rng.integers(n_nodes))
        v = int(rng.integers(n_nodes))
        if u == v or (u, v) in forbidden:
            continue
        forbidden.add((u, v))
        out.append((u, v))
    return np.array(out, dtype=np.int64).reshape(len(out), 2)


def _direction_presentation(edges, rng):
    # Fair coin per edge: heads keeps (u, v) with label 0, tails presents
    # the reversed pair with label 1.
    keep = rng.random(len(edges)) < 0.5
    pairs = np.where(keep[:, None], edges, edges[:, ::-1])
    return pairs, (~keep).astype(np.int64)


def link_split(graph: Digraph, seed: int, task: str) -> LinkSplit:
    """Remove 5% of edges for validation and 15% for testing, then label pairs.

    The removal is resampled (up to 100 attempts) until every node that
    had an edge keeps one in the training graph. Existence task: each
    partition's true edges (label 0) are matched 1:1 with sampled
    non-edges (label 1), disjoint across partitions and never colliding
    with any true edge. Direction task: only true edges, presented in
    coin-flipped order with the label recording the orientation.
    """
    if task not in ("link_existence", "link_direction"):
        raise ValueError(f"unknown link task {task!r}")
    rng = np.random.default_rng(seed)
    edges = np.array(graph.edges, dtype=np.int64).reshape(-1, 2)
    m = len(edges)
    n_val = int(np.floor(0.05 * m))
    n_test = int(np.floor(0.15 * m))
    total_deg = graph.in_degrees() + graph.out_degrees()
    active = np.flatnonzero(total_deg > 0)
    for _ in range(100):
        perm = rng.permutation(m)
        val_edges = edges[np.sort(perm[:n_val])]
        test_edges = edges[np.sort(perm[n_val : n_val + n_test])]
        train_edges = edges[np.sort(perm[n_val + n_test :])]
        deg = np.zeros(graph.n_nodes, dtype=np.int64)
        np.add.at(deg, train_edges[:, 0], 1)
        np.add.at(deg, train_edges[:, 1], 1)
        if np.all(deg[active] > 0):
            break
    else:
        raise RetryExhausted(
            "100 edge-removal attempts all disconnected some node from the "
            "training graph"
        )
    train_graph = Digraph(graph.n_nodes, [tuple(e) for e in train_edges])
    parts = {}
    if task == "link_direction":
        for name, part in (("train", train_edges), ("val", val_edges), ("test", test_edges)):
            parts[name] = _direction_presentation(part, rng)
    else:
        forbidden = set(graph.edge_set)
        for name, part in (("train", train_edges), ("val", val_edges), ("test", test_edges)):
            negatives = _sample_nonedges(graph.n_nodes, len(part), forbidden, rng)
            pairs = np.concatenate([part, negatives]).reshape(-1, 2)
            labels = np.concatenate(
                [np.zeros(len(part), dtype=np.int64), np.ones(len(negatives), dtype=np.int64)]
            )
            parts[name] = (pairs, labels)
    return LinkSplit(
        train_graph=train_graph,
        task=task,
        seed=seed,
        train_pairs=parts["train"][0],
        train_labels=parts["train"][1],
        val_pairs=parts["val"][0],
        val_labels=parts["val"][1],
        test_pairs=parts["test"][0],
        test_labels=parts["test"][1],
    )


def load_config(path: str) -> dict:
    """Read an experiment config, fill defaults, resolve the dataset path."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: {exc}") from exc
    unknown = sorted(set(doc) - set(DEFAULT_CONFIG))
    if unknown:
        raise DataFormatError(f"unknown config keys: {unknown}")
    config = {**DEFAULT_CONFIG, **doc}
    if not config["dataset"]:
        raise DataFormatError("config must name a dataset directory")
    if not os.path.isabs(config["dataset"]):
        base = os.path.dirname(os.path.abspath(path))
        config["dataset"] = os.path.normpath(os.path.join(base, config["dataset"]))
    return config


def _node_split(labels, seed, strategy):
    if strategy == "citation":
        return node_split_citation(labels, seed)
    if strategy == "fraction":
        return node_split_fraction(labels, seed=seed)
    if strategy == "auto":
        try:
            return node_split_citation(labels, seed)
        except InsufficientClassMembers:
            return node_split_fraction(labels, seed=seed)
    raise ValueError(f"unknown node_split {strategy!r}")


def _run_repeat(config: dict, seed: int, model_kind: str):
    """One split -> train -> test pass; returns (metrics, model, eval fn, batch)."""
    dataset = load_dataset(config["dataset"])
    task = config["task"]
    if task == "node":
        if dataset.labels is None:
            raise DataFormatError(f"dataset {dataset.name} has no labels.csv")
        graph = dataset.graph
        labels = dataset.labels
        if labels.min() < 0:
            raise DataFormatError("labels must be non-negative class indices")
        n_classes = int(labels.max()) + 1
        if dataset.features is not None:
            features = standardize_columns(dataset.features)
        else:
            features = degree_features(graph)
        split = _node_split(labels, seed, config["node_split"])
        features = add_noise(features, config["noise_sigma"], seed)
        batches = {
            name: nn.Batch(features=features, labels=labels[idx], nodes=idx)
            for name, idx in (("train", split.train), ("val", split.val), ("test", split.test))
        }
    else:
        split = link_split(dataset.graph, seed, task)
        graph = split.train_graph
        n_classes = 2
        features = add_noise(degree_features(graph), config["noise_sigma"], seed)
        batches = {
            name: nn.Batch(features=features, labels=lab, pairs=prs)
            for name, prs, lab in (
                ("train", split.train_pairs, split.train_labels),
                ("val", split.val_pairs, split.val_labels),
                ("test", split.test_pairs, split.test_labels),
            )
        }
    rng = np.random.default_rng(seed)
    dropout = config["dropout"]
    if model_kind == "framelet":
        bank = make_bank(config["bank"], sigmoid_alpha=config["sigmoid_alpha"])
        q = float(config["q"])
        if config["mode"] == "exact":
            system = build_exact(
                eig_hermitian(magnetic_laplacian(graph, q)), bank, config["S"], q
            )
        else:
            system = build_fast(
                magnetic_laplacian_sparse(graph, q), bank, config["S"], config["K"], q=q
            )
        model = nn.init_model(
            system, features.shape[1], list(config["hidden_dims"]), n_classes,
            task, rng, dropout=dropout,
        )
        loss_grad_fn, eval_fn, param_fn = nn.loss_and_grad, nn.evaluate, nn.parameter_arrays
    elif model_kind == "gcn":
        if task != "node":
            raise ValueError("the GCN comparator only supports the node task")
        model = baseline.init_gcn(
            graph, features.shape[1], list(config["hidden_dims"]), n_classes,
            rng, dropout=0.5 if dropout is None else dropout,
        )
        loss_grad_fn, eval_fn, param_fn = (
            baseline.loss_and_grad, baseline.evaluate, baseline.parameter_arrays,
        )
    else:
        raise ValueError(f"unknown model kind {model_kind!r}")
    train_config = nn.TrainConfig(
        optimizer=config["optimizer"],
        lr=float(config["lr"]),
        weight_decay=float(config["weight_decay"]),
        epochs=int(config["epochs"]),
        patience=int(config["patience"]),
        seed=seed,
    )
    report = nn.train(
        model, batches["train"], batches["val"], train_config,
        loss_grad_fn=loss_grad_fn, eval_fn=eval_fn, param_fn=param_fn,
    )
    test_loss, test_acc = eval_fn(model, batches["test"])
    metrics = {
        "seed": seed,
        "test_accuracy": test_acc,
        "test_loss": test_loss,
        "val_accuracy": report.val_acc[report.best_epoch],
        "best_epoch": report.best_epoch,
        "n_epochs": report.n_epochs,
    }
    return metrics, model


def _repeat_metrics(args):
    config, seed, model_kind = args
    return _run_repeat(config, seed, model_kind)[0]


def run_experiment(
    config: dict, jobs: int = 1, checkpoint_path=None, model_kind: str = "framelet"
) -> dict:
    """Run n_repeats split/train/test passes and aggregate test accuracy.

    Repeats use seeds seed+0 .. seed+n-1 and may run in parallel
    (`jobs` processes); aggregation sorts by seed, so the report does
    not depend on completion order. With `checkpoint_path` set, the
    best repeat (highest test accuracy, first seed on ties) is re-run
    deterministically and its model saved.
    """
    config = {**DEFAULT_CONFIG, **config}
    start = time.perf_counter()
    seeds = [int(config["seed"]) + i for i in range(int(config["n_repeats"]))]
    work = [(config, s, model_kind) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_repeat_metrics, work))
    else:
        results = [_repeat_metrics(w) for w in work]
    results.sort(key=lambda r: r["seed"])
    accuracies = [r["test_accuracy"] for r in results]
    mean = float(np.mean(accuracies))
    std = float(np.std(accuracies, ddof=1)) if len(accuracies) > 1 else 0.0
    if checkpoint_path is not None:
        if model_kind != "framelet":
            raise ValueError("checkpoints are only written for the framelet model")
        best_seed = results[int(np.argmax(accuracies))]["seed"]
        _, best_model = _run_repeat(config, best_seed, model_kind)
        nn.save_checkpoint(checkpoint_path, best_model)
    return {
        "config": config,
        "model": model_kind,
        "repeats": results,
        "mean_accuracy": mean,
        "std_accuracy": std,
        "wall_clock_seconds": time.perf_counter() - start,
    }


def denoise_curve(config: dict, sigmas, jobs: int = 1) -> list[dict]:
    """Accuracy-vs-noise rows for the framelet model and the GCN comparator.

    Returns one row per (model, sigma) with mean and std over repeats;
    rows are grouped by model with sigmas in the given order.
    """
    rows = []
    for kind in ("framelet", "gcn"):
        for sigma in sigmas:
            report = run_experiment(
                {**config, "noise_sigma": float(sigma)}, jobs=jobs, model_kind=kind
            )
            rows.append(
                {
                    "model": kind,
                    "sigma": float(sigma),
                    "mean": report["mean_accuracy"],
                    "std": report["std_accuracy"],
                }
            )
    return rows
