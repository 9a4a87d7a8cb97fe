"""Dataset handling, split construction, and experiment orchestration tests."""

import json

import numpy as np
import pytest

from framelet_magnet import nn, pipeline
from framelet_magnet.errors import (
    DataFormatError,
    InsufficientClassMembers,
    RetryExhausted,
)
from framelet_magnet.framelets import build_exact
from framelet_magnet.graphs import Digraph, magnetic_laplacian, write_edge_list
from framelet_magnet.banks import make_bank
from framelet_magnet.spectral import eig_hermitian


def _random_digraph(rng, n_nodes, p=0.3):
    mask = rng.random((n_nodes, n_nodes)) < p
    np.fill_diagonal(mask, False)
    return Digraph(n_nodes, [tuple(e) for e in np.argwhere(mask)])


def _write_dataset(tmp_path, n=24, seed=0):
    """Tiny labeled dataset: informative features, label-independent graph."""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    features = np.eye(2)[labels] * 2.0 + 0.1 * rng.standard_normal((n, 2))
    graph = _random_digraph(rng, n, p=0.1)
    root = tmp_path / "tiny"
    root.mkdir()
    write_edge_list(graph, root / "edges.tsv")
    np.savetxt(root / "features.csv", features, delimiter=",", fmt="%.8f")
    np.savetxt(root / "labels.csv", labels, fmt="%d")
    return root


def _fast_config(dataset_path, **overrides):
    config = {
        "task": "node",
        "dataset": str(dataset_path),
        "bank": "haar",
        "q": 0.1,
        "S": 2,
        "mode": "exact",
        "lr": 5e-2,
        "weight_decay": 0.0,
        "epochs": 60,
        "patience": 60,
        "dropout": 0.0,
        "hidden_dims": [8],
        "n_repeats": 2,
        "seed": 0,
    }
    config.update(overrides)
    return config


def test_standardize_columns():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((50, 3)) * [2.0, 5.0, 1.0] + [1.0, -3.0, 0.0]
    out = pipeline.standardize_columns(x)
    assert np.abs(out.mean(axis=0)).max() < 1e-12
    assert np.abs(out.std(axis=0) - 1.0).max() < 1e-12
    constant = np.full((10, 2), 7.0)
    assert np.abs(pipeline.standardize_columns(constant)).max() == 0.0


def test_degree_features_constant_on_cycle():
    cycle = Digraph(3, [(0, 1), (1, 2), (2, 0)])
    assert np.abs(pipeline.degree_features(cycle)).max() == 0.0
    star = Digraph(4, [(0, 1), (0, 2), (0, 3)])
    feats = pipeline.degree_features(star)
    assert feats.shape == (4, 2)
    assert feats[0, 1] > 0  # hub out-degree above the mean


def test_add_noise():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((2000, 3))
    assert np.array_equal(pipeline.add_noise(x, 0.0, seed=5), x)
    noisy = pipeline.add_noise(x, 2.5, seed=5)
    assert np.array_equal(noisy, pipeline.add_noise(x, 2.5, seed=5))
    assert abs((noisy - x).std() - 2.5) < 0.1
    with pytest.raises(ValueError):
        pipeline.add_noise(x, -1.0, seed=0)


def test_node_split_citation():
    rng = np.random.default_rng(2)
    labels = rng.integers(3, size=200)
    split = pipeline.node_split_citation(labels, seed=0, n_per_class=20, n_val=50)
    assert len(split.train) == 60 and len(split.val) == 50 and len(split.test) == 90
    for c in range(3):
        assert np.sum(labels[split.train] == c) == 20
    joined = np.concatenate([split.train, split.val, split.test])
    assert len(np.unique(joined)) == 200  # disjoint and covering
    # Deterministic in the seed, different across seeds.
    again = pipeline.node_split_citation(labels, seed=0, n_per_class=20, n_val=50)
    assert np.array_equal(split.train, again.train)
    other = pipeline.node_split_citation(labels, seed=1, n_per_class=20, n_val=50)
    assert not np.array_equal(split.train, other.train)


def test_node_split_citation_insufficient():
    labels = np.array([0] * 30 + [1] * 5)
    with pytest.raises(InsufficientClassMembers):
        pipeline.node_split_citation(labels, seed=0, n_per_class=20, n_val=5)
    balanced = np.array([0, 1] * 15)
    with pytest.raises(InsufficientClassMembers):
        # Quota leaves 0 nodes, fewer than n_val + 1.
        pipeline.node_split_citation(balanced, seed=0, n_per_class=15, n_val=10)


def test_node_split_fraction_sizes():
    labels = np.zeros(183)
    split = pipeline.node_split_fraction(labels, seed=0)
    assert (len(split.train), len(split.val), len(split.test)) == (109, 36, 38)
    tiny = pipeline.node_split_fraction(np.zeros(10), seed=0)
    assert (len(tiny.train), len(tiny.val), len(tiny.test)) == (6, 2, 2)
    all_train = pipeline.node_split_fraction(np.zeros(20), fractions=(1.0, 0.0, 0.0))
    assert len(all_train.train) == 20 and len(all_train.test) == 0
    joined = np.concatenate([split.train, split.val, split.test])
    assert len(np.unique(joined)) == 183
    with pytest.raises(ValueError):
        pipeline.node_split_fraction(labels, fractions=(0.5, 0.2, 0.2))


def test_node_split_auto_falls_back():
    small = np.array([0, 1] * 10)
    auto = pipeline._node_split(small, seed=4, strategy="auto")
    fraction = pipeline.node_split_fraction(small, seed=4)
    assert np.array_equal(auto.train, fraction.train)
    with pytest.raises(InsufficientClassMembers):
        pipeline._node_split(small, seed=4, strategy="citation")
    with pytest.raises(ValueError):
        pipeline._node_split(small, seed=4, strategy="random")


def test_link_split_sizes_and_coverage():
    rng = np.random.default_rng(3)
    g = _random_digraph(rng, 20, p=0.3)
    m = g.n_edges
    n_val, n_test = int(0.05 * m), int(0.15 * m)
    for task in ("link_existence", "link_direction"):
        split = pipeline.link_split(g, seed=0, task=task)
        per_label = 2 if task == "link_existence" else 1
        assert len(split.val_pairs) == per_label * n_val
        assert len(split.test_pairs) == per_label * n_test
        assert len(split.train_pairs) == per_label * (m - n_val - n_test)
        assert split.train_graph.n_edges == m - n_val - n_test
        # Every originally active node keeps an edge in the train graph.
        before = g.in_degrees() + g.out_degrees()
        after = split.train_graph.in_degrees() + split.train_graph.out_degrees()
        assert np.all(after[before > 0] > 0)
    with pytest.raises(ValueError):
        pipeline.link_split(g, seed=0, task="node")


def test_link_existence_negatives_are_clean():
    rng = np.random.default_rng(4)
    g = _random_digraph(rng, 15, p=0.3)
    split = pipeline.link_split(g, seed=7, task="link_existence")
    seen_negatives = set()
    for pairs, labels in (
        (split.train_pairs, split.train_labels),
        (split.val_pairs, split.val_labels),
        (split.test_pairs, split.test_labels),
    ):
        for (u, v), label in zip(pairs, labels):
            if label == 0:
                assert g.has_edge(u, v)
            else:
                assert not g.has_edge(u, v)
                assert (u, v) not in seen_negatives  # disjoint across partitions
                seen_negatives.add((u, v))
        assert np.sum(labels == 0) == np.sum(labels == 1)


def test_link_direction_labels_record_orientation():
    rng = np.random.default_rng(5)
    g = _random_digraph(rng, 15, p=0.3)
    split = pipeline.link_split(g, seed=9, task="link_direction")
    for pairs, labels in (
        (split.train_pairs, split.train_labels),
        (split.val_pairs, split.val_labels),
        (split.test_pairs, split.test_labels),
    ):
        for (u, v), label in zip(pairs, labels):
            if label == 0:
                assert g.has_edge(u, v)
            else:
                assert g.has_edge(v, u)


def test_link_direction_presentation_is_balanced():
    rng = np.random.default_rng(6)
    g = _random_digraph(rng, 20, p=0.25)
    rates = []
    for seed in range(300):
        split = pipeline.link_split(g, seed=seed, task="link_direction")
        labels = np.concatenate(
            [split.train_labels, split.val_labels, split.test_labels]
        )
        rates.append(labels.mean())
    assert 0.45 < np.mean(rates) < 0.55


def test_link_split_retry_exhausted():
    # Every edge touches a leaf, so any removal disconnects a node.
    star = Digraph(21, [(0, i) for i in range(1, 21)])
    with pytest.raises(RetryExhausted):
        pipeline.link_split(star, seed=0, task="link_existence")


def test_sample_nonedges_exhaustion():
    rng = np.random.default_rng(7)
    with pytest.raises(RetryExhausted):
        pipeline._sample_nonedges(2, 1, {(0, 1), (1, 0)}, rng)


def test_load_dataset(tmp_path):
    root = _write_dataset(tmp_path)
    ds = pipeline.load_dataset(str(root))
    assert ds.name == "tiny"
    assert ds.graph.n_nodes == 24
    assert ds.features.shape == (24, 2)
    assert ds.labels.shape == (24,)
    with pytest.raises(DataFormatError):
        pipeline.load_dataset(str(tmp_path / "missing"))
    (root / "labels.csv").write_text("\n".join(["0"] * 7) + "\n")
    with pytest.raises(DataFormatError):
        pipeline.load_dataset(str(root))


def test_load_dataset_optional_files(tmp_path):
    root = tmp_path / "bare"
    root.mkdir()
    write_edge_list(Digraph(4, [(0, 1), (2, 3)]), root / "edges.tsv")
    ds = pipeline.load_dataset(str(root))
    assert ds.features is None and ds.labels is None


def test_load_config(tmp_path):
    root = _write_dataset(tmp_path)
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"dataset": "tiny", "bank": "linear"}))
    config = pipeline.load_config(str(path))
    assert config["dataset"] == str(root)  # resolved against the config dir
    assert config["bank"] == "linear"
    assert config["q"] == 0.25  # default filled in

    path.write_text(json.dumps({"dataset": "tiny", "banana": 3}))
    with pytest.raises(DataFormatError):
        pipeline.load_config(str(path))
    path.write_text(json.dumps({"bank": "haar"}))
    with pytest.raises(DataFormatError):
        pipeline.load_config(str(path))
    path.write_text("{not json")
    with pytest.raises(DataFormatError):
        pipeline.load_config(str(path))


def test_run_experiment_report(tmp_path):
    root = _write_dataset(tmp_path)
    config = _fast_config(root, n_repeats=3, seed=5)
    report = pipeline.run_experiment(config)
    assert [r["seed"] for r in report["repeats"]] == [5, 6, 7]
    accs = [r["test_accuracy"] for r in report["repeats"]]
    assert report["mean_accuracy"] == pytest.approx(np.mean(accs))
    assert report["std_accuracy"] == pytest.approx(np.std(accs, ddof=1))
    assert report["model"] == "framelet"
    assert report["wall_clock_seconds"] > 0
    single = pipeline.run_experiment(_fast_config(root, n_repeats=1))
    assert single["std_accuracy"] == 0.0


def test_run_experiment_is_deterministic(tmp_path):
    root = _write_dataset(tmp_path)
    config = _fast_config(root)
    a = pipeline.run_experiment(config)
    b = pipeline.run_experiment(config)
    assert a["repeats"] == b["repeats"]


def test_run_experiment_parallel_matches_serial(tmp_path):
    root = _write_dataset(tmp_path)
    config = _fast_config(root)
    serial = pipeline.run_experiment(config, jobs=1)
    parallel = pipeline.run_experiment(config, jobs=2)
    assert serial["repeats"] == parallel["repeats"]
    assert serial["mean_accuracy"] == parallel["mean_accuracy"]


def test_run_experiment_checkpoint(tmp_path):
    root = _write_dataset(tmp_path)
    config = _fast_config(root)
    ckpt = tmp_path / "best.json"
    report = pipeline.run_experiment(config, checkpoint_path=str(ckpt))
    assert ckpt.exists()
    ds = pipeline.load_dataset(str(root))
    system = build_exact(
        eig_hermitian(magnetic_laplacian(ds.graph, 0.1)), make_bank("haar"), 2, 0.1
    )
    model = nn.load_checkpoint(str(ckpt), system)
    assert model.task == "node"
    best = max(r["test_accuracy"] for r in report["repeats"])
    assert best >= report["mean_accuracy"]
    with pytest.raises(ValueError):
        pipeline.run_experiment(config, checkpoint_path=str(ckpt), model_kind="gcn")


def test_run_experiment_gcn_and_link(tmp_path):
    root = _write_dataset(tmp_path)
    gcn = pipeline.run_experiment(_fast_config(root, n_repeats=1), model_kind="gcn")
    assert gcn["model"] == "gcn"
    with pytest.raises(ValueError):
        pipeline.run_experiment(
            _fast_config(root, task="link_existence", n_repeats=1), model_kind="gcn"
        )
    link = pipeline.run_experiment(
        _fast_config(root, task="link_existence", n_repeats=1, epochs=30)
    )
    assert 0.0 <= link["mean_accuracy"] <= 1.0


def test_denoise_curve_row_order(tmp_path):
    root = _write_dataset(tmp_path)
    config = _fast_config(root, epochs=30, n_repeats=2)
    rows = pipeline.denoise_curve(config, sigmas=[0.0, 10.0])
    assert [(r["model"], r["sigma"]) for r in rows] == [
        ("framelet", 0.0),
        ("framelet", 10.0),
        ("gcn", 0.0),
        ("gcn", 10.0),
    ]
    for row in rows:
        assert set(row) == {"model", "sigma", "mean", "std"}
        assert 0.0 <= row["mean"] <= 1.0


def test_denoise_zero_sigma_matches_clean_run(tmp_path):
    root = _write_dataset(tmp_path)
    config = _fast_config(root, epochs=30)
    rows = pipeline.denoise_curve(config, sigmas=[0.0])
    clean = pipeline.run_experiment({**config, "noise_sigma": 0.0})
    assert rows[0]["mean"] == clean["mean_accuracy"]
    assert rows[0]["std"] == clean["std_accuracy"]
