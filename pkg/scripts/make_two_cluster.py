"""Regenerate the shipped two-cluster synthetic benchmark.

80 nodes in two feature clusters of 40 (well-separated Gaussian blobs,
labels = cluster). The directed graph is an independent Erdos-Renyi
digraph, deliberately uncorrelated with the labels so that graph
smoothing cannot rescue accuracy once the features are drowned in noise.

Run from the repository root: python scripts/make_two_cluster.py
"""

import os

import numpy as np

from framelet_magnet.graphs import Digraph, write_edge_list

SEED = 20240517
N_PER_CLUSTER = 40
EDGE_PROB = 0.06
OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data", "two_cluster")


def main():
    rng = np.random.default_rng(SEED)
    n = 2 * N_PER_CLUSTER
    labels = np.repeat([0, 1], N_PER_CLUSTER)
    centers = np.array([[1.2, -1.2], [-1.2, 1.2]])
    features = centers[labels] + 0.35 * rng.standard_normal((n, 2))
    edges = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and rng.random() < EDGE_PROB
    ]
    graph = Digraph(n, edges)
    os.makedirs(OUT_DIR, exist_ok=True)
    write_edge_list(graph, os.path.join(OUT_DIR, "edges.tsv"))
    np.savetxt(os.path.join(OUT_DIR, "features.csv"), features, delimiter=",", fmt="%.8f")
    np.savetxt(os.path.join(OUT_DIR, "labels.csv"), labels, fmt="%d")
    print(f"wrote {n} nodes, {graph.n_edges} edges to {os.path.normpath(OUT_DIR)}")


if __name__ == "__main__":
    main()
