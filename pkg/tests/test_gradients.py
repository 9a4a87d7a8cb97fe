"""Finite-difference oracles for every hand-rolled gradient.

Each check perturbs every float64 parameter component by +-eps, rebuilds
the loss, and compares the centered difference against the analytic
gradient entry. The perturbation goes through the same interleaved views
the optimizer uses, so complex parameters are probed per real component.
"""

import numpy as np

from framelet_magnet import baseline, nn
from framelet_magnet.banks import make_bank
from framelet_magnet.framelets import build_exact, build_fast
from framelet_magnet.graphs import Digraph, magnetic_laplacian
from framelet_magnet.spectral import eig_hermitian

EPS = 1e-5
REL_TOL = 1e-4


def _random_digraph(rng, n_nodes, p=0.4):
    mask = rng.random((n_nodes, n_nodes)) < p
    np.fill_diagonal(mask, False)
    return Digraph(n_nodes, [tuple(e) for e in np.argwhere(mask)])


def max_relative_error(loss_fn, params, grads):
    """Worst rel. error of analytic vs centered-difference gradient entries."""
    worst = 0.0
    for p, g in zip(params, grads):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        for k in range(flat_p.size):
            original = flat_p[k]
            flat_p[k] = original + EPS
            up = loss_fn()
            flat_p[k] = original - EPS
            down = loss_fn()
            flat_p[k] = original
            fd = (up - down) / (2.0 * EPS)
            err = abs(fd - flat_g[k]) / max(abs(fd), abs(flat_g[k]), 1e-6)
            worst = max(worst, err)
    return worst


def _framelet_setup(rng, bank_name, mode, task):
    n = 6
    g = _random_digraph(rng, n)
    lap = magnetic_laplacian(g, 0.25)
    bank = make_bank(bank_name)
    if mode == "exact":
        system = build_exact(eig_hermitian(lap), bank, 2, 0.25)
    else:
        system = build_fast(lap, bank, 2, degree=32, q=0.25)
    model = nn.init_model(system, 2, [3], 2, task, rng, dropout=0.0)
    features = rng.standard_normal((n, 2))
    if task == "node":
        batch = nn.Batch(
            features=features, labels=rng.integers(2, size=n), nodes=np.arange(n)
        )
    else:
        pairs = np.array([(0, 1), (2, 3), (4, 5), (1, 4)])
        batch = nn.Batch(features=features, labels=rng.integers(2, size=4), pairs=pairs)
    return model, batch


def _check_framelet(bank_name, mode, task, seed):
    rng = np.random.default_rng(seed)
    model, batch = _framelet_setup(rng, bank_name, mode, task)
    _, grads = nn.loss_and_grad(model, batch, training=False)

    def loss_fn():
        return nn.loss_and_grad(model, batch, training=False)[0]

    worst = max_relative_error(loss_fn, nn.parameter_arrays(model), grads)
    assert worst < REL_TOL, f"{bank_name}/{mode}/{task}: rel err {worst:.3e}"


def test_gradients_node_exact():
    _check_framelet("haar", "exact", "node", seed=0)
    _check_framelet("quadratic", "exact", "node", seed=1)


def test_gradients_node_chebyshev():
    _check_framelet("sigmoid", "chebyshev", "node", seed=2)


def test_gradients_link_tasks():
    _check_framelet("linear", "exact", "link_direction", seed=3)
    _check_framelet("entropy", "chebyshev", "link_existence", seed=4)


def test_gradients_two_layers():
    rng = np.random.default_rng(5)
    g = _random_digraph(rng, 6)
    system = build_exact(eig_hermitian(magnetic_laplacian(g, 0.1)), make_bank("haar"), 2, 0.1)
    model = nn.init_model(system, 2, [3, 3], 2, "node", rng, dropout=0.0)
    batch = nn.Batch(
        features=rng.standard_normal((6, 2)),
        labels=rng.integers(2, size=6),
        nodes=np.arange(6),
    )
    _, grads = nn.loss_and_grad(model, batch, training=False)
    worst = max_relative_error(
        lambda: nn.loss_and_grad(model, batch, training=False)[0],
        nn.parameter_arrays(model),
        grads,
    )
    assert worst < REL_TOL, f"two layers: rel err {worst:.3e}"


def test_gcn_gradients():
    rng = np.random.default_rng(6)
    g = _random_digraph(rng, 7)
    model = baseline.init_gcn(g, 3, [4, 3], 2, rng, dropout=0.0)
    batch = nn.Batch(
        features=rng.standard_normal((7, 3)),
        labels=rng.integers(2, size=7),
        nodes=np.arange(7),
    )
    _, grads = baseline.loss_and_grad(model, batch, training=False)
    worst = max_relative_error(
        lambda: baseline.loss_and_grad(model, batch, training=False)[0],
        baseline.parameter_arrays(model),
        grads,
    )
    assert worst < REL_TOL, f"gcn: rel err {worst:.3e}"
