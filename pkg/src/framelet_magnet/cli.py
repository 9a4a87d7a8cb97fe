"""Command-line interface: transform utilities and experiment drivers.

Exit codes are fixed for CI use: 0 success, 1 verification tolerance
failure, 2 usage errors (including unknown bank names and out-of-range
charge), 3 data errors, 4 training divergence. Only data goes to stdout;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .banks import (
    BANK_NAMES,
    DEFAULT_SIGMOID_ALPHA,
    make_bank,
    mra_scaling_check,
    verify_identity,
)
from .errors import (
    DataFormatError,
    FrameletMagnetError,
    IndexOutOfRange,
    InsufficientClassMembers,
    InvalidCharge,
    NonFiniteLoss,
    NotMRABank,
    RetryExhausted,
    ShapeMismatch,
    UnknownBank,
)
from .framelets import (
    FrameletCoefficients,
    build_exact,
    build_fast,
    framelet_atom,
    mgft,
    reconstruct,
    tightness_residual,
)
from .graphs import magnetic_laplacian, magnetic_laplacian_sparse, read_edge_list
from .pipeline import denoise_curve, load_config, run_experiment
from .spectral import eig_hermitian

HERMITICITY_TOL = 1e-12
MIN_EIGENVALUE_TOL = -1e-10
IDENTITY_TOL = 1e-9
TIGHTNESS_TOL = 1e-8
MRA_TOL = 1e-6


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _read_signal(path, n_nodes):
    try:
        arr = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
    if arr.shape[0] != n_nodes:
        raise DataFormatError(f"{path}: {arr.shape[0]} rows for {n_nodes} nodes")
    if arr.shape[1] == 1:
        return arr[:, 0].astype(np.complex128)
    if arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    raise DataFormatError(f"{path}: expected 1 or 2 columns, found {arr.shape[1]}")


def _format_complex_lines(values) -> str:
    return "\n".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in values)


def _build_system(graph, args):
    bank = make_bank(args.bank, sigmoid_alpha=args.sigmoid_alpha)
    if args.mode == "exact":
        lap = magnetic_laplacian(graph, args.q)
        return build_exact(eig_hermitian(lap), bank, args.levels, args.q)
    lap = magnetic_laplacian_sparse(graph, args.q)
    return build_fast(lap, bank, args.levels, args.cheb_degree, q=args.q)


def cmd_transform(args) -> int:
    graph = read_edge_list(args.graph)
    system = _build_system(graph, args)
    signal = _read_signal(args.signal, graph.n_nodes)
    coeffs = mgft(system, signal)
    lines = ["block_index,r,s,node,real,imag"]
    for j, (r, s) in enumerate(coeffs.labels):
        for node in range(graph.n_nodes):
            v = coeffs.blocks[j, node]
            lines.append(f"{j},{r},{s},{node},{float(v.real)!r},{float(v.imag)!r}")
    _emit("\n".join(lines), args.out)
    return 0


def cmd_reconstruct(args) -> int:
    graph = read_edge_list(args.graph)
    system = _build_system(graph, args)
    try:
        table = np.loadtxt(args.coeffs, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise DataFormatError(f"{args.coeffs}: {exc}") from exc
    if table.shape[1] != 6:
        raise DataFormatError(f"{args.coeffs}: expected 6 columns")
    blocks = np.zeros((system.n_blocks, graph.n_nodes), dtype=np.complex128)
    for row in table:
        j, r, s, node = (int(v) for v in row[:4])
        if not 0 <= j < system.n_blocks:
            raise DataFormatError(f"{args.coeffs}: block index {j} out of range")
        if system.labels[j] != (r, s):
            raise DataFormatError(
                f"{args.coeffs}: block {j} labelled {(r, s)}, expected {system.labels[j]}"
            )
        if not 0 <= node < graph.n_nodes:
            raise DataFormatError(f"{args.coeffs}: node {node} out of range")
        blocks[j, node] = row[4] + 1j * row[5]
    coeffs = FrameletCoefficients(
        blocks=blocks,
        labels=system.labels,
        q=system.q,
        n_scales=system.n_scales,
        mode=system.mode,
    )
    signal = reconstruct(system, coeffs)
    _emit(_format_complex_lines(signal), args.out)
    return 0


def cmd_verify(args) -> int:
    graph = read_edge_list(args.graph)
    bank = make_bank(args.bank, sigmoid_alpha=args.sigmoid_alpha)
    lap = magnetic_laplacian(graph, args.q)
    hermiticity = float(np.abs(lap.matrix - lap.matrix.conj().T).max())
    eigsys = eig_hermitian(lap)
    min_eig = float(eigsys.eigenvalues.min())
    identity_dev = verify_identity(bank)
    system = build_exact(eigsys, bank, args.levels, args.q)
    tightness = tightness_residual(system)
    lines = [
        f"hermiticity_residual={hermiticity!r}",
        f"min_eigenvalue={min_eig!r}",
        f"identity_deviation={identity_dev!r}",
        f"tightness_residual={tightness!r}",
    ]
    ok = (
        hermiticity < HERMITICITY_TOL
        and min_eig >= MIN_EIGENVALUE_TOL
        and identity_dev < IDENTITY_TOL
        and tightness < TIGHTNESS_TOL
    )
    try:
        mra = max(mra_scaling_check(bank, d) for d in np.linspace(0.0, np.pi / 2, 17))
        lines.append(f"mra_residual={mra!r}")
        ok = ok and mra < MRA_TOL
    except NotMRABank:
        lines.append("mra_residual=skipped")
    _emit("\n".join(lines), None)
    return 0 if ok else 1


def cmd_train(args) -> int:
    config = load_config(args.config)
    if args.n_repeats is not None:
        config["n_repeats"] = args.n_repeats
    if args.seed is not None:
        config["seed"] = args.seed
    report = run_experiment(config, jobs=args.jobs, checkpoint_path=args.checkpoint)
    text = json.dumps(report, indent=2)
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    sys.stdout.write(text + "\n")
    return 0


def cmd_denoise(args) -> int:
    config = load_config(args.config)
    try:
        sigmas = [float(s) for s in args.sigmas.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise DataFormatError(f"bad --sigmas value: {args.sigmas!r}") from exc
    if not sigmas:
        raise DataFormatError("--sigmas must list at least one value")
    rows = denoise_curve(config, sigmas, jobs=args.jobs)
    lines = ["model,sigma,mean,std"]
    for row in rows:
        lines.append(
            f"{row['model']},{float(row['sigma'])!r},"
            f"{float(row['mean'])!r},{float(row['std'])!r}"
        )
    _emit("\n".join(lines), args.out)
    return 0


def cmd_atoms(args) -> int:
    graph = read_edge_list(args.graph)
    bank = make_bank(args.bank, sigmoid_alpha=args.sigmoid_alpha)
    eigsys = eig_hermitian(magnetic_laplacian(graph, args.q))
    atom = framelet_atom(eigsys, bank, args.node, args.level, args.band)
    _emit(_format_complex_lines(atom), args.out)
    return 0


def _add_bank_flags(parser):
    parser.add_argument("--bank", default="haar", help=f"one of {', '.join(BANK_NAMES)}")
    parser.add_argument("--q", type=float, default=0.25, help="charge parameter in [0, 0.25]")
    parser.add_argument(
        "--sigmoid-alpha", type=float, default=DEFAULT_SIGMOID_ALPHA,
        help="steepness of the sigmoid bank",
    )


def _add_system_flags(parser):
    _add_bank_flags(parser)
    parser.add_argument("--levels", type=int, default=2, help="dilation levels S")
    parser.add_argument("--mode", choices=("exact", "chebyshev"), default="exact")
    parser.add_argument("--cheb-degree", type=int, default=32)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framelet-magnet",
        description="Framelet transforms and spectral convolution networks "
        "on directed graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="decompose a signal into framelet coefficients")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--signal", required=True, help="per-node values, 'real' or 'real,imag' lines")
    _add_system_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("reconstruct", help="synthesize a signal from a coefficient CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--coeffs", required=True, help="CSV from the transform command")
    _add_system_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify", help="check Laplacian, identity, and tightness tolerances")
    p.add_argument("--graph", required=True)
    _add_bank_flags(p)
    p.add_argument("--levels", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("train", help="run a training experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="also write the report JSON here")
    p.add_argument("--checkpoint", default=None, help="write the best repeat's model here")
    p.add_argument("--n-repeats", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("denoise", help="accuracy-vs-noise sweep against the GCN comparator")
    p.add_argument("--config", required=True)
    p.add_argument("--sigmas", required=True, help="comma-separated noise levels")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("atoms", help="print one framelet atom as 'real,imag' lines")
    p.add_argument("--graph", required=True)
    _add_bank_flags(p)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--band", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_atoms)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (UnknownBank, InvalidCharge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonFiniteLoss as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return 4
    except (
        DataFormatError,
        ShapeMismatch,
        IndexOutOfRange,
        InsufficientClassMembers,
        RetryExhausted,
        NotMRABank,
        FrameletMagnetError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry():
    sys.exit(main())
