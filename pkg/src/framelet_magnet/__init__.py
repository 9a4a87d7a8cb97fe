"""Framelet transforms and spectral convolution networks on directed graphs.

The package builds tight framelet systems on the magnetic Laplacian of a
digraph, offers an exact eigendecomposition route and a Chebyshev
polynomial route for the analysis and synthesis operators, and stacks the
transform into a trainable convolution network with node-classification,
link-prediction, and denoising pipelines.
"""

from .banks import (
    BANK_NAMES,
    DEFAULT_SIGMOID_ALPHA,
    FilterBank,
    make_bank,
    mra_scaling_check,
    refinable_lowpass,
    scaling_function,
    verify_identity,
)
from .chebyshev import (
    CsrHermitian,
    chebyshev_apply,
    chebyshev_eval,
    chebyshev_fit,
    kernel_backend,
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
    FrameletSystem,
    block_labels,
    build_exact,
    build_fast,
    framelet_atom,
    mgft,
    reconstruct,
    tightness_residual,
)
from .graphs import (
    Digraph,
    MagneticLaplacian,
    magnetic_laplacian,
    magnetic_laplacian_sparse,
    read_edge_list,
    write_edge_list,
)
from .nn import (
    Batch,
    FrameletConvLayer,
    Model,
    TrainConfig,
    TrainReport,
    conv_forward,
    evaluate,
    init_model,
    load_checkpoint,
    loss_and_grad,
    pair_concat,
    parameter_arrays,
    save_checkpoint,
    train,
    unwind,
)
from .pipeline import (
    Dataset,
    LinkSplit,
    NodeSplit,
    add_noise,
    degree_features,
    denoise_curve,
    link_split,
    load_config,
    load_dataset,
    node_split_citation,
    node_split_fraction,
    run_experiment,
    standardize_columns,
)
from .spectral import EigenSystem, dilation_base, eig_hermitian

__version__ = "0.1.0"

__all__ = [
    "BANK_NAMES",
    "Batch",
    "CsrHermitian",
    "DEFAULT_SIGMOID_ALPHA",
    "DataFormatError",
    "Dataset",
    "Digraph",
    "EigenSystem",
    "FilterBank",
    "FrameletCoefficients",
    "FrameletConvLayer",
    "FrameletMagnetError",
    "FrameletSystem",
    "IndexOutOfRange",
    "InsufficientClassMembers",
    "InvalidCharge",
    "LinkSplit",
    "MagneticLaplacian",
    "Model",
    "NodeSplit",
    "NonFiniteLoss",
    "NotMRABank",
    "RetryExhausted",
    "ShapeMismatch",
    "TrainConfig",
    "TrainReport",
    "UnknownBank",
    "add_noise",
    "block_labels",
    "build_exact",
    "build_fast",
    "chebyshev_apply",
    "chebyshev_eval",
    "chebyshev_fit",
    "conv_forward",
    "degree_features",
    "denoise_curve",
    "dilation_base",
    "eig_hermitian",
    "evaluate",
    "framelet_atom",
    "init_model",
    "kernel_backend",
    "link_split",
    "load_checkpoint",
    "load_config",
    "load_dataset",
    "loss_and_grad",
    "magnetic_laplacian",
    "magnetic_laplacian_sparse",
    "make_bank",
    "mgft",
    "mra_scaling_check",
    "node_split_citation",
    "node_split_fraction",
    "pair_concat",
    "parameter_arrays",
    "read_edge_list",
    "reconstruct",
    "refinable_lowpass",
    "run_experiment",
    "save_checkpoint",
    "scaling_function",
    "standardize_columns",
    "tightness_residual",
    "train",
    "unwind",
    "verify_identity",
    "write_edge_list",
]
