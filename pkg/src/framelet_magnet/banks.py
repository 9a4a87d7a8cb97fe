"""The five built-in (quasi-)framelet filter banks on [0, pi].

Each bank is a family z_0..z_R of real functions satisfying the identity
condition sum_r z_r(delta)^2 = 1 on [0, pi], with z_0 non-increasing from 1
and z_R non-decreasing toward 1. Haar, Linear, and Quadratic come from
multiresolution analysis (their z_r are filter symbols with an associated
refinable function); Sigmoid and Entropy are quasi banks defined directly in
the frequency domain, so they carry no scaling functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import NotMRABank, UnknownBank

BANK_NAMES = ("haar", "linear", "quadratic", "sigmoid", "entropy")

# Sharpness of the sigmoid transition at pi/2. Values much beyond ~8 push a
# singularity of the analytic continuation close to the real axis and stall
# Chebyshev convergence (alpha=5 reaches ~8e-7 sup error at degree 32;
# alpha=20 would still sit at ~2e-2). Kept configurable per bank instance.
DEFAULT_SIGMOID_ALPHA = 5.0

# Truncation depth of the infinite product defining the refinable function;
# 20 factors leave < 1e-12 truncation error on [0, pi].
REFINABLE_PRODUCT_TERMS = 20

IDENTITY_GRID_SIZE = 10_001


@dataclass(frozen=True)
class FilterBank:
    """Named family of R+1 spectral modulation functions on [0, pi]."""

    name: str
    kind: str  # "mra" or "quasi"
    functions: tuple
    params: dict = field(default_factory=dict)

    @property
    def n_highpass(self):
        """R, the number of high-pass filters."""
        return len(self.functions) - 1

    def __call__(self, r, delta):
        """Evaluate filter r at (an array of) spectral arguments."""
        return self.functions[r](np.asarray(delta, dtype=np.float64))


def _haar_low(d):
    return np.cos(d / 2.0)


def _haar_high(d):
    return np.sin(d / 2.0)


def _linear_low(d):
    return np.cos(d / 2.0) ** 2


def _linear_mid(d):
    return np.sin(d) / np.sqrt(2.0)


def _linear_high(d):
    return np.sin(d / 2.0) ** 2


def _quadratic(r, d):
    # Binomial tight bank: squares sum to (cos^2 + sin^2)^3 = 1.
    c, s = np.cos(d / 2.0), np.sin(d / 2.0)
    scale = np.sqrt(3.0) if r in (1, 2) else 1.0
    return scale * c ** (3 - r) * s**r


def _sigmoid_low(alpha, d):
    return 1.0 / np.sqrt(1.0 + np.exp(alpha * (d - np.pi / 2.0)))


def _sigmoid_high(alpha, d):
    low = _sigmoid_low(alpha, d)
    return np.sqrt(np.clip(1.0 - low * low, 0.0, None))


def _smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def _entropy_low(d):
    return np.sqrt(np.clip(1.0 - _smoothstep(d / np.pi), 0.0, None))


def _entropy_high(d):
    return np.sqrt(np.clip(_smoothstep(d / np.pi), 0.0, None))


def make_bank(name: str, sigmoid_alpha: float = DEFAULT_SIGMOID_ALPHA) -> FilterBank:
    """Construct one of the built-in banks by (case-insensitive) name."""
    key = str(name).lower()
    if key == "haar":
        return FilterBank("haar", "mra", (_haar_low, _haar_high))
    if key == "linear":
        return FilterBank("linear", "mra", (_linear_low, _linear_mid, _linear_high))
    if key == "quadratic":
        return FilterBank(
            "quadratic", "mra", tuple(partial(_quadratic, r) for r in range(4))
        )
    if key == "sigmoid":
        alpha = float(sigmoid_alpha)
        return FilterBank(
            "sigmoid",
            "quasi",
            (partial(_sigmoid_low, alpha), partial(_sigmoid_high, alpha)),
            params={"sigmoid_alpha": alpha},
        )
    if key == "entropy":
        return FilterBank("entropy", "quasi", (_entropy_low, _entropy_high))
    raise UnknownBank(f"unknown bank {name!r}; choose from {', '.join(BANK_NAMES)}")


def verify_identity(bank: FilterBank, grid_size: int = IDENTITY_GRID_SIZE) -> float:
    """Max deviation of sum_r z_r(delta)^2 from 1 on a uniform [0, pi] grid."""
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    grid = np.linspace(0.0, np.pi, grid_size)
    total = np.zeros_like(grid)
    for r in range(bank.n_highpass + 1):
        total += bank(r, grid) ** 2
    return float(np.max(np.abs(total - 1.0)))


def refinable_lowpass(bank: FilterBank, delta):
    """Refinable function of an MRA bank: product of z_0(delta / 2^j), j >= 1.

    Truncated at REFINABLE_PRODUCT_TERMS factors. For Haar this converges to
    sin(delta/2) / (delta/2).
    """
    if bank.kind != "mra":
        raise NotMRABank(f"bank {bank.name!r} defines no scaling functions")
    delta = np.asarray(delta, dtype=np.float64)
    out = np.ones_like(delta)
    for j in range(1, REFINABLE_PRODUCT_TERMS + 1):
        out = out * bank(0, delta / 2.0**j)
    return out


def scaling_function(bank: FilterBank, r: int, delta):
    """Scaling function zeta_r of an MRA bank.

    zeta_0 is the truncated refinable product; the high-pass scaling functions
    come from the two-scale construction zeta_r(x) = z_r(x/2) * zeta_0(x/2).
    """
    if r == 0:
        return refinable_lowpass(bank, delta)
    delta = np.asarray(delta, dtype=np.float64)
    return bank(r, delta / 2.0) * refinable_lowpass(bank, delta / 2.0)


def mra_scaling_check(bank: FilterBank, delta: float) -> float:
    """Residual of the two-scale relation at a single point delta in [0, pi/2].

    Evaluates |zeta_r(2*delta) - z_r(delta) * zeta_0(delta)| and returns the
    max over r = 0..R. For r >= 1 the relation holds by construction; r = 0
    measures the truncation error of the refinable product. Quasi banks
    (sigmoid, entropy) have no scaling functions and raise.
    """
    if bank.kind != "mra":
        raise NotMRABank(f"bank {bank.name!r} is a quasi bank; no scaling relation to check")
    delta = float(delta)
    zeta0_delta = refinable_lowpass(bank, delta)
    residuals = [
        abs(scaling_function(bank, r, 2.0 * delta) - bank(r, delta) * zeta0_delta)
        for r in range(bank.n_highpass + 1)
    ]
    return float(max(residuals))
