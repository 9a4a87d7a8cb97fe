"""NumPy/SciPy fallback for the Chebyshev recurrence kernel.

Semantics match framelet_magnet._cheb_kernel.cheb_apply: evaluate
sum_k coeffs[k] * T_k(alpha * L - I) @ x via the three-term recurrence,
one sparse mat-mat product per term.
"""
import numpy as np


def cheb_apply(mat, alpha, coeffs, x):
    t_prev = np.array(x, dtype=np.complex128)
    out = coeffs[0] * t_prev
    if len(coeffs) == 1:
        return out
    t_cur = alpha * (mat @ t_prev) - t_prev
    out += coeffs[1] * t_cur
    for c in coeffs[2:]:
        t_next = 2.0 * (alpha * (mat @ t_cur) - t_cur) - t_prev
        out += c * t_next
        t_prev, t_cur = t_cur, t_next
    return out
