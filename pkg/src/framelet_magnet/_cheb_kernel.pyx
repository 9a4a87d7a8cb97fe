# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fused Chebyshev recurrence over a CSR Hermitian matrix.

Evaluates sum_k coeffs[k] * T_k(alpha * L - I) @ x for a complex CSR matrix
L and an N x D complex signal x, fusing the sparse mat-vec, the spectral
shift, and the coefficient accumulation into one pass per term so no
intermediate temporaries are allocated inside the loop. Complex arrays are
viewed as interleaved float64 pairs; spelling the complex multiply out on
plain doubles keeps the accumulators in registers.
"""
import numpy as np


cdef inline void _recurrence_step(
    const long[::1] indptr,
    const long[::1] indices,
    const double[::1] data,
    double alpha,
    double coeff,
    double first_factor,
    const double[:, ::1] t_prev,
    const double[:, ::1] t_cur,
    double[:, ::1] t_next,
    double[:, ::1] out,
) noexcept nogil:
    # t_next = first_factor * (alpha * L @ t_cur - t_cur) - t_prev;
    # out += coeff * t_next. first_factor is 1 for the T_1 step (where
    # t_prev is all zeros) and 2 for every later step. Columns come in
    # real/imag pairs; two complex channels are processed per pass so the
    # four accumulator pairs stay in registers.
    cdef Py_ssize_t n = t_cur.shape[0]
    cdef Py_ssize_t w = t_cur.shape[1]  # 2 * channels
    cdef Py_ssize_t i, c, ptr, j, lo, hi
    cdef double ar, ai, br, bi
    cdef double acc0r, acc0i, acc1r, acc1i
    for i in range(n):
        lo = indptr[i]
        hi = indptr[i + 1]
        c = 0
        while c + 4 <= w:
            acc0r = acc0i = acc1r = acc1i = 0.0
            for ptr in range(lo, hi):
                j = indices[ptr]
                ar = data[2 * ptr]
                ai = data[2 * ptr + 1]
                br = t_cur[j, c]
                bi = t_cur[j, c + 1]
                acc0r += ar * br - ai * bi
                acc0i += ar * bi + ai * br
                br = t_cur[j, c + 2]
                bi = t_cur[j, c + 3]
                acc1r += ar * br - ai * bi
                acc1i += ar * bi + ai * br
            t_next[i, c] = first_factor * (alpha * acc0r - t_cur[i, c]) - t_prev[i, c]
            t_next[i, c + 1] = (
                first_factor * (alpha * acc0i - t_cur[i, c + 1]) - t_prev[i, c + 1]
            )
            t_next[i, c + 2] = (
                first_factor * (alpha * acc1r - t_cur[i, c + 2]) - t_prev[i, c + 2]
            )
            t_next[i, c + 3] = (
                first_factor * (alpha * acc1i - t_cur[i, c + 3]) - t_prev[i, c + 3]
            )
            out[i, c] += coeff * t_next[i, c]
            out[i, c + 1] += coeff * t_next[i, c + 1]
            out[i, c + 2] += coeff * t_next[i, c + 2]
            out[i, c + 3] += coeff * t_next[i, c + 3]
            c += 4
        while c < w:
            acc0r = acc0i = 0.0
            for ptr in range(lo, hi):
                j = indices[ptr]
                ar = data[2 * ptr]
                ai = data[2 * ptr + 1]
                br = t_cur[j, c]
                bi = t_cur[j, c + 1]
                acc0r += ar * br - ai * bi
                acc0i += ar * bi + ai * br
            t_next[i, c] = first_factor * (alpha * acc0r - t_cur[i, c]) - t_prev[i, c]
            t_next[i, c + 1] = (
                first_factor * (alpha * acc0i - t_cur[i, c + 1]) - t_prev[i, c + 1]
            )
            out[i, c] += coeff * t_next[i, c]
            out[i, c + 1] += coeff * t_next[i, c + 1]
            c += 2


def cheb_apply(indptr, indices, data, double alpha, coeffs, x):
    cdef const long[::1] indptr_v = indptr
    cdef const long[::1] indices_v = indices
    cdef const double[::1] data_v = data.view(np.float64).ravel()
    cdef double[::1] coeffs_v = coeffs
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t n_terms = coeffs_v.shape[0]

    out_arr = coeffs[0] * x
    if n_terms == 1:
        return out_arr
    cdef double[:, ::1] out = out_arr.view(np.float64)
    t_prev_arr = np.array(x, dtype=np.complex128)
    t_cur_arr = np.zeros((n, d), dtype=np.complex128)
    t_next_arr = np.zeros((n, d), dtype=np.complex128)
    cdef const double[:, ::1] t_prev = t_prev_arr.view(np.float64)
    cdef const double[:, ::1] t_cur = t_cur_arr.view(np.float64)
    cdef double[:, ::1] t_next = t_next_arr.view(np.float64)
    cdef const double[:, ::1] zeros = t_cur_arr.view(np.float64)
    cdef double[:, ::1] t_mut
    cdef Py_ssize_t k

    with nogil:
        # T_1 step: t_cur currently holds zeros, so reuse the generic step
        # with first_factor 1 and a zero t_prev slot.
        _recurrence_step(
            indptr_v, indices_v, data_v, alpha, coeffs_v[1], 1.0,
            zeros, t_prev, t_next, out,
        )
    # After the step: t_prev holds T_0 x, t_next holds T_1 x.
    t_cur_arr, t_next_arr = t_next_arr, t_cur_arr
    t_cur = t_cur_arr.view(np.float64)
    t_next = t_next_arr.view(np.float64)

    for k in range(2, n_terms):
        with nogil:
            _recurrence_step(
                indptr_v, indices_v, data_v, alpha, coeffs_v[k], 2.0,
                t_prev, t_cur, t_next, out,
            )
        t_prev_arr, t_cur_arr, t_next_arr = t_cur_arr, t_next_arr, t_prev_arr
        t_prev = t_prev_arr.view(np.float64)
        t_cur = t_cur_arr.view(np.float64)
        t_next = t_next_arr.view(np.float64)
    return out_arr
