# cython: language_level=3
"""Compiled hot loops: Gram power iteration on a sparse column-compressed
matrix and inverse-CDF batch sampling of Markov paths.

Both mirror :mod:`fusionwalk._fallback` operation for operation.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def gram_power_iteration(const int[::1] row_ptr, const int[::1] row_cols, const double[::1] row_data,
                         const int[::1] col_ptr, const int[::1] col_rows, const double[::1] col_data,
                         double[::1] v0, double tol, long max_iter):
    """Power iteration on ``G^T G`` with ``G`` given in both CSR and CSC form.

    Returns ``(v, lam, prev, iterations, converged)`` where ``lam = ||G v||^2``
    for the returned unit vector ``v``.
    """
    cdef Py_ssize_t n_rows = row_ptr.shape[0] - 1
    cdef Py_ssize_t n_cols = v0.shape[0]
    cdef cnp.ndarray[double, ndim=1] v_arr = np.array(v0, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef double[::1] y = np.zeros(n_rows, dtype=np.float64)
    cdef double[::1] u = np.zeros(n_cols, dtype=np.float64)
    cdef Py_ssize_t c, p, i
    cdef long it = 0
    cdef double lam = 0.0, prev = -1.0, acc, norm
    cdef bint converged = False

    with nogil:
        norm = 0.0
        for c in range(n_cols):
            norm += v[c] * v[c]
        norm = sqrt(norm)
        for c in range(n_cols):
            v[c] /= norm
        while it < max_iter:
            it += 1
            lam = 0.0
            for i in range(n_rows):
                acc = 0.0
                for p in range(row_ptr[i], row_ptr[i + 1]):
                    acc += row_data[p] * v[row_cols[p]]
                y[i] = acc
                lam += acc * acc
            norm = 0.0
            for c in range(n_cols):
                acc = 0.0
                for p in range(col_ptr[c], col_ptr[c + 1]):
                    acc += col_data[p] * y[col_rows[p]]
                u[c] = acc
                norm += acc * acc
            if norm == 0.0:
                break
            if fabs(lam - prev) <= tol * (lam if lam > 1.0 else 1.0):
                converged = True
                break
            prev = lam
            norm = sqrt(norm)
            for c in range(n_cols):
                v[c] = u[c] / norm
    return v_arr, lam, prev, it, converged


def sample_paths(const long long[::1] indptr, const long long[::1] indices,
                 const double[::1] cdf, const unsigned char[::1] complete,
                 long long start, const double[:, ::1] uniforms):
    cdef Py_ssize_t n_paths = uniforms.shape[0]
    cdef Py_ssize_t length = uniforms.shape[1]
    cdef cnp.ndarray[long long, ndim=2] out_arr = np.full((n_paths, length + 1), -1, dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef Py_ssize_t k, j, p, lo, hi
    cdef long long state
    cdef double x

    with nogil:
        for k in range(n_paths):
            state = start
            out[k, 0] = state
            for j in range(length):
                if not complete[state]:
                    break
                lo = indptr[state]
                hi = indptr[state + 1]
                if lo == hi:
                    break
                x = uniforms[k, j]
                p = lo
                while p < hi - 1 and x >= cdf[p]:
                    p += 1
                state = indices[p]
                out[k, j + 1] = state
    return out_arr
