"""Pure-Python/NumPy versions of the compiled kernels in ``_core.pyx``."""

import numpy as np
import scipy.sparse as sp


def gram_power_iteration(row_ptr, row_cols, row_data, col_ptr, col_rows, col_data, v0, tol, max_iter):
    n_rows, n_cols = len(row_ptr) - 1, len(v0)
    mat = sp.csr_matrix((row_data, row_cols, row_ptr), shape=(n_rows, n_cols))
    mat_t = sp.csr_matrix((col_data, col_rows, col_ptr), shape=(n_cols, n_rows))
    v = np.array(v0, dtype=np.float64)
    v /= np.linalg.norm(v)
    lam, prev = 0.0, -1.0
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        y = mat @ v
        lam = float(y @ y)
        u = mat_t @ y
        norm = np.linalg.norm(u)
        if norm == 0.0:
            break
        if abs(lam - prev) <= tol * max(lam, 1.0):
            converged = True
            break
        prev = lam
        v = u / norm
    return v, lam, prev, it, converged


def sample_paths(indptr, indices, cdf, complete, start, uniforms):
    n_paths, length = uniforms.shape
    out = np.full((n_paths, length + 1), -1, dtype=np.int64)
    state = np.full(n_paths, start, dtype=np.int64)
    alive = np.ones(n_paths, dtype=bool)
    out[:, 0] = start
    for j in range(length):
        alive &= complete[state].astype(bool) & (indptr[state + 1] > indptr[state])
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        current = state[idx]
        for s in np.unique(current):
            rows = idx[current == s]
            lo, hi = indptr[s], indptr[s + 1]
            pick = np.searchsorted(cdf[lo:hi - 1], uniforms[rows, j], side="right")
            state[rows] = indices[lo + pick]
        out[idx, j + 1] = state[idx]
    return out
