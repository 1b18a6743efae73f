"""Random walks on fusion rings.

The walk driven by a probability measure ``mu`` and a dimension function
``d`` moves from ``s`` to ``t`` with probability

    p(s, t) = sum_r mu(r) m^t_{rs} d(t) / (d(r) d(s)).

Kernels are sparse row-stochastic matrices over the ring window.  On
truncated rings, rows whose fusion products leave the window lose mass; the
missing mass is recorded as ``leak`` and such rows are never trusted.
"""

from collections import defaultdict
from dataclasses import dataclass
from math import fsum

import numpy as np
import scipy.sparse as sp

from . import _backend
from .errors import DimensionMismatch, NotFinite, TruncationOverflow, ValidationError
from .ring import DimensionFunction

MEASURE_TOL = 1e-12
NULL_TOL = 1e-9


class Measure:
    """Finitely supported probability measure on ring labels."""

    def __init__(self, weights, *, tol=MEASURE_TOL, validate=True):
        self.weights = {str(k): float(v) for k, v in weights.items() if v != 0}
        if validate:
            if any(v < 0 for v in self.weights.values()):
                raise ValidationError("weights nonnegative", f"negative weight in {self.weights}")
            total = fsum(self.weights.values())
            if abs(total - 1.0) > tol:
                raise ValidationError("weights sum", f"weights sum to {total!r}, not 1")

    @classmethod
    def delta(cls, label):
        return cls({label: 1.0})

    @classmethod
    def uniform(cls, labels):
        labels = list(labels)
        return cls({s: 1.0 / len(labels) for s in labels}, tol=1e-12)

    @property
    def support(self):
        return tuple(self.weights)

    def __getitem__(self, label):
        return self.weights.get(label, 0.0)

    def __iter__(self):
        return iter(self.weights.items())

    def __repr__(self):
        return f"Measure({self.weights})"

    def check_window(self, ring):
        for s in self.weights:
            ring.index(s)

    def as_array(self, ring):
        vec = np.zeros(len(ring))
        for s, w in self.weights.items():
            vec[ring.index(s)] = w
        return vec

    def to_dict(self):
        return {"weights": dict(self.weights)}


@dataclass(frozen=True)
class Kernel:
    """Transition matrix ``p(s, t)`` over a ring window."""

    matrix: sp.csr_matrix
    leak: np.ndarray
    complete: np.ndarray
    basis: tuple
    dims: DimensionFunction

    @property
    def leak_free(self):
        return bool(self.complete.all())

    def dense(self):
        return self.matrix.toarray()

    def index(self, label):
        try:
            return self.basis.index(label)
        except ValueError:
            raise TruncationOverflow(f"label {label!r} outside the kernel window") from None


def _dims_for(ring, d):
    missing = [b for b in ring.basis if b not in d]
    if missing:
        raise DimensionMismatch(f"dimension undefined on {missing[:5]}")
    return d


def kernel(ring, d, mu):
    """Transition kernel of the walk driven by ``mu``."""
    _dims_for(ring, d)
    mu.check_window(ring)
    n = len(ring)
    index = {b: i for i, b in enumerate(ring.basis)}
    rows, cols, vals = [], [], []
    complete = np.ones(n, dtype=bool)
    for i, s in enumerate(ring.basis):
        ds = d[s]
        for r, w in mu:
            row, ok = ring.partial_product(r, s)
            if not ok:
                complete[i] = False
            scale = w / d[r]
            for t, m in row.items():
                rows.append(i)
                cols.append(index[t])
                # d(t)/d(s) first, so that the unit gives exactly 1
                vals.append(scale * m * (d[t] / ds))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    mat.sum_duplicates()
    mat.sort_indices()
    sums = np.asarray(mat.sum(axis=1)).ravel()
    leak = np.where(complete, 0.0, np.clip(1.0 - sums, 0.0, None))
    return Kernel(mat, leak, complete, ring.basis, d)


def convolve(ring, d, nu, mu):
    """``(nu * mu)(t) = sum nu(s) mu(r) m^t_{sr} d(t) / (d(s) d(r))``."""
    acc = defaultdict(float)
    for s, ws in nu:
        for r, wr in mu:
            scale = ws * wr / (d[s] * d[r])
            for t, m in ring.product(s, r).items():
                acc[t] += scale * m * d[t]
    order = {b: i for i, b in enumerate(ring.basis)}
    return Measure({t: acc[t] for t in sorted(acc, key=order.__getitem__)}, validate=False)


def apply_P(K, f):
    """``(P f)(s) = sum_t p(s, t) f(t)``; returns values and a reliability mask."""
    f = np.asarray(f, dtype=float)
    return K.matrix @ f, K.complete.copy()


@dataclass(frozen=True)
class GeneratingResult:
    status: str  # "Yes", "NoWithinDepth" or "No"
    depth: int | None
    reached: frozenset

    def __bool__(self):
        return self.status == "Yes"


def is_generating(ring, mu, max_depth=64):
    """Breadth-first search over the supports of ``mu, mu^2, ...``.

    An element first met at level ``n`` lies in the support of ``mu^n``.
    """
    supp = list(mu.support)
    target = set(ring.interior)
    level = set(supp)
    reached = set(level)
    depth = 1
    while True:
        if target <= reached:
            return GeneratingResult("Yes", depth, frozenset(reached))
        if depth >= max_depth:
            return GeneratingResult("NoWithinDepth", None, frozenset(reached))
        nxt = set()
        for x in level:
            for r in supp:
                row, _ = ring.partial_product(x, r)
                nxt.update(row)
        new = nxt - reached
        if not new:
            status = "NoWithinDepth" if ring.truncated else "No"
            return GeneratingResult(status, None, frozenset(reached))
        reached |= new
        level = new
        depth += 1


def is_symmetric(mu, ring):
    return all(mu[ring.dual(s)] == w for s, w in mu)


def complete_columns(ring, K, mu):
    """Columns ``t`` whose every predecessor row is in the window and complete."""
    if not ring.truncated:
        return np.ones(len(ring), dtype=bool)
    index = {b: i for i, b in enumerate(ring.basis)}
    out = np.zeros(len(ring), dtype=bool)
    for j, t in enumerate(ring.basis):
        ok = True
        for r in mu.support:
            # m^t_{rs} = m^s_{r_bar t}: predecessors of t are supp(r_bar * t)
            row, complete = ring.partial_product(ring.dual(r), t)
            if not complete or not all(K.complete[index[s]] for s in row):
                ok = False
                break
        out[j] = ok
    return out


def stationary_check(ring, d, mu, K=None):
    """``sup_t |sum_s d(s)^2 p(s,t) - d(t)^2| / d(t)^2`` over complete columns."""
    if K is None:
        K = kernel(ring, d, mu)
    dv = d.as_array(ring)
    m = dv * dv
    cols = complete_columns(ring, K, mu)
    if not cols.any():
        raise TruncationOverflow("no complete columns for the stationarity check")
    image = K.matrix.T @ m
    return float(np.max(np.abs(image[cols] - m[cols]) / m[cols]))


@dataclass(frozen=True)
class HarmonicBasis:
    vectors: np.ndarray  # shape (dimension, len(basis)), orthonormal rows
    basis: tuple
    singular_values: np.ndarray

    @property
    def dimension(self):
        return self.vectors.shape[0]


def harmonic_space(K, threshold=NULL_TOL):
    """Orthonormal basis of the bounded harmonic functions of a finite kernel."""
    if not K.leak_free:
        raise NotFinite("harmonic functions need a finite, leak-free kernel")
    n = len(K.basis)
    mat = K.dense() - np.eye(n)
    _, svals, vh = np.linalg.svd(mat)
    null = vh[svals < threshold]
    for row in null:
        k = np.flatnonzero(np.abs(row) > 1e-12)
        if k.size and row[k[0]] < 0:
            row *= -1
    return HarmonicBasis(null, K.basis, svals)


def _reliable_after(K, steps):
    """Rows ``s`` for which ``(P^steps f)(s)`` uses complete rows only."""
    ok = K.complete.copy()
    bad = (~K.complete).astype(float)
    for _ in range(steps - 1):
        reach_bad = (K.matrix @ bad) > 0
        ok &= ~reach_bad
        bad = (~ok).astype(float)
    return ok


def cesaro_mean(K, f, ns):
    """Averages ``A_n f = n^{-1} sum_{k<n} P^k f`` for each requested ``n``.

    Returns ``(means, reliable)``: arrays of shape ``(len(ns), len(basis))``.
    """
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns):
        raise ValueError("horizons must be >= 1")
    wanted = set(ns)
    f = np.asarray(f, dtype=float)
    term = f.copy()
    total = np.zeros_like(f)
    found = {}
    for n in range(1, max(ns) + 1):
        total += term
        if n in wanted:
            found[n] = total / n
        term = K.matrix @ term
    means = np.array([found[n] for n in ns])
    reliable = np.array([_reliable_after(K, n - 1) if n > 1 else np.ones(len(f), bool) for n in ns])
    return means, reliable


def zero_two_diagnostic(ring, d, mu, m_max, k, states=None, K=None):
    """``delta_m = sup_s || p^m(s,.) - p^{m+k}(s,.) ||_1`` for ``m = 1..m_max``.

    The sup runs over the interior labels (or ``states``).  Raises
    :class:`TruncationOverflow` when a distribution reaches a leaking row
    before the horizon ``m_max + k``.
    """
    if K is None:
        K = kernel(ring, d, mu)
    if states is None:
        states = ring.interior
    idx = [ring.index(s) for s in states]
    n = len(ring)
    dist = sp.csr_matrix((np.ones(len(idx)), (np.arange(len(idx)), idx)), shape=(len(idx), n))
    bad_rows = ~K.complete
    history = [dist]
    for step in range(m_max + k):
        cols = np.unique(dist.indices)
        if bad_rows[cols].any():
            raise TruncationOverflow(f"walk reaches leaking rows at step {step}; enlarge the window")
        dist = dist @ K.matrix
        dist.eliminate_zeros()
        history.append(dist)
    out = []
    for m in range(1, m_max + 1):
        diff = abs(history[m] - history[m + k])
        out.append(float(np.max(np.asarray(diff.sum(axis=1)).ravel())))
    return out


def _cdf_csr(K):
    mat = K.matrix
    cdf = np.empty_like(mat.data)
    for i in range(mat.shape[0]):
        lo, hi = mat.indptr[i], mat.indptr[i + 1]
        cdf[lo:hi] = np.cumsum(mat.data[lo:hi])
    return cdf


def sample_paths(K, start, length, n_paths, seed, backend=None):
    """``n_paths`` independent paths of ``length`` steps as label indices.

    Uniforms are drawn as one ``(n_paths, length)`` block from
    ``numpy.random.default_rng(seed)``; each step inverts the row CDF in
    basis order.  Shape of the result is ``(n_paths, length + 1)``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    uniforms = rng.random((n_paths, length))
    mat = K.matrix
    impl = _backend.get(backend)
    paths = impl.sample_paths(
        mat.indptr.astype(np.int64), mat.indices.astype(np.int64), _cdf_csr(K),
        K.complete.astype(np.uint8), int(K.index(start)), np.ascontiguousarray(uniforms),
    )
    if (paths < 0).any():
        raise TruncationOverflow("a sampled path hit a leaking row")
    return paths


def sample_path(K, start, length, seed, backend=None):
    """One reproducible path of labels, starting at ``start``."""
    path = sample_paths(K, start, length, 1, seed, backend=backend)[0]
    return [K.basis[i] for i in path]
