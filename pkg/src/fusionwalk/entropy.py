"""Entropy of states on multi-matrix algebras and unital inclusions.

A multi-matrix algebra is ``M = Mat_{m_1} + ... + Mat_{m_L}``.  States are
given by block density matrices ``Q_l`` relative to the canonical trace (the
trace taking value 1 on minimal projections), so ``phi(x) = sum_l Tr(x_l Q_l)``.

An inclusion ``N = sum_k Mat_{n_k}  in  M`` is fixed by its multiplicity
matrix ``A = (a_kl)``.  Block ``l`` of ``M`` is identified with
``sum_k Mat_{n_k} (x) Mat_{a_kl}`` with the ``k`` sub-blocks in order and
``N`` acting on the first tensor factor.  All entropies are in nats.
"""

from dataclasses import dataclass
from math import inf

import numpy as np

from .errors import ShapeMismatch, SupportViolation, ValidationError, ZeroMatrix

EIG_FLOOR = 1e-14
MASS_FLOOR = 1e-12
STATE_TOL = 1e-12
PSD_TOL = 1e-10


def _eta(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > EIG_FLOOR
    out[pos] = -t[pos] * np.log(t[pos])
    return out


@dataclass(frozen=True)
class MultiMatrixAlgebra:
    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise ValidationError("block dims", f"all block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "block_dims", dims)


@dataclass(frozen=True)
class Inclusion:
    """Unital inclusion ``N subset M`` with multiplicity matrix ``A`` (K x L)."""

    sub_dims: tuple
    amb_dims: tuple
    mult: np.ndarray

    def __post_init__(self):
        n = tuple(int(x) for x in self.sub_dims)
        m = tuple(int(x) for x in self.amb_dims)
        a = np.asarray(self.mult, dtype=np.int64)
        MultiMatrixAlgebra(n)
        MultiMatrixAlgebra(m)
        if a.shape != (len(n), len(m)):
            raise ShapeMismatch(f"A has shape {a.shape}, expected {(len(n), len(m))}")
        if (a < 0).any():
            raise ValidationError("nonnegative multiplicities", "A has negative entries")
        if (a.sum(axis=1) == 0).any() or (a.sum(axis=0) == 0).any():
            raise ValidationError("no zero row or column", "A has an all-zero row or column")
        got = np.asarray(n) @ a
        if not np.array_equal(got, np.asarray(m)):
            raise ValidationError("unital consistency", f"sum_k a_kl n_k = {got.tolist()} but m = {list(m)}")
        object.__setattr__(self, "sub_dims", n)
        object.__setattr__(self, "amb_dims", m)
        object.__setattr__(self, "mult", a)

    @property
    def sub(self):
        return MultiMatrixAlgebra(self.sub_dims)

    @property
    def amb(self):
        return MultiMatrixAlgebra(self.amb_dims)

    def offsets(self, l):
        """Start of each ``k`` sub-block inside block ``l``."""
        sizes = np.asarray(self.sub_dims) * self.mult[:, l]
        return np.concatenate([[0], np.cumsum(sizes)[:-1]])


class BlockState:
    """Positive functional given by Hermitian PSD block density matrices."""

    def __init__(self, densities, *, normalized=True, tol=STATE_TOL):
        blocks = []
        for q in densities:
            q = np.atleast_2d(np.asarray(q))
            if q.ndim != 2 or q.shape[0] != q.shape[1]:
                raise ShapeMismatch(f"density block of shape {q.shape} is not square")
            if not np.isfinite(q).all():
                raise ValidationError("finite entries", "density block has NaN or inf entries")
            if np.max(np.abs(q - q.conj().T), initial=0.0) > PSD_TOL:
                raise ValidationError("hermitian", "density block is not Hermitian")
            q = (q + q.conj().T) / 2
            if q.size and np.linalg.eigvalsh(q).min() < -PSD_TOL:
                raise ValidationError("positive semidefinite", "density block has a negative eigenvalue")
            blocks.append(q)
        self.densities = tuple(blocks)
        if normalized and abs(self.total - 1.0) > tol:
            raise ValidationError("state normalization", f"total mass {self.total!r} != 1")

    @property
    def block_dims(self):
        return tuple(q.shape[0] for q in self.densities)

    @property
    def block_masses(self):
        return np.array([np.trace(q).real for q in self.densities])

    @property
    def total(self):
        return float(self.block_masses.sum())

    def __add__(self, other):
        _same_shape(self, other)
        return BlockState([a + b for a, b in zip(self.densities, other.densities)], normalized=False)

    def scaled(self, c):
        return BlockState([c * q for q in self.densities], normalized=False)

    @classmethod
    def tracial(cls, dims, weights=None):
        """Trace state; ``weights`` are block masses (default: the normalized trace)."""
        dims = list(dims)
        if weights is None:
            weights = np.asarray(dims, dtype=float) / sum(dims)
        return cls([w / n * np.eye(n) for w, n in zip(weights, dims)])

    @classmethod
    def from_masses(cls, inc, masses, normalized=True):
        """Density that is scalar on every ``(k, l)`` sub-block with the given masses."""
        masses = _check_masses(inc, masses, normalized=normalized)
        blocks = []
        for l, m in enumerate(inc.amb_dims):
            diag = np.zeros(m)
            offs = inc.offsets(l)
            for k, nk in enumerate(inc.sub_dims):
                size = nk * inc.mult[k, l]
                if size:
                    diag[offs[k]:offs[k] + size] = masses[k, l] / size
            blocks.append(np.diag(diag))
        return cls(blocks, normalized=normalized)

    def __repr__(self):
        return f"BlockState(dims={self.block_dims}, total={self.total:.6g})"


def _same_shape(a, b):
    if a.block_dims != b.block_dims:
        raise ShapeMismatch(f"block dims {a.block_dims} != {b.block_dims}")


def _check_on(inc, state):
    if state.block_dims != inc.amb_dims:
        raise ShapeMismatch(f"state dims {state.block_dims} != algebra dims {inc.amb_dims}")


def _check_masses(inc, masses, normalized=True):
    masses = np.asarray(masses, dtype=float)
    if masses.shape != inc.mult.shape:
        raise ShapeMismatch(f"masses have shape {masses.shape}, expected {inc.mult.shape}")
    if (masses < -MASS_FLOOR).any():
        raise ValidationError("masses nonnegative", "negative block mass")
    if (masses[inc.mult == 0] > MASS_FLOOR).any():
        raise SupportViolation("mass on a block pair with a_kl = 0")
    if normalized and abs(masses.sum() - 1.0) > 1e-9:
        raise ValidationError("masses sum", f"masses sum to {masses.sum()!r}")
    return np.clip(masses, 0.0, None)


def vn_entropy(psi):
    """``-sum_l Tr(Q_l log Q_l)``."""
    return float(sum(_eta(np.linalg.eigvalsh(q)).sum() for q in psi.densities))


def rel_entropy(phi, psi):
    """``sum_l Tr(Q_phi (log Q_phi - log Q_psi))``, ``inf`` without support domination."""
    _same_shape(phi, psi)
    total = 0.0
    for qa, qb in zip(phi.densities, psi.densities):
        wa = np.linalg.eigvalsh(qa)
        wb, vb = np.linalg.eigh(qb)
        # phi-mass along each eigenvector of Q_psi
        weight = np.einsum("ij,ik,kj->j", vb.conj(), qa, vb).real
        null = wb < EIG_FLOOR
        if weight[null].sum() > MASS_FLOOR:
            return inf
        pos = wa > EIG_FLOOR
        total += float(np.sum(wa[pos] * np.log(wa[pos])))
        total -= float(np.sum(weight[~null] * np.log(wb[~null])))
    return total


def block_masses(inc, psi):
    """``psi(z_k w_l)``: traces of the diagonal ``(k, l)`` sub-blocks."""
    _check_on(inc, psi)
    out = np.zeros(inc.mult.shape)
    for l, q in enumerate(psi.densities):
        offs = inc.offsets(l)
        d = np.diag(q).real
        for k, nk in enumerate(inc.sub_dims):
            size = nk * inc.mult[k, l]
            out[k, l] = d[offs[k]:offs[k] + size].sum()
    return out


def restrict_state(inc, psi):
    """Restriction of ``psi`` to ``N``: partial traces over the multiplicity factors."""
    _check_on(inc, psi)
    blocks = [np.zeros((nk, nk), dtype=np.result_type(*psi.densities)) for nk in inc.sub_dims]
    for l, q in enumerate(psi.densities):
        offs = inc.offsets(l)
        for k, nk in enumerate(inc.sub_dims):
            a = inc.mult[k, l]
            if not a:
                continue
            sub = q[offs[k]:offs[k] + nk * a, offs[k]:offs[k] + nk * a]
            blocks[k] = blocks[k] + np.einsum("iaja->ij", sub.reshape(nk, a, nk, a))
    return BlockState(blocks, normalized=False)


def embed(inc, x):
    """Image of ``x = (x_k)`` in ``M`` under the canonical embedding."""
    out = []
    for l, m in enumerate(inc.amb_dims):
        blk = np.zeros((m, m), dtype=np.result_type(*x))
        offs = inc.offsets(l)
        for k, nk in enumerate(inc.sub_dims):
            a = inc.mult[k, l]
            if a:
                blk[offs[k]:offs[k] + nk * a, offs[k]:offs[k] + nk * a] = np.kron(x[k], np.eye(a))
        out.append(blk)
    return out


def evaluate(psi, x):
    """``psi(x) = sum_l Tr(x_l Q_l)``."""
    return complex(sum(np.trace(a @ q) for a, q in zip(x, psi.densities)))


def _xlogy_terms(weights, numer, denom):
    """``sum w log(numer/denom)`` over ``w > 0``."""
    pos = weights > MASS_FLOOR
    return float(np.sum(weights[pos] * np.log(numer[pos] / denom[pos])))


def h_bound_blocks(inc, masses):
    """Upper bound on ``H_phi(M|N)`` from the masses ``phi(z_k w_l)``.

    ``sum phi(z_k w_l) log[phi(z_k) phi(w_l) a_kl min(a_kl, n_k) / phi(z_k w_l)^2]``,
    attained by tracial states.
    """
    x = _check_masses(inc, masses)
    a = inc.mult.astype(float)
    n = np.asarray(inc.sub_dims, dtype=float)[:, None]
    zk = x.sum(axis=1, keepdims=True)
    wl = x.sum(axis=0, keepdims=True)
    numer = zk * wl * a * np.minimum(a, n)
    return _xlogy_terms(x, numer, x * x)


@dataclass(frozen=True)
class GapBounds:
    lower: float
    gap: float
    upper: float

    def holds(self, tol=1e-8):
        return self.lower - tol <= self.gap <= self.upper + tol


def entropy_gap_bounds(inc, psi):
    """Mass bounds around ``S(psi) - S(psi|_N)`` and the gap itself."""
    x = block_masses(inc, psi)
    a = inc.mult.astype(float)
    n = np.asarray(inc.sub_dims, dtype=float)[:, None]
    zk = np.broadcast_to(x.sum(axis=1, keepdims=True), x.shape)
    wl = np.broadcast_to(x.sum(axis=0, keepdims=True), x.shape)
    lower = -_xlogy_terms(x, wl * np.minimum(a, n), x)
    upper = _xlogy_terms(x, zk * a, x)
    gap = vn_entropy(psi) - vn_entropy(restrict_state(inc, psi))
    return GapBounds(lower, gap, upper)


def decomposition_defect(inc, phi, parts, tol=1e-10):
    """Bound minus ``sum_i S(phi_i, phi) - S(phi_i|_N, phi|_N)``; nonnegative in theory."""
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one part")
    acc = parts[0]
    for p in parts[1:]:
        acc = acc + p
    _same_shape(acc, phi)
    err = max(np.max(np.abs(a - b), initial=0.0) for a, b in zip(acc.densities, phi.densities))
    if err > tol:
        raise ValidationError("decomposition", f"parts differ from phi by {err:.3g}")
    phi_n = restrict_state(inc, phi)
    value = 0.0
    for p in parts:
        value += rel_entropy(p, phi) - rel_entropy(restrict_state(inc, p), phi_n)
    return h_bound_blocks(inc, block_masses(inc, phi)) - value


def _support(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or (a < 0).any():
        raise ValueError("A must be a nonnegative matrix")
    if not (a > 0).any():
        raise ZeroMatrix("A has no nonzero entry")
    return a


def f_simplex(A, xi):
    """``sum xi_kl log[xi1_k xi2_l a_kl^2 / xi_kl^2]`` with marginals ``xi1, xi2``."""
    a = _support(A)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != a.shape:
        raise ShapeMismatch(f"xi has shape {xi.shape}, expected {a.shape}")
    if (xi < 0).any():
        raise ValueError("xi must be nonnegative")
    if (xi[a == 0] > 0).any():
        raise SupportViolation("xi charges a pair with a_kl = 0")
    r = np.broadcast_to(xi.sum(axis=1, keepdims=True), xi.shape)
    c = np.broadcast_to(xi.sum(axis=0, keepdims=True), xi.shape)
    pos = xi > 0
    return float(np.sum(xi[pos] * np.log(r[pos] * c[pos] * a[pos] ** 2 / xi[pos] ** 2)))


def _perron_right(a, tol=1e-15, max_iter=100_000):
    """Unit Perron vector and eigenvalue of ``a^T a`` by power iteration."""
    g = a.T @ a
    w = np.ones(g.shape[0]) / np.sqrt(g.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        u = g @ w
        new = float(w @ u)
        w = u / np.linalg.norm(u)
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return w, float(w @ g @ w)


def inclusion_norm(A, tol=1e-12):
    """Largest singular value of ``A`` by power iteration on ``A^T A``."""
    a = _support(A)
    _, lam = _perron_right(a, tol=tol)
    return float(np.sqrt(lam))


def _components(a):
    """Connected components of the bipartite support graph, as (rows, cols)."""
    K, L = a.shape
    seen_r, seen_c = set(), set()
    comps = []
    for k0 in range(K):
        if k0 in seen_r or not (a[k0] > 0).any():
            continue
        rows, cols = {k0}, set()
        stack = [("r", k0)]
        while stack:
            kind, i = stack.pop()
            nbrs = np.flatnonzero(a[i] > 0) if kind == "r" else np.flatnonzero(a[:, i] > 0)
            for j in nbrs:
                j = int(j)
                if kind == "r" and j not in cols:
                    cols.add(j)
                    stack.append(("c", j))
                elif kind == "c" and j not in rows:
                    rows.add(j)
                    stack.append(("r", j))
        seen_r |= rows
        seen_c |= cols
        comps.append((sorted(rows), sorted(cols)))
    return comps


def f_maximizer(A):
    """Maximizer ``xi_kl = ||A||^{-2} a_kl (A w)_k w_l`` and its value ``2 log ||A||``.

    ``w`` is the unit Perron vector of ``A^T A`` on the component of the
    support graph carrying the largest norm.
    """
    a = _support(A)
    best = None
    for rows, cols in _components(a):
        sub = a[np.ix_(rows, cols)]
        w, lam = _perron_right(sub)
        if best is None or lam > best[0]:
            best = (lam, rows, cols, np.abs(w), sub)
    lam, rows, cols, w, sub = best
    xi = np.zeros_like(a)
    xi[np.ix_(rows, cols)] = sub * np.outer(sub @ w, w) / lam
    return xi, f_simplex(a, xi)


def two_log_norm_check(inc, masses, tol=1e-9):
    """Compare the block bound, ``f(xi)`` and ``2 log ||A||`` at ``xi = masses``."""
    x = _check_masses(inc, masses)
    h = h_bound_blocks(inc, x)
    f = f_simplex(inc.mult, x)
    bound = 2.0 * np.log(inclusion_norm(inc.mult))
    return {
        "bound_A1": h,
        "f": f,
        "bound_A2": float(bound),
        "ok": bool(f <= bound + tol and h <= f + tol),
    }
