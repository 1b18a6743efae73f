"""Lower bounds on the norm of fusion operators and amenability verdicts.

For a truncated ring only the columns of ``Gamma_U`` whose products stay in
the window are exact.  The matrix ``G`` made of those columns is a
restriction of ``Gamma_U`` to a coordinate subspace, so for any vector ``v``

    ||G v|| / ||v||  <=  ||G||  <=  ||Gamma_U||  <=  d(U)

for every dimension function ``d``.  Power iteration on ``G^T G`` produces
such a ``v``; the bound is recomputed from the final witness, so it is a
genuine lower bound whatever the convergence state.
"""

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _backend
from .errors import EmptyWindow, TruncationOverflow, ValidationError
from .families import FamilySpec, build, free_generators
from .ring import DimensionFunction, as_combination, check_dimension_function, gamma_matrix
from .walk import Measure, kernel

DEFAULT_MAX_WINDOW = 2_000_000
GAP_MOVEMENT = 1e-4
_DEFAULT_START = {"su2_rep": 64, "free_group": 4, "integer_lattice": 8}


def max_window():
    """Basis-size cap for truncations (``FUSIONWALK_MAX_WINDOW``)."""
    return int(os.environ.get("FUSIONWALK_MAX_WINDOW", DEFAULT_MAX_WINDOW))


@dataclass(frozen=True)
class NormCertificate:
    """Witness that ``||Gamma_U|| >= lower_bound``.

    ``witness`` is a unit vector on ``columns``; ``residual`` is the relative
    change of the last two Rayleigh quotients.
    """

    obj: dict
    window: str
    lower_bound: float
    residual: float
    witness: np.ndarray
    columns: tuple
    iterations: int
    converged: bool

    def to_dict(self, with_witness=False):
        out = {
            "object": self.obj,
            "window": self.window,
            "lower_bound": self.lower_bound,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "n_columns": len(self.columns),
        }
        if with_witness:
            out["witness"] = dict(zip(self.columns, self.witness.tolist()))
        return out


def _power_certificate(mat, columns, obj, window, tol, max_iter, start, backend):
    mat = sp.csc_matrix(mat, dtype=np.float64)
    mat.sort_indices()
    n_cols = mat.shape[1]
    if n_cols == 0 or mat.nnz == 0:
        raise EmptyWindow(f"no complete columns in {window}")
    v0 = np.ones(n_cols) if start is None else np.asarray(start, dtype=float)
    impl = _backend.get(backend)
    csr = mat.tocsr()
    csr.sort_indices()
    v, lam, prev, iters, converged = impl.gram_power_iteration(
        csr.indptr.astype(np.int32), csr.indices.astype(np.int32), csr.data,
        mat.indptr.astype(np.int32), mat.indices.astype(np.int32), mat.data,
        v0, tol, max_iter,
    )
    v = np.asarray(v)
    norm_v = np.linalg.norm(v)
    bound = float(np.linalg.norm(mat @ v) / norm_v)
    v = v / norm_v
    residual = abs(lam - prev) / lam if lam > 0 and prev >= 0 else float("inf")
    return NormCertificate(dict(obj), window, bound, residual, v, tuple(columns), int(iters), bool(converged))


def gamma_norm_lower(ring, obj, window=None, tol=1e-12, max_iter=100_000, start=None, backend=None):
    """Certified lower bound on ``||Gamma_obj||`` from the complete columns.

    ``window`` optionally restricts the columns further to a label subset.
    """
    obj = as_combination(obj)
    op = gamma_matrix(ring, obj)
    keep = op.complete.copy()
    if window is not None:
        mask = np.zeros(len(ring), dtype=bool)
        for s in window:
            mask[ring.index(s)] = True
        keep &= mask
    cols = np.flatnonzero(keep)
    mat = op.matrix.tocsc()[:, cols]
    return _power_certificate(mat, [ring.basis[i] for i in cols], obj, ring.name,
                              tol, max_iter, start, backend)


def verify_certificate(ring, cert):
    """Recompute ``||Gamma v||`` for the witness by direct fusion products."""
    acc = {}
    for x, vx in zip(cert.columns, cert.witness):
        for s, mult in cert.obj.items():
            row, ok = ring.partial_product(x, s)
            if not ok:
                raise TruncationOverflow(f"witness column {x} is incomplete")
            for y, m in row.items():
                acc[y] = acc.get(y, 0.0) + mult * m * vx
    norm_v = float(np.sqrt(np.dot(cert.witness, cert.witness)))
    return float(np.sqrt(sum(val * val for val in acc.values()))) / norm_v


@dataclass
class Verdict:
    kind: str  # "AmenableEvidence", "NonamenableCertificate" or "Inconclusive"
    dimension: float
    lower_bound: float
    gap: float
    residual: float
    history: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "verdict": self.kind,
            "dimension": self.dimension,
            "lower_bound": self.lower_bound,
            "gap": self.gap,
            "residual": self.residual,
            "history": self.history,
            "warnings": self.warnings,
        }


def _schedule(spec, window_schedule, cap):
    if window_schedule is not None:
        for w in window_schedule:
            s = spec.with_window(w)
            if s.window_size() > cap:
                return
            yield s
        return
    w = spec.window or _DEFAULT_START[spec.family]
    while True:
        s = spec.with_window(w)
        if s.window_size() > cap:
            return
        yield s
        w *= 2


def amenability_verdict(source, dims, obj, window_schedule=None, gap_tol=1e-3, tol=1e-12,
                        max_iter=100_000, cap=None, backend=None):
    """Compare ``d(obj)`` with certified lower bounds on ``||Gamma_obj||``.

    ``source`` is a ring (one window) or a :class:`FamilySpec` whose window
    parameter follows ``window_schedule`` (default: doubling from the spec's
    window until the gap moves by less than ``1e-4`` between consecutive
    windows, or the basis would exceed ``cap`` labels).  ``dims`` is a
    :class:`DimensionFunction` or a callable ``ring -> DimensionFunction``;
    it is checked and evaluated on the first window.
    """
    obj = as_combination(obj)
    cap = max_window() if cap is None else cap
    if isinstance(source, FamilySpec):
        if source.window_param is None:
            rings = iter([build(source)])
        else:
            rings = (build(s) for s in _schedule(source, window_schedule, cap))
    else:
        rings = iter([source])

    d = None
    dim_u = None
    history, warnings = [], []
    cert = None
    prev_gap = None
    for ring in rings:
        if d is None:
            d = dims(ring) if callable(dims) and not isinstance(dims, DimensionFunction) else dims
            report = check_dimension_function(ring, d)
            if not report.ok:
                raise ValidationError("dimension function", "; ".join(map(str, report.violations[:3])))
            dim_u = d.of(obj)
        cert = gamma_norm_lower(ring, obj, tol=tol, max_iter=max_iter, backend=backend)
        gap = dim_u - cert.lower_bound
        history.append({"window": ring.name, "size": len(ring), "lower_bound": cert.lower_bound,
                        "gap": gap, "residual": cert.residual, "converged": cert.converged})
        if cert.lower_bound > dim_u + 1e-9:
            warnings.append(f"lower bound {cert.lower_bound} exceeds d(U) = {dim_u}; d is not a dimension function")
        if cert.lower_bound >= dim_u - gap_tol:
            return Verdict("AmenableEvidence", dim_u, cert.lower_bound, gap, cert.residual, history, warnings)
        if not ring.truncated:
            kind = "NonamenableCertificate" if cert.converged else "Inconclusive"
            if kind == "Inconclusive":
                warnings.append("power iteration did not converge")
            return Verdict(kind, dim_u, cert.lower_bound, gap, cert.residual, history, warnings)
        if prev_gap is not None and abs(prev_gap - gap) < GAP_MOVEMENT and cert.converged:
            return Verdict("NonamenableCertificate", dim_u, cert.lower_bound, gap, cert.residual,
                           history, warnings)
        prev_gap = gap
    if cert is None:
        raise EmptyWindow("window schedule is empty or exceeds the size cap")
    warnings.append("inconclusive: gap still moving at the last window")
    return Verdict("Inconclusive", dim_u, cert.lower_bound, dim_u - cert.lower_bound, cert.residual,
                   history, warnings)


def _radial_matrix(rank, radius):
    """Compression of the truncated generator operator to radial functions.

    Column ``n`` and row ``m`` stand for the normalized indicator of the
    sphere of radius ``n`` (resp. ``m``).  Lifting a radial vector back to the
    ball preserves both norms, so certificates stay valid.
    """
    branch = [2 * rank] + [2 * rank - 1] * radius  # neighbours one sphere further out
    rows, cols, vals = [], [], []
    for n in range(radius):
        rows.append(n + 1)
        cols.append(n)
        vals.append(np.sqrt(branch[n]))
        if n >= 1:
            rows.append(n - 1)
            cols.append(n)
            vals.append(np.sqrt(branch[n - 1]))
    return sp.csc_matrix((vals, (rows, cols)), shape=(radius + 1, radius))


def free_group_benchmark(rank, radius, method="ball", tol=1e-13, max_iter=200_000, backend=None):
    """Certificate for the sum of generators and inverses of a free group.

    ``method="ball"`` works on the full Cayley ball; ``method="radial"``
    uses the exact radial compression, which reaches large radii cheaply.
    """
    if radius < 4:
        raise ValueError("radius must be >= 4")
    gens = free_generators(rank)
    obj = {g: 1 for g in gens}
    if method == "ball":
        ring = build(FamilySpec("free_group", {"rank": rank, "radius": radius}))
        return gamma_norm_lower(ring, obj, tol=tol, max_iter=max_iter, backend=backend)
    if method != "radial":
        raise ValueError(f"unknown method {method!r}")
    mat = _radial_matrix(rank, radius)
    columns = [f"|x|={n}" for n in range(radius)]
    return _power_certificate(mat, columns, obj, f"free_group(rank={rank},radius={radius},radial)",
                              tol, max_iter, None, backend)


def weak_amenability_probe(ring, d, mu, horizons, functions=None, generators=None):
    """Invariance defects ``|A_n(P_s f)(e) - A_n(f)(e)|`` of Cesaro averages.

    ``A_n g(e) = n^{-1} sum_{k<n} (P_mu^k g)(e)``.  Reports the absolute
    defect and the defect relative to ``A_n f(e)``; purely diagnostic.
    """
    horizons = sorted(int(n) for n in horizons)
    if functions is None:
        f = np.zeros(len(ring))
        f[ring.index(ring.unit)] = 1.0
        functions = {"indicator_e": f}
    if generators is None:
        generators = list(mu.support)
    K = kernel(ring, d, mu)
    shifted = {s: kernel(ring, d, Measure.delta(s)) for s in generators}
    trusted = K.complete.copy()
    for Ks in shifted.values():
        trusted &= Ks.complete
    pi = np.zeros(len(ring))
    pi[ring.index(ring.unit)] = 1.0
    plain = {name: 0.0 for name in functions}
    moved = {(s, name): 0.0 for s in generators for name in functions}
    images = {(s, name): shifted[s].matrix @ np.asarray(f, dtype=float)
              for s in generators for name, f in functions.items()}
    rows = []
    want = set(horizons)
    for n in range(1, horizons[-1] + 1):
        if not trusted[pi > 0].all():
            raise TruncationOverflow(f"walk from the unit leaks before horizon {n}; enlarge the window")
        for name, f in functions.items():
            plain[name] += float(pi @ f)
            for s in generators:
                moved[(s, name)] += float(pi @ images[(s, name)])
        if n in want:
            for name in functions:
                base = plain[name] / n
                for s in generators:
                    other = moved[(s, name)] / n
                    diff = abs(other - base)
                    rows.append({"horizon": n, "generator": s, "function": name, "average": base,
                                 "shifted_average": other, "abs_diff": diff,
                                 "rel_diff": diff / base if base > 0 else float("inf")})
        pi = K.matrix.T @ pi
    return rows
