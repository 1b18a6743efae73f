"""Fusion rings, dimension functions and fusion operators.

A :class:`FusionRing` is the based ring ``Z[Irr]`` with unit, dual involution
and nonnegative integer structure constants ``m^t_{rs}`` (the multiplicity of
``t`` in ``r * s``).  Rings may be *truncated*: a finite window into an
infinite ring together with an interior subset.  Every product is reported
together with a completeness flag, so that nothing computed from a window is
silently wrong.

Labels are opaque strings; the basis order is the declaration order and
fixes every matrix index in the package.
"""

from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from itertools import product as cartesian

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatch, NotConnected, NotFinite, TruncationOverflow

DEFAULT_TOL = 1e-9


class FusionRing:
    """Based ring with unit, duality and sparse structure constants.

    Parameters
    ----------
    basis : iterable of str
        Ordered labels of the simple objects in the window.
    unit : str
        Label of the unit object.
    dual : mapping
        Involution ``s -> s_bar`` on the basis.
    coeffs : mapping, optional
        ``(r, s) -> {t: m}``.  Omitted triples mean ``m = 0``.
    rule : callable, optional
        ``rule(r, s) -> (dict, complete)`` producing the in-window part of
        ``r * s`` and whether it is the whole product.  Exactly one of
        ``coeffs`` and ``rule`` must be given.
    interior : iterable of str, optional
        Marks the ring as truncated.  For table rings a product is complete
        iff both factors are interior.
    name : str
        Identifier used in reports and certificates.
    gamma_hook : callable, optional
        Vectorized ``obj -> (rows, cols, vals, complete)`` for
        :func:`gamma_matrix`; may return ``None`` to decline an object.
    """

    def __init__(self, basis, unit, dual, coeffs=None, *, rule=None,
                 interior=None, name="ring", gamma_hook=None):
        self._basis = tuple(str(b) for b in basis)
        self._index = {b: i for i, b in enumerate(self._basis)}
        if len(self._index) != len(self._basis):
            raise ValueError("duplicate basis labels")
        if unit not in self._index:
            raise ValueError(f"unit {unit!r} not in basis")
        self._unit = unit
        self._dual = {str(k): str(v) for k, v in dual.items()}
        missing = [b for b in self._basis if b not in self._dual]
        if missing:
            raise ValueError(f"dual undefined on {missing[:5]}")
        if (coeffs is None) == (rule is None):
            raise ValueError("give exactly one of coeffs and rule")
        self._table = None
        if coeffs is not None:
            table = {}
            for (r, s), row in coeffs.items():
                row = {str(t): int(m) for t, m in row.items() if m != 0}
                if row:
                    table[(str(r), str(s))] = row
            self._table = table
        self._rule = rule
        self._interior = None if interior is None else frozenset(interior)
        if self._interior is not None and not self._interior <= self._index.keys():
            raise ValueError("interior labels must lie in the basis")
        self.name = name
        self._gamma_hook = gamma_hook

    # -- structure ---------------------------------------------------------

    @property
    def basis(self):
        return self._basis

    @property
    def unit(self):
        return self._unit

    @property
    def truncated(self):
        return self._interior is not None

    @property
    def interior(self):
        """Interior labels in basis order (the whole basis for finite rings)."""
        if self._interior is None:
            return self._basis
        return tuple(b for b in self._basis if b in self._interior)

    def is_interior(self, label):
        return self._interior is None or label in self._interior

    def dual(self, label):
        return self._dual[label]

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise TruncationOverflow(f"label {label!r} is outside the window of {self.name}") from None

    def __len__(self):
        return len(self._basis)

    def __contains__(self, label):
        return label in self._index

    def __repr__(self):
        kind = "truncated" if self.truncated else "finite"
        return f"FusionRing({self.name!r}, {len(self)} labels, {kind})"

    # -- products ------------------------------------------------------------

    def partial_product(self, r, s):
        """In-window part of ``r * s`` and whether it is the full product."""
        if self._table is not None:
            row = self._table.get((r, s), {})
            complete = self._interior is None or (r in self._interior and s in self._interior)
            return dict(row), complete
        return self._rule(r, s)

    def product(self, r, s):
        """Full product ``r * s`` as ``{t: m}``; raises if it leaves the window."""
        row, complete = self.partial_product(r, s)
        if not complete:
            raise TruncationOverflow(f"{r} * {s} leaves the window of {self.name}")
        return row

    def coefficient(self, r, s, t):
        return self.partial_product(r, s)[0].get(t, 0)

    def table(self):
        """All known nonzero structure constants, ``(r, s) -> {t: m}``."""
        if self._table is not None:
            return {k: dict(v) for k, v in self._table.items()}
        out = {}
        for r in self._basis:
            for s in self._basis:
                row, _ = self._rule(r, s)
                if row:
                    out[(r, s)] = row
        return out


def as_combination(obj):
    """Normalize a label, list of labels or mapping to ``{label: int}``."""
    if isinstance(obj, str):
        return {obj: 1}
    if isinstance(obj, Mapping):
        out = {}
        for k, v in obj.items():
            if int(v) != v or v < 0:
                raise ValueError(f"multiplicity of {k!r} must be a nonnegative integer")
            if v:
                out[str(k)] = int(v)
        return out
    return dict(Counter(str(x) for x in obj))


def multiply(ring, a, b):
    """Product of two formal Z+-combinations of basis labels."""
    a, b = as_combination(a), as_combination(b)
    acc = Counter()
    for r, ma in a.items():
        ring.index(r)
        for s, mb in b.items():
            ring.index(s)
            for t, m in ring.product(r, s).items():
                acc[t] += ma * mb * m
    return {t: acc[t] for t in ring.basis if acc.get(t)}


@dataclass(frozen=True)
class Violation:
    kind: str
    labels: tuple
    detail: str = ""

    def __str__(self):
        return f"{self.kind} at {self.labels}: {self.detail}"


@dataclass
class ValidationReport:
    """Violations found by a check; empty means every check passed."""

    violations: list = field(default_factory=list)
    checked: int = 0
    skipped: int = 0

    def add(self, kind, labels, detail=""):
        self.violations.append(Violation(kind, tuple(labels), detail))

    @property
    def ok(self):
        return not self.violations

    @property
    def kinds(self):
        return sorted({v.kind for v in self.violations})

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def to_dict(self):
        return {
            "ok": self.ok,
            "checked": self.checked,
            "skipped": self.skipped,
            "violations": [
                {"kind": v.kind, "labels": list(v.labels), "detail": v.detail}
                for v in self.violations
            ],
        }


def _dualize(row, ring):
    return {ring.dual(t): m for t, m in row.items()}


def validate_ring(ring):
    """Check the fusion-ring axioms on every interior triple.

    Triples whose intermediate products leave the window are skipped and
    counted in ``report.skipped``.
    """
    rep = ValidationReport()
    e = ring.unit
    interior = ring.interior

    for s in ring.basis:
        sb = ring.dual(s)
        if sb not in ring:
            rep.add("dual", (s,), f"dual {sb!r} outside the window")
        elif ring.dual(sb) != s:
            rep.add("dual", (s,), "dual is not an involution")
        elif ring.is_interior(s) and not ring.is_interior(sb):
            rep.add("dual", (s,), "dual of an interior label is not interior")
    if ring.dual(e) != e:
        rep.add("dual", (e,), "unit is not self-dual")

    products = {}
    for r, s in cartesian(interior, interior):
        row, complete = ring.partial_product(r, s)
        rep.checked += 1
        for t, m in row.items():
            if not isinstance(m, (int, np.integer)) or m < 0:
                rep.add("coefficient", (r, s, t), f"m = {m!r}")
            if t not in ring:
                rep.add("coefficient", (r, s, t), "label outside the window")
        if complete:
            products[(r, s)] = row
        else:
            rep.skipped += 1

    for s in interior:
        for pair in ((e, s), (s, e)):
            row = products.get(pair)
            if row is not None and row != {s: 1}:
                rep.add("unit", pair, f"product {row} != [{s}]")

    for (r, s), row in products.items():
        want = 1 if r == ring.dual(s) else 0
        if row.get(e, 0) != want:
            rep.add("duality", (r, s, e), f"m = {row.get(e, 0)}, expected {want}")
        rb, sb = ring.dual(r), ring.dual(s)
        other = products.get((sb, rb))
        if other is None:
            continue
        if _dualize(row, ring) != other:
            rep.add("dual-symmetry", (r, s), f"{r}*{s} dualized differs from {sb}*{rb}")

    for r, s, t in cartesian(interior, interior, interior):
        left, right = Counter(), Counter()
        try:
            for u, m in ring.product(r, s).items():
                for v, n in ring.product(u, t).items():
                    left[v] += m * n
            for u, m in ring.product(s, t).items():
                for v, n in ring.product(r, u).items():
                    right[v] += m * n
        except TruncationOverflow:
            rep.skipped += 1
            continue
        rep.checked += 1
        if left != right:
            rep.add("associativity", (r, s, t), f"{dict(left)} != {dict(right)}")
    return rep


class DimensionFunction(Mapping):
    """Strictly positive values on labels, ``d(s)``."""

    def __init__(self, values):
        self._values = {str(k): float(v) for k, v in values.items()}

    def __getitem__(self, label):
        try:
            return self._values[label]
        except KeyError:
            raise DimensionMismatch(f"dimension undefined on {label!r}") from None

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f"DimensionFunction({len(self)} labels)"

    def of(self, obj):
        """Dimension of a formal combination of labels."""
        return sum(m * self[s] for s, m in as_combination(obj).items())

    def as_array(self, ring):
        missing = [b for b in ring.basis if b not in self._values]
        if missing:
            raise DimensionMismatch(f"dimension undefined on {missing[:5]}")
        return np.array([self._values[b] for b in ring.basis])

    def to_dict(self):
        return dict(self._values)


def check_dimension_function(ring, d, tol=DEFAULT_TOL):
    """Report positivity, unit, duality and multiplicativity violations.

    Multiplicativity is tested on interior pairs with complete products, with
    tolerance ``tol * max(1, d(r) d(s))``.
    """
    missing = [b for b in ring.basis if b not in d]
    if missing:
        raise DimensionMismatch(f"dimension undefined on {missing[:5]}")
    rep = ValidationReport()
    for s in ring.basis:
        rep.checked += 1
        if not d[s] > 0 or not np.isfinite(d[s]):
            rep.add("positivity", (s,), f"d = {d[s]!r}")
        sb = ring.dual(s)
        if sb in ring and abs(d[s] - d[sb]) > tol * max(1.0, d[s]):
            rep.add("dual", (s, sb), f"{d[s]!r} != {d[sb]!r}")
    if abs(d[ring.unit] - 1.0) > tol:
        rep.add("unit", (ring.unit,), f"d(e) = {d[ring.unit]!r}")
    interior = ring.interior
    for r, s in cartesian(interior, interior):
        row, complete = ring.partial_product(r, s)
        if not complete:
            rep.skipped += 1
            continue
        rep.checked += 1
        lhs = d[r] * d[s]
        rhs = sum(m * d[t] for t, m in row.items())
        if abs(lhs - rhs) > tol * max(1.0, abs(lhs)):
            rep.add("multiplicativity", (r, s), f"{lhs!r} != {rhs!r}")
    return rep


@dataclass(frozen=True)
class FusionOperator:
    """Right multiplication by an object, ``(y, x) -> sum_s mult(s) m^y_{xs}``."""

    obj: dict
    matrix: sp.csr_matrix
    complete: np.ndarray
    basis: tuple

    @property
    def incomplete_columns(self):
        return tuple(self.basis[i] for i in np.flatnonzero(~self.complete))

    def truncated(self):
        """Columns of the matrix whose products stay in the window (CSC)."""
        cols = np.flatnonzero(self.complete)
        return self.matrix.tocsc()[:, cols], cols


def gamma_matrix(ring, obj, strict=False):
    """Fusion operator of ``obj``; incomplete columns are flagged.

    With ``strict=True`` an incomplete column raises :class:`TruncationOverflow`.
    """
    obj = as_combination(obj)
    for s in obj:
        ring.index(s)
    n = len(ring)
    fast = ring._gamma_hook(obj) if ring._gamma_hook is not None else None
    if fast is not None:
        rows, cols, vals, complete = fast
    else:
        rows, cols, vals, complete = _gamma_entries(ring, obj)
    if strict and not complete.all():
        bad = [ring.basis[i] for i in np.flatnonzero(~complete)[:5]]
        raise TruncationOverflow(f"columns {bad} of Gamma need labels outside the window")
    mat = sp.csr_matrix(
        (np.asarray(vals, dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(n, n), dtype=np.int64,
    )
    mat.sum_duplicates()
    return FusionOperator(obj, mat, complete, ring.basis)


def _gamma_entries(ring, obj):
    rows, cols, vals = [], [], []
    complete = np.ones(len(ring), dtype=bool)
    index = ring._index
    for x_idx, x in enumerate(ring.basis):
        for s, mult in obj.items():
            row, ok = ring.partial_product(x, s)
            if not ok:
                complete[x_idx] = False
            for y, m in row.items():
                rows.append(index[y])
                cols.append(x_idx)
                vals.append(mult * m)
    return rows, cols, vals, complete


def fp_dimensions(ring):
    """Frobenius-Perron dimensions of a finite ring, normalized by ``d(e) = 1``."""
    if ring.truncated:
        raise NotFinite(f"{ring.name} is truncated")
    op = gamma_matrix(ring, list(ring.basis), strict=True)
    mat = op.matrix
    ncomp, _ = connected_components(mat, directed=True, connection="strong")
    if ncomp != 1:
        raise NotConnected(f"fusion graph of {ring.name} has {ncomp} components")
    # d is a left Perron eigenvector: d^T Gamma_U = d(U) d^T.
    vals, vecs = np.linalg.eig(mat.toarray().T.astype(float))
    k = int(np.argmax(vals.real))
    vec = np.abs(vecs[:, k].real)
    vec /= vec[ring.index(ring.unit)]
    return DimensionFunction(dict(zip(ring.basis, vec)))


def constant_dimensions(ring, value=1.0):
    return DimensionFunction({b: value for b in ring.basis})
