"""JSON readers and writers for rings, measures, dimension functions and inclusions."""

import hashlib
import json
from pathlib import Path

import numpy as np

from .entropy import BlockState, Inclusion
from .errors import ParseError, ValidationError
from .ring import DimensionFunction, FusionRing, validate_ring
from .walk import Measure


def _load(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno) from None


def _need(data, key, path, kind=None):
    if not isinstance(data, dict) or key not in data:
        raise ParseError("missing field", path=path, field=key)
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"expected {kind.__name__}", path=path, field=key)
    return value


def digest(*paths):
    """SHA-256 over the contents of the given files."""
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def ring_from_dict(data, path=None, name=None):
    basis = [str(b) for b in _need(data, "basis", path, list)]
    unit = str(_need(data, "unit", path))
    dual = _need(data, "dual", path, dict)
    coeffs = {}
    for i, entry in enumerate(_need(data, "coeffs", path, list)):
        try:
            r, s, t, m = str(entry["r"]), str(entry["s"]), str(entry["t"]), entry["m"]
        except (KeyError, TypeError):
            raise ParseError("coefficient entries need r, s, t, m", path=path, field=f"coeffs[{i}]") from None
        if not isinstance(m, int) or isinstance(m, bool):
            raise ParseError("m must be an integer", path=path, field=f"coeffs[{i}].m")
        row = coeffs.setdefault((r, s), {})
        row[t] = row.get(t, 0) + m
    interior = data.get("interior")
    try:
        return FusionRing(basis, unit, dual, coeffs, interior=interior,
                          name=name or data.get("name") or (Path(path).stem if path else "ring"))
    except ValueError as exc:
        raise ValidationError("ring structure", str(exc)) from None


def ring_to_dict(ring):
    """Fusion-ring JSON; coefficients in basis order."""
    order = {b: i for i, b in enumerate(ring.basis)}
    table = ring.table()
    coeffs = []
    for (r, s) in sorted(table, key=lambda p: (order[p[0]], order[p[1]])):
        for t in sorted(table[(r, s)], key=order.__getitem__):
            coeffs.append({"r": r, "s": s, "t": t, "m": int(table[(r, s)][t])})
    out = {
        "name": ring.name,
        "basis": list(ring.basis),
        "unit": ring.unit,
        "dual": {b: ring.dual(b) for b in ring.basis},
        "coeffs": coeffs,
    }
    if ring.truncated:
        out["interior"] = list(ring.interior)
    return out


def parse_ring(path, validate=True):
    ring = ring_from_dict(_load(path), path=path)
    if validate:
        rep = validate_ring(ring)
        if not rep.ok:
            raise ValidationError("ring axioms", "; ".join(str(v) for v in rep.violations[:5]))
    return ring


def write_ring(ring, path):
    Path(path).write_text(json.dumps(ring_to_dict(ring), indent=1) + "\n")


def parse_measure(path, ring=None):
    data = _load(path)
    weights = _need(data, "weights", path, dict)
    for k, v in weights.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ParseError("weights must be numbers", path=path, field=f"weights.{k}")
    mu = Measure(weights)
    if ring is not None:
        missing = [s for s in mu.support if s not in ring]
        if missing:
            raise ValidationError("measure support", f"labels {missing} outside the ring window")
    return mu


def parse_dims(path):
    data = _load(path)
    values = data.get("values", data) if isinstance(data, dict) else None
    if not isinstance(values, dict):
        raise ParseError("expected an object of label: value", path=path)
    return DimensionFunction(values)


def _as_matrix(rows, path, field):
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2:
        raise ParseError("expected a matrix", path=path, field=field)
    return arr


def inclusion_from_dict(data, path=None):
    n = _need(data, "n", path, list)
    m = _need(data, "m", path, list)
    a = _need(data, "A", path, list)
    try:
        return Inclusion(tuple(n), tuple(m), np.asarray(a, dtype=np.int64))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError("inclusion shape", str(exc)) from None


def state_from_dict(inc, data, path=None, field="state"):
    if "densities" in data:
        blocks = [_as_matrix(q, path, f"{field}.densities[{i}]") for i, q in enumerate(data["densities"])]
        return BlockState(blocks, normalized=data.get("normalized", True))
    if "masses" in data:
        return BlockState.from_masses(inc, _as_matrix(data["masses"], path, f"{field}.masses"),
                                      normalized=data.get("normalized", True))
    raise ParseError("state needs 'densities' or 'masses'", path=path, field=field)


def parse_inclusion(path):
    """Returns ``(inclusion, state or None, parts)``."""
    data = _load(path)
    inc = inclusion_from_dict(data, path)
    state = None
    if "state" in data:
        state = state_from_dict(inc, data["state"], path)
    parts = [state_from_dict(inc, {**p, "normalized": False}, path, f"parts[{i}]")
             for i, p in enumerate(data.get("parts", []))]
    return inc, state, parts
