"""Command-line interface: ``fusionwalk <group> <command> [options]``.

Exit codes: 0 success, 1 other errors, 2 validation failure, 3 truncation
overflow.  Reports are JSON on stdout (or ``--out``); ``--csv`` dumps dense
matrices.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .amenability import amenability_verdict, free_group_benchmark, max_window
from .entropy import (
    block_masses,
    decomposition_defect,
    entropy_gap_bounds,
    f_maximizer,
    h_bound_blocks,
    inclusion_norm,
    two_log_norm_check,
)
from .errors import (
    DimensionMismatch,
    FusionWalkError,
    InvalidSpec,
    NotFinite,
    ParseError,
    ShapeMismatch,
    SupportViolation,
    TruncationOverflow,
    ValidationError,
)
from .families import FamilySpec, build, classical_su2_dims, parse_params, quantum_su2_dims
from .io import digest, parse_dims, parse_inclusion, parse_measure, parse_ring, ring_to_dict
from .ring import check_dimension_function, constant_dimensions, fp_dimensions, validate_ring
from .walk import (
    convolve,
    harmonic_space,
    is_generating,
    is_symmetric,
    kernel,
    sample_paths,
    stationary_check,
    zero_two_diagnostic,
)

EXIT_OK, EXIT_ERROR, EXIT_VALIDATION, EXIT_TRUNCATION = 0, 1, 2, 3


class Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# -- input helpers ---------------------------------------------------------


def _spec_from_args(args):
    spec = FamilySpec(args.family, parse_params(args.params))
    if getattr(args, "window", None) is not None:
        spec = spec.with_window(args.window)
    return spec


def _check_cap(spec):
    if spec.window_size() > max_window():
        raise TruncationOverflow(
            f"{spec} has {spec.window_size()} labels, above FUSIONWALK_MAX_WINDOW={max_window()}")


def load_ring(args, inputs, validate=True):
    if getattr(args, "ring", None):
        path = Path(args.ring)
        if path.exists():
            inputs.append(path)
            return parse_ring(path, validate=validate), None
        spec = FamilySpec.parse(args.ring)
        if getattr(args, "window", None) is not None:
            spec = spec.with_window(args.window)
    elif getattr(args, "family", None):
        spec = _spec_from_args(args)
    else:
        raise Failure(EXIT_VALIDATION, "give --ring FILE|FAMILY:PARAMS or --family")
    _check_cap(spec)
    return build(spec), spec


def _dims_factory(text, inputs):
    text = (text or "fp").strip()
    if text == "fp":
        return fp_dimensions
    if text == "ones":
        return constant_dimensions
    if text == "classical":
        return classical_su2_dims
    if text.startswith("quantum"):
        q = float(parse_params(text.partition(":")[2]).get("q", 1.0))
        return lambda ring: quantum_su2_dims(ring, q)
    path = Path(text)
    if not path.exists():
        raise Failure(EXIT_VALIDATION, f"unknown --dims {text!r}")
    inputs.append(path)
    dims = parse_dims(path)
    return lambda ring: dims


def load_dims(args, ring, inputs, check=True):
    d = _dims_factory(args.dims, inputs)(ring)
    if check:
        rep = check_dimension_function(ring, d, tol=args.tol if args.tol is not None else 1e-9)
        if not rep.ok:
            raise ValidationError("dimension function", "; ".join(map(str, rep.violations[:3])))
    return d


def load_measure(path, ring, inputs):
    inputs.append(Path(path))
    return parse_measure(path, ring)


def parse_object(text):
    """``"a+A+2*b"`` -> ``{"a": 1, "A": 1, "b": 2}``."""
    obj = {}
    for term in text.split("+"):
        term = term.strip()
        if not term:
            continue
        mult, sep, label = term.partition("*")
        if sep:
            obj[label.strip()] = obj.get(label.strip(), 0) + int(mult)
        else:
            obj[term] = obj.get(term, 0) + 1
    return obj


# -- output helpers ------------------------------------------------------------


def _clean(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        if math.isnan(value):
            return "NaN"
        return value
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, np.generic):
        return _clean(value.item())
    return value


def write_csv(path, labels, matrix, col_labels=None):
    col_labels = labels if col_labels is None else col_labels
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([""] + list(col_labels))
        for label, row in zip(labels, np.asarray(matrix)):
            w.writerow([label] + [repr(float(x)) for x in row])


def _emit(args, payload):
    text = json.dumps(_clean(payload), indent=2) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _measure_dict(mu):
    return dict(mu.weights)


# -- command handlers ------------------------------------------------------------


def cmd_ring_build(args, inputs, warnings):
    spec = _spec_from_args(args)
    _check_cap(spec)
    ring = build(spec)
    return ring_to_dict(ring), "raw"


def cmd_ring_validate(args, inputs, warnings):
    ring, _ = load_ring(args, inputs, validate=False)
    rep = validate_ring(ring)
    if rep.skipped:
        warnings.append(f"{rep.skipped} checks skipped because products leave the window")
    result = {"ring": ring.name, **rep.to_dict()}
    if not rep.ok:
        return result, EXIT_VALIDATION
    return result


def cmd_ring_info(args, inputs, warnings):
    ring, spec = load_ring(args, inputs, validate=False)
    rep = validate_ring(ring)
    out = {
        "ring": ring.name,
        "size": len(ring),
        "unit": ring.unit,
        "truncated": ring.truncated,
        "interior_size": len(ring.interior),
        "valid": rep.ok,
    }
    if spec is not None:
        out["family"] = spec.to_dict()
    if not ring.truncated:
        try:
            out["fp_dimensions"] = fp_dimensions(ring).to_dict()
        except FusionWalkError as exc:
            warnings.append(f"no FP dimensions: {exc}")
    return out


def _kernel_from_args(args, inputs, warnings):
    ring, _ = load_ring(args, inputs)
    d = load_dims(args, ring, inputs)
    mu = load_measure(args.measure[0], ring, inputs)
    K = kernel(ring, d, mu)
    if not K.leak_free:
        leaking = int((~K.complete).sum())
        warnings.append(f"{leaking} kernel rows leak mass outside the window (max leak {K.leak.max():.3g})")
    return ring, d, mu, K


def cmd_walk_kernel(args, inputs, warnings):
    ring, d, mu, K = _kernel_from_args(args, inputs, warnings)
    if args.csv:
        write_csv(args.csv, ring.basis, K.dense())
    coo = K.matrix.tocoo()
    return {
        "basis": list(ring.basis),
        "entries": [[ring.basis[i], ring.basis[j], float(v)] for i, j, v in zip(coo.row, coo.col, coo.data)],
        "leak": {ring.basis[i]: float(K.leak[i]) for i in np.flatnonzero(~K.complete)},
        "row_sums": dict(zip(ring.basis, np.asarray(K.matrix.sum(axis=1)).ravel().tolist())),
    }


def cmd_walk_convolve(args, inputs, warnings):
    ring, _ = load_ring(args, inputs)
    d = load_dims(args, ring, inputs)
    if len(args.measure) != 2:
        raise Failure(EXIT_VALIDATION, "convolve needs exactly two --measure files (nu then mu)")
    nu = load_measure(args.measure[0], ring, inputs)
    mu = load_measure(args.measure[1], ring, inputs)
    return {"weights": _measure_dict(convolve(ring, d, nu, mu))}


def cmd_walk_harmonic(args, inputs, warnings):
    ring, d, mu, K = _kernel_from_args(args, inputs, warnings)
    if ring.truncated or not K.leak_free:
        raise NotFinite("harmonic functions are only computed on finite rings; "
                        "bounded harmonic functions on infinite rings are not finitely checkable")
    hb = harmonic_space(K)
    return {
        "dimension": hb.dimension,
        "basis": list(ring.basis),
        "vectors": hb.vectors,
        "generating": is_generating(ring, mu).status,
    }


def cmd_walk_diagnose(args, inputs, warnings):
    ring, d, mu, K = _kernel_from_args(args, inputs, warnings)
    gen = is_generating(ring, mu, max_depth=args.max_depth)
    out = {
        "generating": {"status": gen.status, "depth": gen.depth},
        "symmetric": is_symmetric(mu, ring),
        "stationary_residual": stationary_check(ring, d, mu, K=K),
    }
    if args.zero_two:
        out["zero_two"] = {
            "k": args.k,
            "norm": "sup-over-states total variation (proxy for the operator norm)",
            "delta": zero_two_diagnostic(ring, d, mu, args.m_max, args.k, K=K),
        }
    return out


def cmd_walk_sample(args, inputs, warnings):
    ring, d, mu, K = _kernel_from_args(args, inputs, warnings)
    start = args.start if args.start is not None else ring.unit
    paths = sample_paths(K, start, args.length, args.paths, args.seed)
    ends = np.bincount(paths[:, -1], minlength=len(ring)) / args.paths
    out = {
        "seed": args.seed,
        "start": start,
        "length": args.length,
        "paths": args.paths,
        "final_distribution": {ring.basis[i]: float(ends[i]) for i in np.flatnonzero(ends)},
    }
    if args.paths <= 100:
        out["samples"] = [[ring.basis[i] for i in p] for p in paths]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"step{j}" for j in range(args.length + 1)])
            for p in paths:
                w.writerow([ring.basis[i] for i in p])
    return out


def cmd_amen_check(args, inputs, warnings):
    obj = parse_object(args.object)
    schedule = None
    if args.schedule and args.schedule != "auto":
        schedule = [int(x) for x in args.schedule.split(",")]
    if args.ring and Path(args.ring).exists():
        ring, _ = load_ring(args, inputs)
        source = ring
        if schedule:
            warnings.append("--schedule ignored for a ring file (single window)")
    elif args.ring:
        source = FamilySpec.parse(args.ring)
        if args.window is not None:
            source = source.with_window(args.window)
    elif args.family:
        source = _spec_from_args(args)
    else:
        raise Failure(EXIT_VALIDATION, "give --ring or --family")
    dims = _dims_factory(args.dims, inputs)
    kw = {"gap_tol": args.gap_tol, "window_schedule": schedule}
    if args.tol is not None:
        kw["tol"] = args.tol
    verdict = amenability_verdict(source, dims, obj, **kw)
    warnings.extend(verdict.warnings)
    if verdict.kind == "Inconclusive":
        warnings.append("verdict is inconclusive")
    return {"object": obj, **verdict.to_dict()}


def cmd_amen_benchmark(args, inputs, warnings):
    cert = free_group_benchmark(args.rank, args.radius, method=args.method)
    return {"rank": args.rank, "radius": args.radius, "dimension": 2 * args.rank,
            "gap": 2 * args.rank - cert.lower_bound, "spectral_radius": 2 * math.sqrt(2 * args.rank - 1),
            **cert.to_dict()}


def _inclusion(args, inputs, need_state=False):
    inputs.append(Path(args.inclusion))
    inc, state, parts = parse_inclusion(args.inclusion)
    if need_state and state is None:
        raise Failure(EXIT_VALIDATION, "the inclusion file needs a 'state'")
    return inc, state, parts


def cmd_entropy_bound(args, inputs, warnings):
    inc, state, _ = _inclusion(args, inputs, need_state=True)
    masses = block_masses(inc, state)
    return {"masses": masses, "h_bound": h_bound_blocks(inc, masses),
            "two_log_norm": 2 * math.log(inclusion_norm(inc.mult))}


def cmd_entropy_gap(args, inputs, warnings):
    inc, state, _ = _inclusion(args, inputs, need_state=True)
    b = entropy_gap_bounds(inc, state)
    return {"lower": b.lower, "gap": b.gap, "upper": b.upper, "holds": b.holds()}


def cmd_entropy_maximize(args, inputs, warnings):
    inc, _, _ = _inclusion(args, inputs)
    xi, value = f_maximizer(inc.mult)
    norm = inclusion_norm(inc.mult)
    return {"xi": xi, "value": value, "norm": norm, "two_log_norm": 2 * math.log(norm)}


def cmd_entropy_check(args, inputs, warnings):
    inc, state, _ = _inclusion(args, inputs, need_state=True)
    return two_log_norm_check(inc, block_masses(inc, state))


def cmd_entropy_defect(args, inputs, warnings):
    inc, state, parts = _inclusion(args, inputs, need_state=True)
    if not parts:
        raise Failure(EXIT_VALIDATION, "the inclusion file needs 'parts' for defect")
    return {"defect": decomposition_defect(inc, state, parts), "parts": len(parts)}


# -- parser ------------------------------------------------------------------------


def _ring_opts(p, family=True):
    p.add_argument("--ring", help="ring JSON file or FAMILY:key=value,...")
    if family:
        p.add_argument("--family", help="family tag")
        p.add_argument("--params", default="", help="key=value,... or a JSON object")
    p.add_argument("--window", type=int, help="window parameter for truncated families")


def _common(p):
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--csv", help="write a dense CSV dump here")
    p.add_argument("--tol", type=float, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="fusionwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True)

    ring = groups.add_parser("ring").add_subparsers(dest="command", required=True)
    p = ring.add_parser("build")
    p.add_argument("--family", required=True)
    p.add_argument("--params", default="")
    p.add_argument("--window", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ring_build)
    for name, func in (("validate", cmd_ring_validate), ("info", cmd_ring_info)):
        p = ring.add_parser(name)
        _ring_opts(p)
        _common(p)
        p.set_defaults(func=func)

    walk = groups.add_parser("walk").add_subparsers(dest="command", required=True)
    for name, func in (("kernel", cmd_walk_kernel), ("convolve", cmd_walk_convolve),
                       ("harmonic", cmd_walk_harmonic), ("diagnose", cmd_walk_diagnose),
                       ("sample", cmd_walk_sample)):
        p = walk.add_parser(name)
        _ring_opts(p)
        _common(p)
        p.add_argument("--dims", default="fp", help="fp | ones | classical | quantum:q=Q | FILE")
        p.add_argument("--measure", action="append", required=True)
        p.set_defaults(func=func)
        if name == "diagnose":
            p.add_argument("--zero-two", action="store_true")
            p.add_argument("--m-max", type=int, default=20)
            p.add_argument("--k", type=int, default=1)
            p.add_argument("--max-depth", type=int, default=64)
        if name == "sample":
            p.add_argument("--seed", type=int, required=True)
            p.add_argument("--start")
            p.add_argument("--length", type=int, default=10)
            p.add_argument("--paths", type=int, default=1)

    amen = groups.add_parser("amen").add_subparsers(dest="command", required=True)
    p = amen.add_parser("check")
    _ring_opts(p)
    _common(p)
    p.add_argument("--dims", default="fp")
    p.add_argument("--object", required=True, help="formal sum, e.g. 1 or a+A+b+B or 2*x")
    p.add_argument("--schedule", default="auto", help="comma-separated windows or 'auto'")
    p.add_argument("--gap-tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_amen_check)
    p = amen.add_parser("benchmark")
    _common(p)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--method", choices=("ball", "radial"), default="ball")
    p.set_defaults(func=cmd_amen_benchmark)

    ent = groups.add_parser("entropy").add_subparsers(dest="command", required=True)
    for name, func in (("bound", cmd_entropy_bound), ("gap", cmd_entropy_gap),
                       ("maximize", cmd_entropy_maximize), ("check", cmd_entropy_check),
                       ("defect", cmd_entropy_defect)):
        p = ent.add_parser(name)
        _common(p)
        p.add_argument("--inclusion", required=True)
        p.set_defaults(func=func)
    return parser


def run(argv=None):
    """Execute one command; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    inputs, warnings = [], []
    code = EXIT_OK
    try:
        result = args.func(args, inputs, warnings)
        if isinstance(result, tuple):
            result, code = result
        if code == "raw":
            _emit(args, result)
            return EXIT_OK
    except Failure as exc:
        print(f"fusionwalk: {exc}", file=sys.stderr)
        return exc.code
    except TruncationOverflow as exc:
        print(f"fusionwalk: truncation overflow: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (ValidationError, ParseError, InvalidSpec, DimensionMismatch, NotFinite,
            ShapeMismatch, SupportViolation) as exc:
        print(f"fusionwalk: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FusionWalkError as exc:
        print(f"fusionwalk: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {
        "command": argv,
        "inputs_digest": digest(*inputs) if inputs else None,
        "results": result,
        "warnings": warnings,
        "version": __version__,
    }
    _emit(args, report)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
