"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_backends.py [--radius 10] [--paths 200000] [--repeat 3]

Times the Gram power iteration on the free-group ball (rank 2) and the path
sampler on the SU(2) representation ring, once per backend, and checks that
both backends agree.
"""

import argparse
import time

import numpy as np

from fusionwalk import Measure, _backend, gamma_norm_lower, kernel, sample_paths
from fusionwalk.families import FamilySpec, build, classical_su2_dims


def best_of(repeat, func):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--radius", type=int, default=10)
    parser.add_argument("--paths", type=int, default=200_000)
    parser.add_argument("--length", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = sorted(_backend.BACKENDS)
    print(f"backends available: {', '.join(backends)} (default {_backend.NAME})")

    ring = build(FamilySpec("free_group", {"rank": 2, "radius": args.radius}))
    obj = {g: 1 for g in "aAbB"}
    print(f"\npower iteration, free group rank 2 radius {args.radius} ({len(ring)} labels)")
    power = {}
    for name in backends:
        t, cert = best_of(args.repeat, lambda: gamma_norm_lower(ring, obj, tol=1e-13, backend=name))
        power[name] = (t, cert)
        print(f"  {name:7s} {t:8.3f}s  {cert.iterations} iterations  bound {cert.lower_bound:.12f}")

    su2 = build(FamilySpec("su2_rep", {"cutoff": 2 * args.length + 2}))
    K = kernel(su2, classical_su2_dims(su2), Measure({"1": 0.5, "2": 0.5}))
    print(f"\nsampler, SU(2) rep ring, {args.paths} paths of length {args.length}")
    samples = {}
    for name in backends:
        t, paths = best_of(args.repeat, lambda: sample_paths(K, "0", args.length, args.paths, 1, backend=name))
        samples[name] = (t, paths)
        print(f"  {name:7s} {t:8.3f}s")

    if len(backends) == 2:
        (tp, cp), (tc, cc) = power["python"], power["cython"]
        (sp_, pp), (sc, pc) = samples["python"], samples["cython"]
        print(f"\nspeedup (python / cython): power iteration {tp / tc:.2f}x, sampler {sp_ / sc:.2f}x")
        print(f"bounds agree to {abs(cp.lower_bound - cc.lower_bound):.1e}; "
              f"paths identical: {bool(np.array_equal(pp, pc))}")


if __name__ == "__main__":
    main()
