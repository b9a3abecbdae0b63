"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Both paths get identical inputs; the script also reports the largest
difference between their outputs.
"""
import argparse
import time

import numpy as np

from groupaccess import GeneratorSpec, _accel, _kernels, realize
from groupaccess.builtins import builtin_representation
from groupaccess.geometry import PolytopeSampler, embed


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def nnls_cases(rng, quick):
    N = 2000 if quick else 20000
    # small column counts hit subset enumeration in the numpy path,
    # larger ones the per-row active set loop
    for m, n in ((24, 5), (36, 8), (64, 14)):
        A = rng.normal(size=(m, n))
        B = rng.normal(size=(N if n < 14 else N // 10, m))
        yield f"nnls_batch m={m} n={n} N={len(B)}", A, B


def har_cases(rng, quick):
    steps = 200 if quick else 2000
    for name, rep in (("s3", builtin_representation("s3")),
                      ("z12", realize([GeneratorSpec.rotation(12)]))):
        s = PolytopeSampler(embed(rep), method="hit-and-run")
        K, D = 64, s.poly.affine_dim
        dirs = rng.standard_normal((steps, K, D))
        us = rng.random((steps, K))
        X0 = np.tile(s.center, (K, 1))
        yield f"hit_and_run {name} D={D} chains={K} steps={steps}", (s.H, s.c, X0, dirs, us)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller problem sizes")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    rows = []
    for label, A, B in nnls_cases(rng, args.quick):
        _kernels.nnls_batch(A, B[:2], use_numba=True)  # compile
        tn, (Xn, rn) = best_of(lambda: _kernels.nnls_batch(A, B, use_numba=True), args.repeat)
        tp, (Xp, rp) = best_of(lambda: _kernels.nnls_batch(A, B, use_numba=False), args.repeat)
        rows.append((label, tn, tp, float(np.abs(rn - rp).max())))
    for label, har_args in har_cases(rng, args.quick):
        _kernels.hit_and_run_chains(*har_args[:3], har_args[3][:2], har_args[4][:2],
                                    use_numba=True)
        tn, a = best_of(lambda: _kernels.hit_and_run_chains(*har_args, thin=10, use_numba=True),
                        args.repeat)
        tp, b = best_of(lambda: _kernels.hit_and_run_chains(*har_args, thin=10, use_numba=False),
                        args.repeat)
        rows.append((label, tn, tp, float(np.abs(a - b).max())))

    w = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{w}}  {'numba [s]':>10}  {'numpy [s]':>10}  {'speedup':>8}  {'max diff':>9}")
    for label, tn, tp, diff in rows:
        print(f"{label:<{w}}  {tn:10.4f}  {tp:10.4f}  {tp / tn:8.1f}  {diff:9.1e}")


if __name__ == "__main__":
    main()
