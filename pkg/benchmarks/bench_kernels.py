"""Time the enumeration kernels on the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends run on identical inputs; outputs are compared before any timing
is reported, so a mismatch aborts the run.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hdx import _kernels
from hdx.f2_chains import coboundary_matrix, subspace_basis
from hdx.generators import full_simplex, hollow_simplex, projective_plane_flag


def workloads():
    fano = projective_plane_flag(2)
    tet = hollow_simplex(5)
    big = full_simplex(6)

    def quotient(X, k, kind):
        S = subspace_basis(X, k, kind)
        ptr, idx = X.cofacets[k]
        sp, si = S.generators_csr()
        return (X.num_cells(k), S.free_columns.astype(np.int64), sp, si,
                X.int_weights(k), ptr, idx, X.int_weights(k + 1))

    def table(X, k, kind):
        S = subspace_basis(X, k, kind)
        ptr, idx = X.cofacets[k]
        N = X.num_cells(k)
        return (N, S.key_columns, X.int_weights(k), ptr, idx, X.int_weights(k + 1), 1 << (N - S.dim))

    def systole(X, k):
        Z, B = subspace_basis(X, k, "Z"), subspace_basis(X, k, "B")
        zkeys = np.array([B.key(r) for r in Z.rows], np.int64)
        ptr, idx = Z.generators_csr()
        return (X.num_cells(k), ptr, idx, zkeys, X.int_weights(k))

    def ratio(X):
        ptr, idx = X.cofacets[0]
        m0 = int(X.int_weights(0).sum())
        return (X.num_cells(0), X.int_weights(0), ptr, idx, X.int_weights(1), m0 // 2)

    def rref(X, k):
        D = coboundary_matrix(X, k)
        return (_kernels.pack_rows(D), D.shape[1])

    yield "coset_table fano k=0", "coset_table", table(fano, 0, "B")
    yield "quotient_scan fano k=0", "quotient_scan", quotient(fano, 0, "B")
    yield "quotient_scan d5 k=1", "quotient_scan", quotient(tet, 1, "Z")
    yield "systole_scan fano k=1", "systole_scan", systole(fano, 1)
    yield "ratio_scan fano", "ratio_scan", ratio(fano)
    yield "rref simplex6 k=2", "rref", rref(big, 2)


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def bench(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'workload':28s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for label, name, inputs in workloads():
        nb, npf = getattr(_kernels.NUMBA, name), getattr(_kernels.NUMPY, name)
        out_nb, out_np = nb(*inputs), npf(*inputs)  # also warms the jit cache
        if not _same(out_nb, out_np):
            raise SystemExit(f"{label}: backends disagree")
        t_nb = bench(nb, inputs, args.repeat)
        t_np = bench(npf, inputs, args.repeat)
        print(f"{label:28s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
