"""The numba kernels and their numpy fallbacks must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from hdx import _kernels
from hdx.f2_chains import coboundary_matrix, subspace_basis
from hdx.generators import corpus, full_simplex, hollow_simplex, projective_plane_flag

BACKENDS = (_kernels.NUMBA, _kernels.NUMPY)


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _both(name, *args):
    out = [getattr(B, name)(*args) for B in BACKENDS]
    assert _same(*out), name
    return out[0]


CASES = [(n, X) for n, X in corpus() if max(X.num_cells(k) for k in range(X.n + 1)) <= 16][:18]


@pytest.mark.parametrize("name,X", CASES)
def test_rref_parity(name, X):
    for k in range(-1, X.n):
        D = coboundary_matrix(X, k)
        _both("rref", _kernels.pack_rows(D), D.shape[1])


@pytest.mark.parametrize("name,X", CASES)
def test_scan_parity(name, X):
    rng = np.random.default_rng(0)
    for k in range(0, X.n):
        ptr, idx = X.cofacets[k]
        w, w1 = X.int_weights(k), X.int_weights(k + 1)
        N = X.num_cells(k)
        for kind in ("B", "Z"):
            S = subspace_basis(X, k, kind)
            sp, si = S.generators_csr()
            base = rng.integers(0, 2, N).astype(np.uint8)
            _both("span_min", base, sp, si, w)
            if S.free_columns.size:
                _both("quotient_scan", N, S.free_columns.astype(np.int64), sp, si, w, ptr, idx, w1)
            if N <= 14:
                _both("coset_table", N, S.key_columns, w, ptr, idx, w1, 1 << (N - S.dim))
        Z, B = subspace_basis(X, k, "Z"), subspace_basis(X, k, "B")
        if Z.dim > B.dim:
            zkeys = np.array([B.key(r) for r in Z.rows], np.int64)
            zp, zi = Z.generators_csr()
            _both("systole_scan", N, zp, zi, zkeys, w)


@pytest.mark.parametrize("X", [projective_plane_flag(2), hollow_simplex(5), full_simplex(4)])
def test_ratio_scan_parity(X):
    ptr, idx = X.cofacets[0]
    m0 = int(X.int_weights(0).sum())
    for cap in (0, m0 // 3, m0 // 2, m0):
        _both("ratio_scan", X.num_cells(0), X.int_weights(0), ptr, idx, X.int_weights(1), cap)


def test_pack_roundtrip():
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, (5, 130)).astype(np.uint8)
    assert np.array_equal(_kernels.unpack_rows(_kernels.pack_rows(bits), 130), bits)


def test_encode_decode():
    for code in (0, 1, 5, 0b1011001):
        assert _kernels.encode(_kernels.decode(code, 8)) == code


def test_env_flag_selects_numpy():
    code = (
        "from hdx import _kernels; from hdx.expansion import coboundary_expansion;"
        "from hdx.generators import projective_plane_flag as p;"
        "print(_kernels.active.name, coboundary_expansion(p(2), 0))"
    )
    env = dict(os.environ, HDX_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, value = out.stdout.split()
    assert name == "numpy"
    from hdx.expansion import coboundary_expansion

    assert value == str(coboundary_expansion(projective_plane_flag(2), 0))
