"""Hot enumeration and GF(2) kernels.

Every kernel exists twice with identical signatures and results: a loop
version compiled with ``numba.njit`` and a vectorised pure-numpy version.
``active`` points at the numba set unless numba is missing or the environment
variable ``HDX_DISABLE_NUMBA`` is set to a truthy value.

Conventions shared by all kernels:

* cochains are ``uint8`` 0/1 vectors indexed in canonical simplex order;
* weights are ``int64`` (the complex scales its rationals by a common
  denominator, so every comparison here is exact);
* sparse families of vectors (generators, cofacet lists) are CSR pairs
  ``(ptr, idx)``;
* a cochain's *code* is the integer whose bit ``N-1-i`` is ``phi[i]``, so
  integer order on codes is lexicographic order on bit vectors.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

INT64_MAX = np.iinfo(np.int64).max
_CHUNK = 1 << 15


def _numba_enabled() -> bool:
    flag = os.environ.get("HDX_DISABLE_NUMBA", "").strip().lower()
    return numba is not None and flag not in ("1", "true", "yes", "on")


USE_NUMBA = _numba_enabled()


def _jit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# numba loop kernels
# ---------------------------------------------------------------------------


@_jit
def _lexless(a, b):
    for i in range(a.shape[0]):
        if a[i] != b[i]:
            return a[i] < b[i]
    return False


@_jit
def _ctz(t):
    j = 0
    while ((t >> j) & 1) == 0:
        j += 1
    return j


@_jit
def _nb_rref(rows, ncols):
    rows = rows.copy()
    m = rows.shape[0]
    nw = rows.shape[1]
    pivots = np.empty(min(m, ncols), np.int64)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        wd = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, m):
            if (rows[i, wd] & bit) != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for t in range(nw):
                tmp = rows[p, t]
                rows[p, t] = rows[r, t]
                rows[r, t] = tmp
        for i in range(m):
            if i != r and (rows[i, wd] & bit) != 0:
                for t in range(nw):
                    rows[i, t] ^= rows[r, t]
        pivots[r] = c
        r += 1
    return rows[:r].copy(), pivots[:r].copy()


@_jit
def _nb_span_min(base, g_ptr, g_idx, w):
    n = base.shape[0]
    r = g_ptr.shape[0] - 1
    vec = base.copy()
    norm = 0
    for i in range(n):
        if vec[i]:
            norm += w[i]
    best = norm
    bvec = vec.copy()
    for t in range(1, 1 << r):
        j = _ctz(t)
        for p in range(g_ptr[j], g_ptr[j + 1]):
            i = g_idx[p]
            if vec[i]:
                vec[i] = 0
                norm -= w[i]
            else:
                vec[i] = 1
                norm += w[i]
        if norm < best or (norm == best and _lexless(vec, bvec)):
            best = norm
            bvec[:] = vec
    return best, bvec


@_jit
def _nb_coset_table(n, keycols, w, cof_ptr, cof_idx, w1, nkeys):
    comp = np.full(nkeys, INT64_MAX, np.int64)
    dn = np.zeros(nkeys, np.int64)
    vec = np.zeros(n, np.uint8)
    dvec = np.zeros(w1.shape[0], np.uint8)
    norm = 0
    dnorm = 0
    key = 0
    code = 0
    comp[0] = 0
    for t in range(1, 1 << n):
        i = _ctz(t)
        code ^= 1 << (n - 1 - i)
        key ^= keycols[i]
        if vec[i]:
            vec[i] = 0
            norm -= w[i]
        else:
            vec[i] = 1
            norm += w[i]
        for p in range(cof_ptr[i], cof_ptr[i + 1]):
            q = cof_idx[p]
            if dvec[q]:
                dvec[q] = 0
                dnorm -= w1[q]
            else:
                dvec[q] = 1
                dnorm += w1[q]
        c = (norm << n) | code
        if c < comp[key]:
            comp[key] = c
        dn[key] = dnorm
    return comp, dn


@_jit
def _nb_quotient_scan(n, comp_idx, s_ptr, s_idx, w, cof_ptr, cof_idx, w1):
    q = comp_idx.shape[0]
    vec = np.zeros(n, np.uint8)
    dvec = np.zeros(w1.shape[0], np.uint8)
    dnorm = 0
    found = False
    bdn = 0
    bmn = 1
    bvec = np.zeros(n, np.uint8)
    count = 0
    for t in range(1, 1 << q):
        i = comp_idx[_ctz(t)]
        vec[i] ^= 1
        for p in range(cof_ptr[i], cof_ptr[i + 1]):
            e = cof_idx[p]
            if dvec[e]:
                dvec[e] = 0
                dnorm -= w1[e]
            else:
                dvec[e] = 1
                dnorm += w1[e]
        mn, wvec = _nb_span_min(vec, s_ptr, s_idx, w)
        count += 1
        if not found:
            better = True
        else:
            lhs = dnorm * bmn
            rhs = bdn * mn
            better = lhs < rhs or (lhs == rhs and _lexless(wvec, bvec))
        if better:
            found = True
            bdn = dnorm
            bmn = mn
            bvec[:] = wvec
    return found, bdn, bmn, bvec, count


@_jit
def _nb_systole_scan(n, z_ptr, z_idx, zkeys, w):
    r = z_ptr.shape[0] - 1
    vec = np.zeros(n, np.uint8)
    norm = 0
    key = 0
    found = False
    best = 0
    bvec = np.zeros(n, np.uint8)
    for t in range(1, 1 << r):
        j = _ctz(t)
        key ^= zkeys[j]
        for p in range(z_ptr[j], z_ptr[j + 1]):
            i = z_idx[p]
            if vec[i]:
                vec[i] = 0
                norm -= w[i]
            else:
                vec[i] = 1
                norm += w[i]
        if key != 0:
            if not found or norm < best or (norm == best and _lexless(vec, bvec)):
                found = True
                best = norm
                bvec[:] = vec
    return found, best, bvec


@_jit
def _nb_ratio_scan(n, w, cof_ptr, cof_idx, w1, norm_cap):
    vec = np.zeros(n, np.uint8)
    dvec = np.zeros(w1.shape[0], np.uint8)
    norm = 0
    dnorm = 0
    code = 0
    count = 0
    found = False
    bdn = 0
    bn = 1
    bcode = 0
    for t in range(1, 1 << n):
        i = _ctz(t)
        code ^= 1 << (n - 1 - i)
        if vec[i]:
            vec[i] = 0
            norm -= w[i]
        else:
            vec[i] = 1
            norm += w[i]
        for p in range(cof_ptr[i], cof_ptr[i + 1]):
            e = cof_idx[p]
            if dvec[e]:
                dvec[e] = 0
                dnorm -= w1[e]
            else:
                dvec[e] = 1
                dnorm += w1[e]
        if norm > norm_cap:
            continue
        count += 1
        if not found:
            better = True
        else:
            lhs = dnorm * bn
            rhs = bdn * norm
            better = lhs < rhs or (lhs == rhs and code < bcode)
        if better:
            found = True
            bdn = dnorm
            bn = norm
            bcode = code
    return count, found, bdn, bn, bcode


# ---------------------------------------------------------------------------
# numpy fallback kernels
# ---------------------------------------------------------------------------


def _csr_dense(ptr, idx, ncols):
    rows = ptr.shape[0] - 1
    out = np.zeros((rows, ncols), np.uint8)
    for j in range(rows):
        out[j, idx[ptr[j] : ptr[j + 1]]] = 1
    return out


def _code_bits(codes, n):
    shifts = (n - 1 - np.arange(n, dtype=np.int64))
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _coef_bits(ts, r):
    return ((ts[:, None] >> np.arange(r, dtype=np.int64)[None, :]) & 1).astype(np.int64)


def _lex_first(rows):
    """Index of the lexicographically least row of a 0/1 matrix."""
    if rows.shape[0] == 1:
        return 0
    return int(np.lexsort(rows.T[::-1])[0])


def _np_rref(rows, ncols):
    rows = rows.copy()
    m = rows.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        wd, bit = c >> 6, np.uint64(1) << np.uint64(c & 63)
        col = (rows[:, wd] & bit) != 0
        hits = np.flatnonzero(col[r:])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            rows[[p, r]] = rows[[r, p]]
            col[[p, r]] = col[[r, p]]
        col[r] = False
        rows[col] ^= rows[r]
        pivots.append(c)
        r += 1
    return rows[:r].copy(), np.asarray(pivots, np.int64)


def _np_span_min(base, g_ptr, g_idx, w):
    n = base.shape[0]
    r = g_ptr.shape[0] - 1
    gens = _csr_dense(g_ptr, g_idx, n).astype(np.int64)
    best = None
    bvec = None
    total = 1 << r
    for a in range(0, total, _CHUNK):
        ts = np.arange(a, min(total, a + _CHUNK), dtype=np.int64)
        vecs = ((_coef_bits(ts, r) @ gens + base) & 1).astype(np.uint8)
        norms = vecs @ w
        lo = norms.min()
        cand = vecs[norms == lo]
        v = cand[_lex_first(cand)]
        if best is None or lo < best or (lo == best and _lexless_py(v, bvec)):
            best, bvec = int(lo), v.copy()
    return best, bvec


def _lexless_py(a, b):
    diff = np.flatnonzero(a != b)
    return bool(diff.size) and a[diff[0]] < b[diff[0]]


def _np_coset_table(n, keycols, w, cof_ptr, cof_idx, w1, nkeys):
    comp = np.full(nkeys, INT64_MAX, np.int64)
    dn = np.zeros(nkeys, np.int64)
    dmat = _csr_dense(cof_ptr, cof_idx, w1.shape[0]).astype(np.int64)
    total = 1 << n
    for a in range(0, total, _CHUNK):
        codes = np.arange(a, min(total, a + _CHUNK), dtype=np.int64)
        bits = _code_bits(codes, n)
        norms = bits @ w
        dnorms = ((bits @ dmat) & 1) @ w1
        keys = np.bitwise_xor.reduce(bits * keycols[None, :], axis=1)
        np.minimum.at(comp, keys, (norms << n) | codes)
        dn[keys] = dnorms
    return comp, dn


def _np_quotient_scan(n, comp_idx, s_ptr, s_idx, w, cof_ptr, cof_idx, w1):
    q = comp_idx.shape[0]
    r = s_ptr.shape[0] - 1
    gens = _csr_dense(s_ptr, s_idx, n).astype(np.int64)
    span = ((_coef_bits(np.arange(1 << r, dtype=np.int64), r) @ gens) & 1).astype(np.uint8)
    dmat = _csr_dense(cof_ptr, cof_idx, w1.shape[0]).astype(np.int64)
    found, bdn, bmn = False, 0, 1
    bvec = np.zeros(n, np.uint8)
    count = 0
    chunk = max(1, _CHUNK >> r)
    total = 1 << q
    for a in range(1, total, chunk):
        ts = np.arange(a, min(total, a + chunk), dtype=np.int64)
        reps = np.zeros((ts.size, n), np.uint8)
        reps[:, comp_idx] = _coef_bits(ts, q)
        dn = ((reps.astype(np.int64) @ dmat) & 1) @ w1
        allv = reps[:, None, :] ^ span[None, :, :]
        norms = allv @ w
        mn = norms.min(axis=1)
        count += ts.size
        c = int(np.argmin(dn / mn))
        near = np.flatnonzero(dn * mn[c] <= dn[c] * mn)
        cdn, cmn = _exact_min_ratio(dn[near], mn[near])
        tie = near[dn[near] * cmn == cdn * mn[near]]
        cands = np.array([_lex_min_row(allv[i][norms[i] == mn[i]]) for i in tie])
        j = _lex_first(cands)
        v = cands[j]
        # report the pair belonging to the witness, not just an equal ratio
        cdn, cmn = int(dn[tie[j]]), int(mn[tie[j]])
        lhs, rhs = cdn * bmn, bdn * cmn
        if not found or lhs < rhs or (lhs == rhs and _lexless_py(v, bvec)):
            found, bdn, bmn, bvec = True, int(cdn), int(cmn), v.copy()
    return found, bdn, bmn, bvec, count


def _lex_min_row(rows):
    return rows[_lex_first(rows)]


def _np_systole_scan(n, z_ptr, z_idx, zkeys, w):
    r = z_ptr.shape[0] - 1
    gens = _csr_dense(z_ptr, z_idx, n).astype(np.int64)
    found, best, bvec = False, 0, np.zeros(n, np.uint8)
    total = 1 << r
    for a in range(1, total, _CHUNK):
        ts = np.arange(a, min(total, a + _CHUNK), dtype=np.int64)
        coef = _coef_bits(ts, r)
        keys = np.bitwise_xor.reduce(coef * zkeys[None, :], axis=1)
        live = keys != 0
        if not live.any():
            continue
        vecs = ((coef[live] @ gens) & 1).astype(np.uint8)
        norms = vecs @ w
        lo = norms.min()
        cand = vecs[norms == lo]
        v = cand[_lex_first(cand)]
        if not found or lo < best or (lo == best and _lexless_py(v, bvec)):
            found, best, bvec = True, int(lo), v.copy()
    return found, best, bvec


def _np_ratio_scan(n, w, cof_ptr, cof_idx, w1, norm_cap):
    dmat = _csr_dense(cof_ptr, cof_idx, w1.shape[0]).astype(np.int64)
    count, found, bdn, bn, bcode = 0, False, 0, 1, 0
    total = 1 << n
    for a in range(1, total, _CHUNK):
        codes = np.arange(a, min(total, a + _CHUNK), dtype=np.int64)
        bits = _code_bits(codes, n)
        norms = bits @ w
        keep = norms <= norm_cap
        if not keep.any():
            continue
        codes, bits, norms = codes[keep], bits[keep], norms[keep]
        dnorms = ((bits @ dmat) & 1) @ w1
        count += codes.shape[0]
        # minimise dn/n exactly: compare by cross multiplication against the
        # chunk's float argmin, then resolve ties by code
        cand = np.argmin(dnorms / norms)
        cdn, cn = dnorms[cand], norms[cand]
        tie = dnorms * cn == cdn * norms
        better_than = dnorms * cn < cdn * norms
        if better_than.any():  # float argmin was off by rounding
            cdn, cn = _exact_min_ratio(dnorms, norms)
            tie = dnorms * cn == cdn * norms
        i = int(np.flatnonzero(tie)[np.argmin(codes[tie])])
        c, cdn, cn = int(codes[i]), dnorms[i], norms[i]
        if not found or cdn * bn < bdn * cn or (cdn * bn == bdn * cn and c < bcode):
            found, bdn, bn, bcode = True, int(cdn), int(cn), c
    return count, found, bdn, bn, bcode


def _exact_min_ratio(num, den):
    bn, bd = int(num[0]), int(den[0])
    for a, b in zip(num[1:].tolist(), den[1:].tolist()):
        if a * bd < bn * b:
            bn, bd = a, b
    return bn, bd


NUMBA = SimpleNamespace(
    name="numba",
    rref=_nb_rref,
    span_min=_nb_span_min,
    coset_table=_nb_coset_table,
    quotient_scan=_nb_quotient_scan,
    systole_scan=_nb_systole_scan,
    ratio_scan=_nb_ratio_scan,
)

NUMPY = SimpleNamespace(
    name="numpy",
    rref=_np_rref,
    span_min=_np_span_min,
    coset_table=_np_coset_table,
    quotient_scan=_np_quotient_scan,
    systole_scan=_np_systole_scan,
    ratio_scan=_np_ratio_scan,
)

active = NUMBA if USE_NUMBA else NUMPY


def csr(rows) -> tuple[np.ndarray, np.ndarray]:
    """Pack a list of index lists into CSR arrays."""
    ptr = np.zeros(len(rows) + 1, np.int64)
    for j, row in enumerate(rows):
        ptr[j + 1] = ptr[j] + len(row)
    idx = np.fromiter((i for row in rows for i in row), np.int64, count=int(ptr[-1]))
    return ptr, idx


def csr_from_dense(mat) -> tuple[np.ndarray, np.ndarray]:
    return csr([np.flatnonzero(row).tolist() for row in mat])


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into little-endian ``uint64`` words per row."""
    bits = np.atleast_2d(np.asarray(bits, np.uint8))
    m, n = bits.shape
    nw = max(1, (n + 63) // 64)
    padded = np.zeros((m, nw * 64), np.uint64)
    padded[:, :n] = bits
    shifts = np.arange(64, dtype=np.uint64)
    return np.bitwise_or.reduce(padded.reshape(m, nw, 64) << shifts, axis=2)


def unpack_rows(words: np.ndarray, n: int) -> np.ndarray:
    words = np.atleast_2d(np.asarray(words, np.uint64))
    shifts = np.arange(64, dtype=np.uint64)
    bits = (words[:, :, None] >> shifts) & np.uint64(1)
    return bits.reshape(words.shape[0], -1)[:, :n].astype(np.uint8)


def decode(code: int, n: int) -> np.ndarray:
    return np.array([(code >> (n - 1 - i)) & 1 for i in range(n)], np.uint8)


def encode(bits) -> int:
    code = 0
    for b in bits:
        code = (code << 1) | int(b)
    return code
