"""Exact expansion constants by exhaustive enumeration.

For ``phi`` in ``C^k`` write ``dist_S(phi)`` for the least norm in the coset
``phi + S``.  Then

* coboundary expansion  ``eps_k  = min over phi not in B^k of ||d phi|| / dist_B(phi)``
* cocycle expansion     ``eps~_k = min over phi not in Z^k of ||d phi|| / dist_Z(phi)``
* cofilling constant    ``mu_k   = max over 0 != beta in B^(k+1) of
  (least norm of a preimage of beta) / ||beta||``
* systole               ``min ||z|| over z in Z^k - B^k``

Empty minimizations give ``math.inf``.  Witnesses are the lexicographically
least optimizers (cells in canonical order, earlier cells more significant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hdx import _kernels, config
from hdx.complex_core import WeightedComplex, format_rational
from hdx.errors import BadArgs, BadDimension, CapExceeded
from hdx.f2_chains import Cochain, SubspaceBasis, subspace_basis

INF = math.inf


def fmt_value(v) -> str:
    if v == INF:
        return "inf"
    return format_rational(v)


def _check_cap(what: str, bits: int, cap: int) -> None:
    if bits >= 63 or (1 << bits) > cap:
        raise CapExceeded(what, bits, cap)


def coset_min_norm(phi: Cochain, S: SubspaceBasis, cap: int = config.ENUMERATION_CAP) -> tuple[Fraction, Cochain]:
    """Least norm in ``phi + span(S)`` and the lex-least element attaining it."""
    if S.k != phi.k or S.X.digest != phi.X.digest:
        raise BadArgs("cochain and subspace live on different spaces")
    _check_cap("coset enumeration", S.dim, cap)
    X = phi.X
    ptr, idx = S.generators_csr()
    best, vec = _kernels.active.span_min(
        np.ascontiguousarray(phi.bits), ptr, idx, X.int_weights(phi.k)
    )
    return Fraction(int(best), X.denom), Cochain(X, phi.k, vec)


@dataclass(frozen=True)
class Extremum:
    """An expansion constant with the cochain that attains it.

    ``witness`` is phi (for eps, eps~, systole) or the cheapest preimage psi
    (for mu).  ``searched`` counts the cochains or cosets visited.
    """

    value: object
    witness: Cochain | None
    searched: int

    def to_dict(self) -> dict:
        return {
            "value": fmt_value(self.value),
            "witness": None if self.witness is None else self.witness.to_hex(),
            "searched": self.searched,
        }


def _expansion_range(X: WeightedComplex, k: int) -> None:
    if not -1 <= k <= X.n - 1:
        raise BadDimension(f"expansion constants need -1 <= k <= {X.n - 1}, got {k}")


def _table_min_ratio(X: WeightedComplex, k: int, S: SubspaceBasis, cap: int) -> Extremum:
    """Enumerate all of ``C^k`` once, bucket by coset of S, then minimize."""
    N = X.num_cells(k)
    _check_cap("cochain enumeration", N, cap)
    w = X.int_weights(k)
    if int(w.sum()).bit_length() + N > 62:
        raise BadArgs("weights too large for the packed exhaustive table")
    nkeys = 1 << (N - S.dim)
    ptr, idx = X.cofacets[k]
    comp, dn = _kernels.active.coset_table(
        N, S.key_columns, w, ptr, idx, X.int_weights(k + 1), nkeys
    )
    if nkeys == 1:
        return Extremum(INF, None, 1 << N)
    mask = (1 << N) - 1
    mn = comp[1:] >> N
    dnk = dn[1:]
    # float argmin narrows the field; the exact minimum is among the keys
    # whose cross-multiplied ratio does not exceed the float candidate's
    c = int(np.argmin(dnk / mn))
    near = np.flatnonzero(dnk * mn[c] <= dnk[c] * mn)
    best = min(
        near.tolist(),
        key=lambda i: (Fraction(int(dnk[i]), int(mn[i])), int(comp[1 + i]) & mask),
    )
    code = int(comp[1 + best]) & mask
    value = Fraction(int(dnk[best]), int(mn[best]))
    return Extremum(value, Cochain(X, k, _kernels.decode(code, N)), 1 << N)


def _quotient_min_ratio(X: WeightedComplex, k: int, S: SubspaceBasis, cap: int) -> tuple[Extremum, int, int]:
    """One representative per coset of S (supported off the pivots), each
    reduced to its coset minimum by an inner span search."""
    N = X.num_cells(k)
    free = S.free_columns
    _check_cap("coset representatives", int(free.size), cap)
    _check_cap("coset enumeration", S.dim, cap)
    if free.size == 0:
        return Extremum(INF, None, 0), 0, 0
    sp_, si = S.generators_csr()
    ptr, idx = X.cofacets[k]
    found, bdn, bmn, bvec, count = _kernels.active.quotient_scan(
        N, free.astype(np.int64), sp_, si, X.int_weights(k), ptr, idx, X.int_weights(k + 1)
    )
    return Extremum(Fraction(int(bdn), int(bmn)), Cochain(X, k, bvec), int(count)), int(bdn), int(bmn)


def _min_ratio(X: WeightedComplex, k: int, kind: str, mode: str, cap: int) -> Extremum:
    _expansion_range(X, k)
    S = subspace_basis(X, k, kind)
    if mode == "exhaustive":
        return _table_min_ratio(X, k, S, cap)
    if mode == "quotient":
        return _quotient_min_ratio(X, k, S, cap)[0]
    raise BadArgs(f"unknown mode {mode!r}")


def coboundary_expansion_detail(X, k, mode="quotient", cap=config.ENUMERATION_CAP) -> Extremum:
    return _min_ratio(X, k, "B", mode, cap)


def cocycle_expansion_detail(X, k, mode="quotient", cap=config.ENUMERATION_CAP) -> Extremum:
    return _min_ratio(X, k, "Z", mode, cap)


def coboundary_expansion(X: WeightedComplex, k: int, mode: str = "quotient", cap: int = config.ENUMERATION_CAP):
    """``eps_k`` as a Fraction, or ``math.inf`` when ``C^k = B^k``."""
    return coboundary_expansion_detail(X, k, mode, cap).value


def cocycle_expansion(X: WeightedComplex, k: int, mode: str = "quotient", cap: int = config.ENUMERATION_CAP):
    """``eps~_k`` as a Fraction, or ``math.inf`` when ``C^k = Z^k``."""
    return cocycle_expansion_detail(X, k, mode, cap).value


def cofilling_detail(X: WeightedComplex, k: int, cap: int = config.ENUMERATION_CAP) -> Extremum:
    """``mu_k`` with its worst preimage.  Each nonzero ``beta`` in ``B^(k+1)``
    is ``d`` of exactly one representative of ``C^k / Z^k``; its cheapest
    preimage is that coset's minimum.  Zero when ``B^(k+1) = 0``."""
    _expansion_range(X, k)
    Z = subspace_basis(X, k, "Z")
    ext, dn, mn = _quotient_min_ratio(X, k, Z, cap)
    if ext.witness is None:
        return Extremum(Fraction(0), None, 0)
    return Extremum(Fraction(mn, dn), ext.witness, ext.searched)


def cofilling(X: WeightedComplex, k: int, cap: int = config.ENUMERATION_CAP):
    return cofilling_detail(X, k, cap).value


def systole_detail(X: WeightedComplex, k: int, cap: int = config.ENUMERATION_CAP) -> Extremum:
    if not -1 <= k <= X.n:
        raise BadDimension(f"systole needs -1 <= k <= {X.n}, got {k}")
    Z = subspace_basis(X, k, "Z")
    B = subspace_basis(X, k, "B")
    if Z.dim == B.dim:
        return Extremum(INF, None, 0)
    _check_cap("cocycle enumeration", Z.dim, cap)
    zkeys = np.array([B.key(r) for r in Z.rows], np.int64)
    ptr, idx = Z.generators_csr()
    found, best, vec = _kernels.active.systole_scan(
        X.num_cells(k), ptr, idx, zkeys, X.int_weights(k)
    )
    return Extremum(Fraction(int(best), X.denom), Cochain(X, k, vec), (1 << Z.dim) - 1)


def systole(X: WeightedComplex, k: int, cap: int = config.ENUMERATION_CAP):
    """Least norm of a cocycle that is not a coboundary; ``inf`` if ``H^k = 0``."""
    return systole_detail(X, k, cap).value


def lmm_bound(n: int, k: int, weyl_order: int) -> Fraction:
    """Coboundary expansion floor ``1 / (C(n+1, k+2)^2 |W|)`` for spherical
    buildings of dimension n with Weyl group of order ``|W|``."""
    if not (isinstance(n, int) and isinstance(k, int) and 0 <= k <= n - 1):
        raise BadArgs(f"need 0 <= k <= n-1, got n={n}, k={k}")
    if not isinstance(weyl_order, int) or weyl_order < 1:
        raise BadArgs(f"Weyl group order must be a positive int, got {weyl_order!r}")
    return Fraction(1, math.comb(n + 1, k + 2) ** 2 * weyl_order)


@dataclass
class ExpansionRecord:
    k: int
    epsilon: Extremum
    epsilon_tilde: Extremum
    mu: Extremum
    systole: Extremum | None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "epsilon": self.epsilon.to_dict(),
            "epsilon_tilde": self.epsilon_tilde.to_dict(),
            "mu": self.mu.to_dict(),
            "systole": None if self.systole is None else self.systole.to_dict(),
        }


@dataclass
class ExpansionReport:
    digest: str
    mode: str
    records: list = field(default_factory=list)

    def by_k(self, k: int) -> ExpansionRecord:
        for r in self.records:
            if r.k == k:
                return r
        raise KeyError(k)

    def to_dict(self) -> dict:
        return {"complex": self.digest, "mode": self.mode, "records": [r.to_dict() for r in self.records]}


def expansion_report(
    X: WeightedComplex, ks=None, mode: str = "quotient", cap: int = config.ENUMERATION_CAP
) -> ExpansionReport:
    ks = range(-1, X.n) if ks is None else ks
    rep = ExpansionReport(X.digest, mode)
    for k in ks:
        rep.records.append(
            ExpansionRecord(
                k,
                coboundary_expansion_detail(X, k, mode, cap),
                cocycle_expansion_detail(X, k, mode, cap),
                cofilling_detail(X, k, cap),
                systole_detail(X, k, cap) if k >= 0 else None,
            )
        )
    return rep
