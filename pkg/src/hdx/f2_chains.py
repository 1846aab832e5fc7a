"""F2 cochains, the coboundary map, weighted norms, localization to links,
and GF(2) bases for coboundary and cocycle spaces."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np
import scipy.sparse as sp

from hdx import _kernels
from hdx.complex_core import Simplex, WeightedComplex, link
from hdx.errors import BadArgs, BadDimension, ParseError, TopDimension


class Cochain:
    """An F2-valued function on ``X^(k)``, stored packed (8 cells per byte,
    most significant bit first).  Immutable; ``+`` and ``-`` are XOR."""

    def __init__(self, X: WeightedComplex, k: int, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (X.num_cells(k),):
            raise BadArgs(
                f"cochain of degree {k} needs {X.num_cells(k)} values, got {bits.shape}"
            )
        if bits.size and bits.max() > 1:
            raise BadArgs("cochain values must be 0 or 1")
        self.X = X
        self.k = k
        self._packed = np.packbits(bits).tobytes()

    @classmethod
    def zero(cls, X: WeightedComplex, k: int) -> "Cochain":
        return cls(X, k, np.zeros(X.num_cells(k), np.uint8))

    @classmethod
    def indicator(cls, X: WeightedComplex, k: int, simplices) -> "Cochain":
        bits = np.zeros(X.num_cells(k), np.uint8)
        for s in simplices:
            bits[X.index(tuple(s))] ^= 1
        return cls(X, k, bits)

    @classmethod
    def from_hex(cls, X: WeightedComplex, k: int, text: str) -> "Cochain":
        N = X.num_cells(k)
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise ParseError(f"bad cochain hex: {exc}") from exc
        if len(raw) != (N + 7) // 8:
            raise ParseError(f"cochain hex has {len(raw)} bytes, expected {(N + 7) // 8}")
        bits = np.unpackbits(np.frombuffer(raw, np.uint8))
        if bits[N:].any():
            raise ParseError("cochain hex sets padding bits")
        return cls(X, k, bits[:N])

    @cached_property
    def bits(self) -> np.ndarray:
        out = np.unpackbits(np.frombuffer(self._packed, np.uint8))[: self.X.num_cells(self.k)]
        out.flags.writeable = False
        return out

    def to_hex(self) -> str:
        return self._packed.hex()

    @property
    def host_digest(self) -> str:
        return self.X.digest

    @property
    def digest(self) -> str:
        return hashlib.sha256(f"{self.X.digest}:{self.k}:{self.to_hex()}".encode()).hexdigest()

    @property
    def support(self) -> list[Simplex]:
        cells = self.X.cells(self.k)
        return [cells[i] for i in np.flatnonzero(self.bits)]

    def _same_space(self, other: "Cochain") -> None:
        if self.k != other.k or self.X.digest != other.X.digest:
            raise BadArgs("cochains live on different spaces")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same_space(other)
        return Cochain(self.X, self.k, self.bits ^ other.bits)

    __sub__ = __add__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.k == other.k and self.X.digest == other.X.digest and self._packed == other._packed

    def __hash__(self) -> int:
        return hash((self.X.digest, self.k, self._packed))

    def __bool__(self) -> bool:
        return any(self._packed)

    def __repr__(self) -> str:
        return f"Cochain(k={self.k}, support={[list(s) for s in self.support]})"


def differential(phi: Cochain) -> Cochain:
    """``d phi(sigma)`` is the parity of the facets of sigma in supp(phi)."""
    X, k = phi.X, phi.k
    if k >= X.n:
        raise TopDimension(f"no coboundary out of the top degree {X.n}")
    return Cochain(X, k + 1, coboundary_bits(X, k, phi.bits))


def coboundary_bits(X: WeightedComplex, k: int, bits: np.ndarray) -> np.ndarray:
    return (bits[X.facets[k + 1]].sum(axis=1) & 1).astype(np.uint8)


def norm(phi: Cochain) -> Fraction:
    return Fraction(norm_int(phi.X, phi.k, phi.bits), phi.X.denom)


def norm_int(X: WeightedComplex, k: int, bits: np.ndarray) -> int:
    """Norm scaled by ``X.denom``."""
    return int(bits.astype(np.int64) @ X.int_weights(k))


def localize(phi: Cochain, tau) -> Cochain:
    """``phi_tau(sigma) = phi(tau | sigma)`` as a cochain on the link of tau."""
    tau = tuple(tau)
    j = len(tau) - 1
    if phi.k - j - 1 < 0:
        raise BadDimension(f"cannot localize a {phi.k}-cochain at a {j}-simplex")
    lk = link(phi.X, tau)
    return Cochain(lk, phi.k - j - 1, phi.bits[phi.X.star_embedding(tau, phi.k)])


def containment(X: WeightedComplex, j: int, k: int) -> sp.csr_matrix:
    """0/1 matrix with rows ``X^(j)`` and columns ``X^(k)``, entry 1 iff the
    row cell is a face of the column cell."""
    key = ("contain", j, k)
    hit = X._cache.get(key)
    if hit is None:
        if j > k:
            raise BadDimension(f"containment needs j <= k, got {j} > {k}")
        if j == k:
            hit = sp.identity(X.num_cells(k), dtype=np.int64, format="csr")
        else:
            ptr, idx = X.cofacets[k - 1]
            up = sp.csr_matrix(
                (np.ones(idx.size, np.int64), idx, ptr), shape=(X.num_cells(k - 1), X.num_cells(k))
            )
            hit = containment(X, j, k - 1) @ up
            hit.data[:] = 1
            hit = hit.tocsr()
        X._cache[key] = hit
    return hit


def local_norms_int(phi: Cochain, j: int) -> np.ndarray:
    """``denom * ||phi_tau||`` for every tau in ``X^(j)``, without building links."""
    X = phi.X
    w = phi.bits.astype(np.int64) * X.int_weights(phi.k)
    return containment(X, j, phi.k) @ w


def local_differential_norms_int(phi: Cochain, j: int) -> np.ndarray:
    """``denom * ||d_tau phi_tau||`` for every tau in ``X^(j)``.

    For eta in ``X^(k+1)`` containing tau, ``d_tau phi_tau(eta - tau)`` is the
    parity of phi over the facets of eta that still contain tau, which is
    ``d phi(eta)`` plus phi on the facets ``eta - u`` for u in tau.
    """
    X, k = phi.X, phi.k
    if k >= X.n:
        raise TopDimension("no coboundary out of the top degree")
    rows, cols, omit = _pair_facets(X, j, k + 1)
    out = np.zeros(X.num_cells(j), np.int64)
    if rows.size == 0:
        return out
    bits = phi.bits
    dphi = coboundary_bits(X, k, bits)
    par = dphi[cols] ^ np.bitwise_xor.reduce(bits[omit], axis=1)
    np.add.at(out, rows[par == 1], X.int_weights(k + 1)[cols[par == 1]])
    return out


def _pair_facets(X: WeightedComplex, j: int, k: int):
    """Containment pairs ``(tau, eta)`` of ``X^(j)`` in ``X^(k)`` with, per
    pair, the facet indices ``eta - u`` for each vertex u of tau."""
    key = ("pair_facets", j, k)
    hit = X._cache.get(key)
    if hit is None:
        C = containment(X, j, k).tocoo()
        cells_j, cells_k = X.cells(j), X.cells(k)
        facets = X.facets[k]
        omit = np.zeros((C.nnz, j + 1), np.int64)
        for i, (t, e) in enumerate(zip(C.row, C.col)):
            eta = cells_k[e]
            omit[i] = [facets[e][eta.index(u)] for u in cells_j[t]]
        hit = (C.row.astype(np.int64), C.col.astype(np.int64), omit)
        X._cache[key] = hit
    return hit


def random_cochain(X: WeightedComplex, k: int, rng: np.random.Generator, density=None) -> Cochain:
    N = X.num_cells(k)
    p = rng.random() if density is None else density
    return Cochain(X, k, (rng.random(N) < p).astype(np.uint8))


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """A subspace of ``C^k`` in reduced row echelon form.

    ``rows`` is a ``(dim, |X^k|)`` 0/1 matrix whose leading ones sit at
    ``pivots``; every other row is zero at each pivot column.
    """

    X: WeightedComplex
    k: int
    kind: str
    rows: np.ndarray
    pivots: tuple

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    @property
    def vectors(self) -> list[Cochain]:
        return [Cochain(self.X, self.k, r) for r in self.rows]

    @cached_property
    def free_columns(self) -> np.ndarray:
        mask = np.ones(self.X.num_cells(self.k), bool)
        mask[list(self.pivots)] = False
        return np.flatnonzero(mask)

    def reduce_bits(self, bits: np.ndarray) -> np.ndarray:
        """Lexicographically least element of ``bits + span``."""
        out = np.array(bits, dtype=np.uint8)
        for r, p in enumerate(self.pivots):
            if out[p]:
                out ^= self.rows[r]
        return out

    def reduce(self, phi: Cochain) -> Cochain:
        return Cochain(self.X, self.k, self.reduce_bits(phi.bits))

    def contains(self, phi: Cochain) -> bool:
        return not self.reduce_bits(phi.bits).any()

    @cached_property
    def key_columns(self) -> np.ndarray:
        """Linear coset labels: the key of a cochain is the XOR of the entries
        at its support.  Two cochains share a key iff they differ by an element
        of the subspace."""
        N = self.X.num_cells(self.k)
        free = self.free_columns
        if free.size > 62:
            raise BadArgs(f"{free.size} free columns do not fit a 62-bit coset key")
        pos = np.full(N, -1, np.int64)
        pos[free] = np.arange(free.size)
        cols = np.zeros(N, np.int64)
        cols[free] = np.int64(1) << pos[free]
        for r, p in enumerate(self.pivots):
            on = free[self.rows[r, free] == 1]
            cols[p] = np.bitwise_or.reduce(np.int64(1) << pos[on]) if on.size else 0
        return cols

    def key(self, bits: np.ndarray) -> int:
        cols = self.key_columns
        return int(np.bitwise_xor.reduce(cols[np.flatnonzero(bits)])) if np.any(bits) else 0

    def generators_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _kernels.csr_from_dense(self.rows)


def rref(mat: np.ndarray) -> tuple[np.ndarray, tuple]:
    """Reduced row echelon form over GF(2) of a 0/1 matrix; zero rows dropped."""
    mat = np.atleast_2d(np.asarray(mat, np.uint8))
    m, N = mat.shape
    if m == 0 or N == 0:
        return np.zeros((0, N), np.uint8), ()
    packed, piv = _kernels.active.rref(_kernels.pack_rows(mat), N)
    return _kernels.unpack_rows(packed, N), tuple(int(p) for p in piv)


def coboundary_matrix(X: WeightedComplex, k: int) -> np.ndarray:
    """Dense 0/1 matrix of ``d_k``: rows ``X^(k+1)``, columns ``X^(k)``."""
    D = np.zeros((X.num_cells(k + 1), X.num_cells(k)), np.uint8)
    f = X.facets[k + 1]
    rows = np.repeat(np.arange(f.shape[0]), f.shape[1])
    D[rows, f.ravel()] = 1
    return D


def subspace_basis(X: WeightedComplex, k: int, kind: str) -> SubspaceBasis:
    """Basis of ``B^k = im d_(k-1)`` (``kind="B"``) or ``Z^k = ker d_k``
    (``kind="Z"``).  ``B^-1`` is zero and ``Z^n`` is all of ``C^n``."""
    kind = kind.upper().rstrip("K")
    if kind not in ("B", "Z"):
        raise BadArgs(f"unknown subspace kind {kind!r}")
    if not -1 <= k <= X.n:
        raise BadDimension(f"degree {k} outside [-1, {X.n}]")
    key = ("basis", k, kind)
    hit = X._cache.get(key)
    if hit is not None:
        return hit
    N = X.num_cells(k)
    if kind == "B":
        if k == -1:
            rows, piv = np.zeros((0, N), np.uint8), ()
        else:
            rows, piv = rref(coboundary_matrix(X, k - 1).T)
    elif k == X.n:
        rows, piv = np.eye(N, dtype=np.uint8), tuple(range(N))
    else:
        R, dpiv = rref(coboundary_matrix(X, k))
        free = [c for c in range(N) if c not in set(dpiv)]
        null = np.zeros((len(free), N), np.uint8)
        for i, f in enumerate(free):
            null[i, f] = 1
            for r, p in enumerate(dpiv):
                null[i, p] = R[r, f]
        rows, piv = rref(null) if free else (null, ())
    basis = SubspaceBasis(X, k, kind, rows, piv)
    X._cache[key] = basis
    return basis


def cohomology_dim(X: WeightedComplex, k: int) -> int:
    if not 0 <= k <= X.n:
        raise BadDimension(f"degree {k} outside [0, {X.n}]")
    return subspace_basis(X, k, "Z").dim - subspace_basis(X, k, "B").dim


def binomial_identity_holds(phi: Cochain, j: int) -> bool:
    """``C(k+1, j+1) ||phi|| == sum over tau in X^(j) of ||phi_tau||``."""
    lhs = comb(phi.k + 1, j + 1) * norm_int(phi.X, phi.k, phi.bits)
    return lhs == int(local_norms_int(phi, j).sum())


def solve_preimage(X: WeightedComplex, k: int, beta: np.ndarray) -> np.ndarray | None:
    """Lexicographically least ``psi`` in ``C^k`` with ``d psi = beta``, or
    None when beta is not a coboundary."""
    D = coboundary_matrix(X, k)
    N = D.shape[1]
    aug = np.concatenate([D, np.asarray(beta, np.uint8)[:, None]], axis=1)
    packed, piv = _kernels.active.rref(_kernels.pack_rows(aug), N)
    R = _kernels.unpack_rows(packed, N + 1)
    psi = np.zeros(N, np.uint8)
    for r, p in enumerate(piv):
        psi[p] = R[r, N]
    if not np.array_equal(coboundary_bits(X, k, psi), beta):
        return None
    return subspace_basis(X, k, "Z").reduce_bits(psi)
