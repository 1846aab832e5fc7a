"""Weighted graph Laplacians, spectral gaps, Cheeger bounds and link spectra."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from hdx import config
from hdx.complex_core import WeightedComplex, link
from hdx.errors import (
    BadArgs,
    BadDimension,
    Disconnected,
    DisconnectedLink,
    EmptyOrFullSubset,
    ValidationError,
)


class WeightedGraph:
    """Graph with positive rational weights obeying ``m(v) = sum m(e), e ∋ v``."""

    def __init__(self, vertices, vertex_weights, edges, edge_weights):
        self.vertices = list(vertices)
        self.vertex_weights = [Fraction(w) for w in vertex_weights]
        self.edges = [tuple(e) for e in edges]
        self.edge_weights = [Fraction(w) for w in edge_weights]
        if not self.vertices:
            raise ValidationError("a weighted graph needs at least one vertex")
        self._pos = {v: i for i, v in enumerate(self.vertices)}
        acc = [Fraction(0)] * len(self.vertices)
        for (u, v), w in zip(self.edges, self.edge_weights):
            if w <= 0:
                raise ValidationError(f"edge {u, v} has non-positive weight")
            acc[self._pos[u]] += w
            acc[self._pos[v]] += w
        for v, a, w in zip(self.vertices, acc, self.vertex_weights):
            if a != w:
                raise ValidationError(f"vertex {v}: weight {w} but incident edges sum to {a}")
        self.denom = math.lcm(*(w.denominator for w in self.edge_weights)) if self.edges else 1
        n = len(self.vertices)
        self._adj = np.zeros((n, n), np.int64)
        for (u, v), w in zip(self.edges, self.edge_weights):
            i, j = self._pos[u], self._pos[v]
            self._adj[i, j] = self._adj[j, i] = int(w * self.denom)

    @classmethod
    def from_complex(cls, X: WeightedComplex) -> "WeightedGraph":
        """The 1-skeleton of ``X`` with the weights ``X`` assigns."""
        if X.n < 1:
            raise BadDimension("a complex of dimension 0 has no 1-skeleton")
        return cls(X.vertices, X.weights(0), X.cells(1), X.weights(1))

    @classmethod
    def unit(cls, vertices, edges) -> "WeightedGraph":
        deg = {v: 0 for v in vertices}
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        return cls(vertices, [deg[v] for v in vertices], edges, [1] * len(edges))

    @property
    def components(self) -> int:
        count, _ = connected_components(csr_matrix(self._adj != 0), directed=False)
        return int(count)

    def adjacency(self) -> np.ndarray:
        """Integer weighted adjacency, scaled by ``denom``."""
        return self._adj


def laplacian_spectrum(G: WeightedGraph) -> list[float]:
    """Ascending eigenvalues of ``I - D^-1/2 A D^-1/2`` (similar to the
    Laplacian ``phi(v) - (1/m(v)) sum m(uv) phi(u)``)."""
    A = G.adjacency().astype(float)
    d = A.sum(axis=1)
    inv = np.zeros_like(d)
    inv[d > 0] = 1.0 / np.sqrt(d[d > 0])
    L = np.eye(len(d)) - inv[:, None] * A * inv[None, :]
    return np.linalg.eigvalsh(L).tolist()


def spectral_gap(G: WeightedGraph) -> float:
    """Second smallest eigenvalue; connectivity is checked combinatorially."""
    if len(G.vertices) < 2:
        raise BadArgs("the spectral gap needs at least two vertices")
    c = G.components
    if c > 1:
        raise Disconnected(c)
    return laplacian_spectrum(G)[1]


@dataclass(frozen=True)
class CheegerRecord:
    cut: Fraction
    bound1_rhs: float
    selfcut: Fraction
    bound2_lhs: float
    ok1: bool
    ok2: bool


def cheeger_check(G: WeightedGraph, U, lam: float | None = None, tol: float = config.TOLERANCE) -> CheegerRecord:
    """Both Cheeger-type bounds for the vertex set ``U``:

    ``m(U, V-U) >= lam * m(U) m(V-U) / m(V)`` and
    ``m(U)/2 * (1 - lam * m(V-U)/m(V)) >= m(U, U)``.
    """
    U = set(U)
    if not U or U >= set(G.vertices) or not U <= set(G.vertices):
        raise EmptyOrFullSubset("U must be a nonempty proper subset of the vertices")
    if lam is None:
        lam = spectral_gap(G)
    mV = sum(G.vertex_weights, Fraction(0))
    mU = sum((w for v, w in zip(G.vertices, G.vertex_weights) if v in U), Fraction(0))
    cut = Fraction(0)
    selfcut = Fraction(0)
    for (u, v), w in zip(G.edges, G.edge_weights):
        inside = (u in U) + (v in U)
        if inside == 1:
            cut += w
        elif inside == 2:
            selfcut += w
    rest = mV - mU
    b1 = lam * float(mU) * float(rest) / float(mV)
    b2 = float(mU) / 2 * (1 - lam * float(rest) / float(mV))
    return CheegerRecord(cut, b1, selfcut, b2, float(cut) >= b1 - tol, b2 >= float(selfcut) - tol)


def cheeger_exhaustive(G: WeightedGraph, tol: float = config.TOLERANCE, max_vertices: int = 20) -> tuple[int, list]:
    """Check both bounds on every nonempty proper vertex subset.

    Returns ``(subsets checked, failing subsets)``.  Vectorized over bitmasks;
    cut sizes are exact integers before the final float comparison.
    """
    nv = len(G.vertices)
    if nv > max_vertices:
        raise BadArgs(f"{nv} vertices exceeds the exhaustive limit {max_vertices}")
    lam = spectral_gap(G)
    A = G.adjacency()
    deg = A.sum(axis=1)
    masks = np.arange(1, (1 << nv) - 1, dtype=np.int64)
    inU = ((masks[:, None] >> np.arange(nv)) & 1).astype(np.int64)
    mU = inU @ deg
    mV = int(deg.sum())
    vol_in = np.einsum("si,ij,sj->s", inU, A, inU)
    selfcut = vol_in // 2
    cut = mU - vol_in
    rest = mV - mU
    scale = G.denom
    b1 = lam * mU.astype(float) * rest / mV
    b2 = mU.astype(float) / 2 * (1 - lam * rest / mV)
    ok1 = cut / scale >= b1 / scale - tol
    ok2 = b2 / scale >= selfcut / scale - tol
    bad = [
        {G.vertices[i] for i in range(nv) if (m >> i) & 1}
        for m in masks[~(ok1 & ok2)].tolist()
    ]
    return int(masks.size), bad


@dataclass(frozen=True)
class SpectralProfile:
    """``lambdas[k]`` is the minimum gap over links of ``(k-1)``-simplices."""

    n: int
    lambdas: tuple
    argmin: tuple
    links_checked: tuple
    tolerance: float = config.TOLERANCE
    connected: bool = field(default=True)

    def to_dict(self) -> dict:
        return {
            "lambdas": [_fmt(x) for x in self.lambdas],
            "argmin": [list(s) for s in self.argmin],
            "links_checked": list(self.links_checked),
            "all_links_connected": self.connected,
            "tolerance": self.tolerance,
        }


def _fmt(x: float) -> str:
    return format(x, f".{config.FLOAT_DIGITS}g")


def link_gap(X: WeightedComplex, tau) -> float:
    lk = link(X, tau)
    G = WeightedGraph.from_complex(lk)
    c = G.components
    if c > 1:
        raise DisconnectedLink(tau, c)
    return spectral_gap(G)


def spectral_profile(X: WeightedComplex, threads: int = 1, tol: float = config.TOLERANCE) -> SpectralProfile:
    """``lambda_k = min over tau in X^(k-1) of lambda(X_tau)``, 0 <= k <= n-1."""
    lams, arg, counts = [], [], []
    for k in range(X.n):
        taus = X.cells(k - 1)
        if threads > 1 and len(taus) > 1:
            with ThreadPoolExecutor(threads) as pool:
                gaps = list(pool.map(lambda t: link_gap(X, t), taus))
        else:
            gaps = [link_gap(X, t) for t in taus]
        i = int(np.argmin(gaps))
        lams.append(gaps[i])
        arg.append(taus[i])
        counts.append(len(taus))
    return SpectralProfile(X.n, tuple(lams), tuple(arg), tuple(counts), tol)


def descent_check(profile: SpectralProfile, tol: float | None = None) -> list[bool]:
    """Per level k in 0..n-2: ``lambda_k >= 2 - 1/lambda_(k+1)``, and, when
    ``lambda_(n-1) > (n-1)/n``, also ``lambda_k > k/(k+1)``."""
    tol = profile.tolerance if tol is None else tol
    lam, n = profile.lambdas, profile.n
    lifted = n >= 1 and lam[n - 1] > (n - 1) / n
    flags = []
    for k in range(n - 1):
        ok = lam[k] >= 2 - 1 / lam[k + 1] - tol
        if lifted:
            ok = ok and lam[k] > k / (k + 1) - tol
        flags.append(ok)
    return flags


def local_spectral_expansion(X: WeightedComplex, threads: int = 1) -> float:
    """Minimum gap over the 1-dimensional links, after checking that every
    link of positive dimension is connected."""
    if X.n < 1:
        raise BadDimension("local spectral expansion needs dimension >= 1")
    return spectral_profile(X, threads).lambdas[X.n - 1]
