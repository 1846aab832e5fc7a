"""Finite pure weighted simplicial complexes.

A complex is given by its top simplices and a positive rational weight on
each of them.  Every lower simplex then gets the weight

    m(tau) = (n - k)! * sum of m(eta) over top simplices eta containing tau,

which is the unique extension satisfying the summation law
``m(tau) = sum of m(sigma) over cofacets sigma``.  The empty simplex is a real
cell of dimension -1, so cochains and differentials exist uniformly from
degree -1 up to n.

Simplices are tuples of strictly increasing non-negative ints.  Within each
dimension cells are sorted lexicographically, which fixes cochain indexing.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from hdx import _kernels
from hdx.errors import (
    BadArgs,
    BadDimension,
    DuplicateTopSimplex,
    InvalidSimplex,
    MixedDimension,
    NonPositiveWeight,
    ParseError,
    SimplexNotInComplex,
    ValidationError,
)

Simplex = tuple

EMPTY: Simplex = ()
_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


class WeightKind(enum.Enum):
    HOMOGENEOUS = "homogeneous"
    NORMALIZED_HOMOGENEOUS = "normalized-homogeneous"
    CUSTOM = "custom"


def simplex(vertices: Iterable[int]) -> Simplex:
    """Canonical form of a vertex set; rejects repeats and negative ids."""
    vs = list(vertices)
    for v in vs:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
            raise InvalidSimplex(f"vertex ids must be non-negative ints, got {v!r}")
    s = tuple(sorted(int(v) for v in vs))
    if len(set(s)) != len(s):
        raise InvalidSimplex(f"repeated vertex in {list(vs)}")
    return s


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, (int, np.integer)) and not isinstance(text, bool):
        return Fraction(int(text))
    if isinstance(text, str) and _RATIONAL.match(text):
        try:
            return Fraction(text.replace(" ", ""))
        except ZeroDivisionError as exc:
            raise ParseError(f"zero denominator in {text!r}") from exc
    raise ParseError(f"expected a rational 'p/q', got {text!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class WeightedComplex:
    """Immutable pure weighted complex with all faces materialized.

    Attributes that callers use directly:

    ``n``            dimension
    ``denom``        common denominator of the top weights
    ``facets[k]``    int array ``(|X^k|, k+1)``; row i lists the indices in
                     ``X^(k-1)`` of the facets of cell i (facet j omits vertex j)
    ``cofacets[k]``  CSR pair ``(ptr, idx)`` into ``X^(k+1)``, for k < n
    """

    def __init__(self, n: int, cells: dict, weights: dict, kind: WeightKind):
        self.n = n
        self.kind = kind
        self._cells = cells
        self._index = {k: {s: i for i, s in enumerate(cs)} for k, cs in cells.items()}
        self._w = weights
        self.denom = math.lcm(*(w.denominator for w in weights[n]))
        self._wi = {
            k: np.array([int(w * self.denom) for w in ws], dtype=np.int64)
            for k, ws in weights.items()
        }
        self.facets = {-1: np.zeros((1, 0), np.int64)}
        for k in range(0, n + 1):
            idx = self._index[k - 1]
            self.facets[k] = np.array(
                [[idx[s[:j] + s[j + 1 :]] for j in range(k + 1)] for s in cells[k]],
                dtype=np.int64,
            ).reshape(len(cells[k]), k + 1)
        self.cofacets = {}
        for k in range(-1, n):
            rows = [[] for _ in cells[k]]
            for i, fs in enumerate(self.facets[k + 1]):
                for f in fs:
                    rows[f].append(i)
            self.cofacets[k] = _kernels.csr(rows)
        payload = json.dumps(
            {"tops": [list(s) for s in cells[n]], "w": [format_rational(w) for w in weights[n]]},
            separators=(",", ":"),
        )
        self.digest = hashlib.sha256(payload.encode()).hexdigest()
        self._cache: dict = {}

    # --- access -----------------------------------------------------------

    def cells(self, k: int) -> list:
        self._check_dim(k)
        return self._cells[k]

    def num_cells(self, k: int) -> int:
        return len(self.cells(k))

    def index(self, s: Sequence[int]) -> int:
        s = tuple(s)
        try:
            return self._index[len(s) - 1][s]
        except KeyError:
            raise SimplexNotInComplex(s) from None

    def __contains__(self, s) -> bool:
        s = tuple(s)
        return s in self._index.get(len(s) - 1, {})

    def weight(self, s: Sequence[int]) -> Fraction:
        s = tuple(s)
        return self._w[len(s) - 1][self.index(s)]

    def weights(self, k: int) -> list:
        self._check_dim(k)
        return self._w[k]

    def int_weights(self, k: int) -> np.ndarray:
        """Weights of ``X^(k)`` scaled by ``denom`` (exact int64)."""
        self._check_dim(k)
        return self._wi[k]

    @property
    def top_simplices(self) -> list:
        return self._cells[self.n]

    @property
    def top_weights(self) -> list:
        return self._w[self.n]

    @property
    def vertices(self) -> list:
        return [s[0] for s in self._cells[0]]

    def _check_dim(self, k: int) -> None:
        if not -1 <= k <= self.n:
            raise BadDimension(f"dimension {k} outside [-1, {self.n}]")

    # --- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedComplex):
            return NotImplemented
        return (
            self.n == other.n
            and self.top_simplices == other.top_simplices
            and self.top_weights == other.top_weights
        )

    def __hash__(self) -> int:
        return hash(self.digest)

    def __repr__(self) -> str:
        sizes = ", ".join(str(len(self._cells[k])) for k in range(self.n + 1))
        return f"WeightedComplex(n={self.n}, f=({sizes}), kind={self.kind.value})"

    # --- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        out = {"top_simplices": [list(s) for s in self.top_simplices]}
        if self.kind is not WeightKind.HOMOGENEOUS:
            out["weights"] = [format_rational(w) for w in self.top_weights]
        return out

    # --- helpers used by the cochain layer ---------------------------------

    def star_embedding(self, tau: Simplex, k: int) -> np.ndarray:
        """Indices in ``X^(k)`` of ``tau | sigma`` for each cell sigma of the
        link of tau in dimension ``k - dim(tau) - 1``, in link order."""
        key = ("star", tau, k)
        hit = self._cache.get(key)
        if hit is None:
            lk = link(self, tau)
            kk = k - len(tau)
            idx = self._index[k]
            hit = np.array(
                [idx[tuple(sorted(tau + s))] for s in lk.cells(kk)], dtype=np.int64
            )
            self._cache[key] = hit
        return hit


def _derive(tops: list, top_w: list) -> tuple[int, dict, dict]:
    n = len(tops[0]) - 1
    faces = {k: set() for k in range(-1, n + 1)}
    for t in tops:
        for k in range(-1, n + 1):
            faces[k].update(itertools.combinations(t, k + 1))
    cells = {k: sorted(faces[k]) for k in faces}
    weights = {n: list(top_w)}
    # summation law, top down
    for k in range(n - 1, -2, -1):
        idx = {s: i for i, s in enumerate(cells[k])}
        acc = [Fraction(0)] * len(cells[k])
        for s, w in zip(cells[k + 1], weights[k + 1]):
            for j in range(k + 2):
                acc[idx[s[:j] + s[j + 1 :]]] += w
        weights[k] = acc
    return n, cells, weights


def build_complex(
    top_simplices: Iterable[Iterable[int]],
    weight_kind: WeightKind = WeightKind.HOMOGENEOUS,
    custom_weights: Sequence | None = None,
) -> WeightedComplex:
    """Build a complex from its top simplices.

    ``custom_weights`` (rationals, ints or ``"p/q"`` strings, parallel to the
    tops) implies ``WeightKind.CUSTOM``.
    """
    tops_in = [simplex(t) for t in top_simplices]
    if not tops_in:
        raise ValidationError("a complex needs at least one top simplex")
    sizes = {len(t) for t in tops_in}
    if len(sizes) != 1:
        raise MixedDimension(f"top simplices have sizes {sorted(sizes)}")
    if custom_weights is not None:
        weight_kind = WeightKind.CUSTOM
        if len(custom_weights) != len(tops_in):
            raise ValidationError("custom weights must be parallel to the top simplices")
        ws = [parse_rational(w) for w in custom_weights]
        for t, w in zip(tops_in, ws):
            if w <= 0:
                raise NonPositiveWeight(f"weight {w} on {list(t)} is not positive")
    elif weight_kind is WeightKind.CUSTOM:
        raise BadArgs("WeightKind.CUSTOM requires custom_weights")
    elif weight_kind is WeightKind.HOMOGENEOUS:
        ws = [Fraction(1)] * len(tops_in)
    else:
        ws = [Fraction(1, len(tops_in))] * len(tops_in)
    seen = set()
    for t in tops_in:
        if t in seen:
            raise DuplicateTopSimplex(f"top simplex {list(t)} listed twice")
        seen.add(t)
    order = sorted(range(len(tops_in)), key=lambda i: tops_in[i])
    tops = [tops_in[i] for i in order]
    top_w = [ws[i] for i in order]
    n, cells, weights = _derive(tops, top_w)
    return WeightedComplex(n, cells, weights, weight_kind)


def complex_from_json(data) -> WeightedComplex:
    """Parse the complex file format (a dict or JSON text)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "top_simplices" not in data:
        raise ParseError("expected an object with a 'top_simplices' list")
    tops = data["top_simplices"]
    if not isinstance(tops, list) or not all(isinstance(t, list) for t in tops):
        raise ParseError("'top_simplices' must be a list of vertex lists")
    weights = data.get("weights")
    if weights is not None:
        if not isinstance(weights, list):
            raise ParseError("'weights' must be a list of 'p/q' strings")
        weights = [parse_rational(w) for w in weights]
    return build_complex(tops, custom_weights=weights)


def link(X: WeightedComplex, tau: Sequence[int]) -> WeightedComplex:
    """The link of ``tau`` with induced weights ``m_tau(sigma) = m(tau | sigma)``.

    Vertex ids are kept.  Results are cached on ``X``.
    """
    tau = tuple(tau)
    if tau not in X:
        raise SimplexNotInComplex(tau)
    if len(tau) - 1 > X.n - 1:
        raise BadDimension(f"the link of a top simplex {list(tau)} has no vertices")
    if not tau:
        return X
    key = ("link", tau)
    hit = X._cache.get(key)
    if hit is not None:
        return hit
    ts = set(tau)
    tops, ws = [], []
    for eta, w in zip(X.top_simplices, X.top_weights):
        if ts.issubset(eta):
            tops.append(tuple(v for v in eta if v not in ts))
            ws.append(w)
    lk = build_complex(tops, custom_weights=ws)
    X._cache[key] = lk
    return lk


def skeleton(X: WeightedComplex, l: int, weight_kind: WeightKind) -> WeightedComplex:
    """The l-skeleton, weighted over its own top cells.

    ``CUSTOM`` keeps the weights ``X`` assigns to l-cells.
    """
    if not 0 <= l <= X.n:
        raise BadDimension(f"skeleton level {l} outside [0, {X.n}]")
    tops = X.cells(l)
    if weight_kind is WeightKind.CUSTOM:
        return build_complex(tops, custom_weights=X.weights(l))
    return build_complex(tops, weight_kind)


def total_weight(X: WeightedComplex, k: int) -> Fraction:
    return sum(X.weights(k), Fraction(0))


def weight_law_violations(X: WeightedComplex) -> list[tuple[Simplex, Fraction, Fraction]]:
    """Cells whose weight differs from the sum over their cofacets.

    Returns ``(simplex, stored, expected)`` triples; empty for a valid complex.
    """
    bad = []
    for k in range(-1, X.n):
        ptr, idx = X.cofacets[k]
        ws = X.weights(k + 1)
        for i, s in enumerate(X.cells(k)):
            expected = sum((ws[j] for j in idx[ptr[i] : ptr[i + 1]]), Fraction(0))
            if X.weights(k)[i] != expected:
                bad.append((s, X.weights(k)[i], expected))
    for k in range(-1, X.n + 1):
        for s, w in zip(X.cells(k), X.weights(k)):
            if w <= 0:
                bad.append((s, w, Fraction(0)))
    return bad


def corrupt_weight(X: WeightedComplex, s: Sequence[int], value) -> WeightedComplex:
    """Copy of ``X`` with one stored weight overwritten, bypassing derivation.

    Exists for fault injection: the result violates the summation law.
    """
    s = tuple(s)
    i = X.index(s)
    weights = {k: list(ws) for k, ws in X._w.items()}
    weights[len(s) - 1][i] = parse_rational(value)
    cells = {k: list(cs) for k, cs in X._cells.items()}
    return WeightedComplex(X.n, cells, weights, X.kind)


def relabel(X: WeightedComplex, mapping) -> WeightedComplex:
    """Rename vertices through ``mapping`` (dict or sequence), keeping weights."""
    tops = [[mapping[v] for v in t] for t in X.top_simplices]
    if X.kind is WeightKind.CUSTOM:
        return build_complex(tops, custom_weights=X.top_weights)
    return build_complex(tops, X.kind)
