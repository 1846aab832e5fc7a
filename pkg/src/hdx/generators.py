"""Deterministic and seeded constructions of weighted complexes."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction
import json

import numpy as np

from hdx import config
from hdx.complex_core import WeightedComplex, WeightKind, build_complex, complex_from_json, skeleton
from hdx.errors import BadArgs, EmptyTopLevel, UnsupportedQ


def full_simplex(v: int, weight_kind: WeightKind = WeightKind.HOMOGENEOUS) -> WeightedComplex:
    """All subsets of ``{0, ..., v-1}``; dimension ``v - 1``."""
    if v < 1:
        raise BadArgs("a simplex needs at least one vertex")
    return build_complex([tuple(range(v))], weight_kind)


def hollow_simplex(v: int, weight_kind: WeightKind = WeightKind.HOMOGENEOUS) -> WeightedComplex:
    """Boundary of the ``(v-1)``-simplex; dimension ``v - 2``."""
    if v < 2:
        raise BadArgs("a hollow simplex needs at least two vertices")
    return build_complex(list(itertools.combinations(range(v), v - 1)), weight_kind)


def simplex_skeleton(v: int, l: int, weight_kind: WeightKind = WeightKind.HOMOGENEOUS) -> WeightedComplex:
    if not 0 <= l < v:
        raise BadArgs(f"need 0 <= l < v, got l={l}, v={v}")
    return build_complex(list(itertools.combinations(range(v), l + 1)), weight_kind)


def _projective_points(q: int) -> list[tuple]:
    # first nonzero coordinate normalized to 1
    pts = []
    for c in itertools.product(range(q), repeat=3):
        nz = [x for x in c if x]
        if nz and nz[0] == 1:
            pts.append(c)
    return sorted(pts)


def projective_plane_flag(q: int) -> WeightedComplex:
    """Point-line incidence graph of PG(2, q) as a 1-complex.

    Points get ids ``0..P-1`` and lines ``P..2P-1``, each in lexicographic
    order of normalized homogeneous coordinates.
    """
    if q not in (2, 3):
        raise UnsupportedQ(f"only q in {{2, 3}} is supported, got {q}")
    pts = _projective_points(q)
    P = len(pts)
    flags = [
        (i, P + j)
        for i, p in enumerate(pts)
        for j, line in enumerate(pts)
        if sum(a * b for a, b in zip(p, line)) % q == 0
    ]
    return build_complex(flags, WeightKind.HOMOGENEOUS)


def linial_meshulam(n: int, v: int, p, seed: int, weight_kind: WeightKind = WeightKind.HOMOGENEOUS) -> WeightedComplex:
    """Each n-subset of ``v`` vertices kept independently with probability p.

    Only the kept n-cells and their faces survive, so the result is pure.
    Candidates are visited in lexicographic order, one uniform draw each.
    """
    p = Fraction(p)
    if not 1 <= n < v:
        raise BadArgs(f"need v > n >= 1, got n={n}, v={v}")
    if not 0 < p <= 1:
        raise BadArgs(f"need 0 < p <= 1, got {p}")
    rng = np.random.default_rng(seed)
    cands = list(itertools.combinations(range(v), n + 1))
    draws = rng.random(len(cands))
    tops = [c for c, u in zip(cands, draws) if u < float(p)]
    if not tops:
        raise EmptyTopLevel(f"no {n}-cells survived (v={v}, p={p}, seed={seed})")
    return build_complex(tops, weight_kind)


def join(X: WeightedComplex, Y: WeightedComplex) -> WeightedComplex:
    """Simplicial join with Y's vertices shifted past X's; unit top weights."""
    shift = max(v for (v,) in X.cells(0)) + 1 - min(v for (v,) in Y.cells(0))
    tops = [s + tuple(v + shift for v in t) for s in X.top_simplices for t in Y.top_simplices]
    return build_complex(tops, WeightKind.HOMOGENEOUS)


def points(v: int) -> WeightedComplex:
    return build_complex([(i,) for i in range(v)], WeightKind.HOMOGENEOUS)


def cycle(v: int) -> WeightedComplex:
    return build_complex([tuple(sorted((i, (i + 1) % v))) for i in range(v)], WeightKind.HOMOGENEOUS)


def random_weights(X: WeightedComplex, seed: int, max_den: int = 5) -> WeightedComplex:
    """Same cells as X with seeded random rational top weights."""
    rng = np.random.default_rng(seed)
    ws = [Fraction(int(a), int(b)) for a, b in zip(
        rng.integers(1, 2 * max_den, len(X.top_simplices)),
        rng.integers(1, max_den + 1, len(X.top_simplices)),
    )]
    return build_complex(X.top_simplices, custom_weights=ws)


KINDS = ("full-simplex", "hollow-simplex", "skeleton", "join", "linial-meshulam", "pg-flag", "file")


@dataclass
class GeneratorSpec:
    """What to build.  ``params`` keys by kind:

    full-simplex / hollow-simplex: ``v``; skeleton: ``v, l``;
    linial-meshulam: ``n, v, p, seed``; pg-flag: ``q``;
    join: ``left, right`` (nested specs); file: ``path``.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def generate(spec: GeneratorSpec) -> WeightedComplex:
    k, a = spec.kind, spec.params
    if k == "full-simplex":
        return full_simplex(int(a["v"]))
    if k == "hollow-simplex":
        return hollow_simplex(int(a["v"]))
    if k == "skeleton":
        return simplex_skeleton(int(a["v"]), int(a["l"]))
    if k == "linial-meshulam":
        return linial_meshulam(int(a["n"]), int(a["v"]), Fraction(a["p"]), int(a.get("seed", config.SEED)))
    if k == "pg-flag":
        return projective_plane_flag(int(a["q"]))
    if k == "join":
        return join(generate(GeneratorSpec(**a["left"])), generate(GeneratorSpec(**a["right"])))
    if k == "file":
        with open(a["path"]) as fh:
            return complex_from_json(json.load(fh))
    raise BadArgs(f"unknown generator kind {k!r}; expected one of {', '.join(KINDS)}")


def two_triangles() -> WeightedComplex:
    return build_complex([(0, 1, 2), (1, 2, 3)], WeightKind.HOMOGENEOUS)


def glued_tetrahedra() -> WeightedComplex:
    return build_complex([(0, 1, 2, 3), (0, 1, 2, 4)], WeightKind.HOMOGENEOUS)


def corpus() -> list[tuple[str, WeightedComplex]]:
    """Fixed list of named complexes of dimension 1 to 4, each with at most
    200 top cells."""
    out = []
    for v in range(2, 6):
        out.append((f"simplex-{v}", full_simplex(v)))
    for v in range(3, 7):
        out.append((f"hollow-{v}", hollow_simplex(v)))
    for l in range(1, 5):
        out.append((f"skeleton-6-{l}", simplex_skeleton(6, l)))
    out.append(("pg-flag-2", projective_plane_flag(2)))
    out.append(("pg-flag-3", projective_plane_flag(3)))
    out.append(("two-triangles", two_triangles()))
    out.append(("glued-tetrahedra", glued_tetrahedra()))
    for v in (5, 6, 7):
        out.append((f"cycle-{v}", cycle(v)))
    out.append(("cone-cycle-5", join(cycle(5), points(1))))
    out.append(("suspension-cycle-4", join(cycle(4), points(2))))
    out.append(("k33", join(points(3), points(3))))
    out.append(("octahedron", join(join(points(2), points(2)), points(2))))
    out.append(("hollow3-join-hollow3", join(hollow_simplex(3), hollow_simplex(3))))
    out.append(("triangle-join-edge", join(full_simplex(3), full_simplex(2))))
    seed = 0
    for n, v, p in [
        (1, 6, "1/2"), (1, 7, "1/2"), (1, 8, "1/3"), (1, 9, "1/4"),
        (2, 5, "1/2"), (2, 6, "1/2"), (2, 6, "3/4"), (2, 7, "1/3"), (2, 7, "1/2"), (2, 8, "1/4"),
        (2, 8, "1/2"), (2, 9, "1/5"),
        (3, 6, "1/2"), (3, 6, "3/4"), (3, 7, "1/3"), (3, 7, "1/2"), (3, 8, "1/4"),
        (4, 7, "1/2"), (4, 7, "3/4"), (4, 8, "1/4"),
    ]:
        seed += 1
        out.append((f"lm-{n}-{v}-{p}-s{seed}", linial_meshulam(n, v, Fraction(p), seed)))
    for i, name in enumerate(["simplex-4", "two-triangles", "hollow-5", "lm-2-6-1/2-s6"]):
        base = dict(out)[name]
        out.append((f"{name}-random-weights", random_weights(base, 100 + i)))
    out.append(("simplex-4-normalized", full_simplex(4, WeightKind.NORMALIZED_HOMOGENEOUS)))
    out.append(("pg-flag-2-normalized", skeleton(projective_plane_flag(2), 1, WeightKind.NORMALIZED_HOMOGENEOUS)))
    return out
