"""Hypothesis certificates for topological overlap of skeletons.

Everything here runs on normalized homogeneous weights.  A certificate lists
each hypothesis of the overlap criterion with the measured value, the bound it
was compared against, and a pass flag.  It never claims a numeric overlap
constant; the strongest verdict is ``hypotheses-satisfied``.
"""

from __future__ import annotations

import json
import math
from itertools import combinations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from hdx import __version__, config
from hdx.complex_core import WeightedComplex, WeightKind, format_rational, link, skeleton, total_weight
from hdx.errors import BadArgs, BadDimension
from hdx.expansion import INF, coboundary_expansion, cofilling, fmt_value, systole
from hdx.isoperimetry import ledger_k1, ledger_k2
from hdx.spectral import local_spectral_expansion

CERT_SCHEMA = "hdx-cert/1"


def mu_nu_from_isoperimetry(n: int, eps, C) -> tuple[Fraction, Fraction]:
    """``mu = max(1/eps, 1/C_0, 2/C_1, ..., n/C_(n-1))`` and ``nu = min C``."""
    eps = Fraction(eps)
    C = [Fraction(c) for c in C]
    if n < 1 or len(C) != n:
        raise BadArgs(f"need n >= 1 constants C_0..C_(n-1), got n={n} and {len(C)}")
    if eps <= 0 or any(c <= 0 for c in C):
        raise BadArgs("eps and every C_k must be positive")
    mu = max([1 / eps] + [(k + 1) / c for k, c in enumerate(C)])
    return mu, min(C)


def normalized(X: WeightedComplex) -> WeightedComplex:
    return skeleton(X, X.n, WeightKind.NORMALIZED_HOMOGENEOUS)


@dataclass(frozen=True)
class KKLRow:
    k: int
    mu_k: object
    mu_ok: bool | None
    systole: object
    systole_bound: Fraction
    systole_ok: bool

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mu_k": None if self.mu_k is None else fmt_value(self.mu_k),
            "mu_ok": self.mu_ok,
            "systole": fmt_value(self.systole),
            "systole_bound": format_rational(self.systole_bound),
            "systole_ok": self.systole_ok,
            "systole_vacuous": self.systole == INF,
        }


def kkl_hypothesis_check(
    X: WeightedComplex,
    mu,
    nu,
    ks=None,
    cap: int = config.ENUMERATION_CAP,
    threads: int = 1,
) -> list[KKLRow]:
    """Per k: ``mu_k <= mu`` and ``systole_k >= nu * m(X^(k))``, with X
    re-weighted to normalized homogeneous weights.

    ``ks`` defaults to ``0..n-1``.  A k equal to n gets the systole check
    only, since ``mu_n`` is not defined.
    """
    mu, nu = Fraction(mu), Fraction(nu)
    Y = X if X.kind is WeightKind.NORMALIZED_HOMOGENEOUS else normalized(X)
    ks = list(range(Y.n)) if ks is None else list(ks)
    for k in ks:
        if not 0 <= k <= Y.n:
            raise BadDimension(f"k = {k} outside [0, {Y.n}]")

    def row(k: int) -> KKLRow:
        m = cofilling(Y, k, cap) if k < Y.n else None
        s = systole(Y, k, cap)
        bound = nu * total_weight(Y, k)
        return KKLRow(k, m, None if m is None else m <= mu, s, bound, s == INF or s >= bound)

    return _pmap(row, ks, threads)


def _pmap(fn, items, threads: int) -> list:
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


@dataclass(frozen=True)
class SkeletonComparison:
    """Cofacet-count spread at level l and the norm conversion factors.

    For every l-cell sigma, ``factor / M * mbar_hl(sigma) <= mbar_h(sigma)
    <= factor * M * mbar_hl(sigma)``; ``violations`` lists cells where that
    fails (always empty unless something is broken).
    """

    l: int
    M1: int
    M2: int
    M: Fraction
    factor: int
    lower: Fraction
    upper: Fraction
    equalities: int
    violations: tuple

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "M1": self.M1,
            "M2": self.M2,
            "M": format_rational(self.M),
            "factor": self.factor,
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "equalities": self.equalities,
            "violations": [list(s) for s in self.violations],
        }


def skeleton_compare(X: WeightedComplex, l: int) -> SkeletonComparison:
    if not 0 < l < X.n:
        raise BadDimension(f"need 0 < l < n = {X.n}, got {l}")
    n = X.n
    cells = X.cells(l)
    counts = {s: 0 for s in cells}
    for eta in X.top_simplices:
        for s in _faces(eta, l):
            counts[s] += 1
    M1, M2 = min(counts.values()), max(counts.values())
    M = Fraction(M2, M1)
    factor = math.factorial(n - l) * math.comb(n + 1, l + 1)
    ntop, nl = len(X.top_simplices), len(cells)
    lower, upper = factor / M, factor * M
    eq = 0
    bad = []
    for s in cells:
        mh = Fraction(math.factorial(n - l) * counts[s], ntop)
        mhl = Fraction(1, nl)
        lo, hi = lower * mhl, upper * mhl
        if not lo <= mh <= hi:
            bad.append(s)
        if lo == mh == hi:
            eq += 1
    return SkeletonComparison(l, M1, M2, M, factor, lower, upper, eq, tuple(bad))


def _faces(eta: tuple, l: int):
    return combinations(eta, l + 1)


def lambda_threshold(n: int, theta) -> object:
    """Least top-link gap that forces every ``lambda_k >= theta`` through the
    descent ``lambda_k >= 2 - 1/lambda_(k+1)``: ``g^(n-1)(theta)`` with
    ``g(y) = 1/(2 - y)``.  ``inf`` when an iterate reaches 2."""
    y = Fraction(theta)
    for _ in range(n - 1):
        if y >= 2:
            return INF
        y = 1 / (2 - y)
    return y


@dataclass
class OverlapCertificate:
    payload: dict

    @property
    def satisfied(self) -> bool:
        return self.payload["verdict"]["overall"] == "hypotheses-satisfied"

    def to_json(self) -> str:
        return json.dumps(self.payload, sort_keys=True, indent=2) + "\n"


def _link_floor(X: WeightedComplex, v, cap: int):
    val = coboundary_expansion(link(X, v), 1, "quotient", cap)
    return v, val


def certify_2skeleton(
    X: WeightedComplex,
    epsilon=None,
    l: int = 2,
    max_M=None,
    threads: int = 1,
    cap: int = config.ENUMERATION_CAP,
) -> OverlapCertificate:
    """Check the hypotheses under which the l-skeleton (l = 2) has topological
    overlap: ``lambda >= Lambda_2``, ``eps_1(X_v) >= epsilon`` for every
    vertex, and the cofacet-count ratio ``M`` (bounded by ``max_M`` when
    given).  Then evaluate the criterion's cofilling and systole conditions
    on the normalized l-skeleton against ``M^2 mu`` and
    ``nu (l+1)! / ((k+1)! M)``, with mu and nu built from the ledger
    constants.

    Without ``epsilon`` the floor is the measured minimum of the vertex link
    expansions, capped at 1.
    """
    if X.n <= 2:
        raise BadDimension(f"2-skeleton certificates need n > 2, got {X.n}")
    if l != 2:
        raise BadArgs("only l = 2 is supported")
    lam = local_spectral_expansion(X, threads)
    floors = _pmap(lambda v: _link_floor(X, v, cap), X.cells(0), threads)
    worst_v, worst = min(floors, key=lambda t: (t[1], t[0]))
    if epsilon is None:
        eps_floor = min(Fraction(1), worst) if worst != INF else Fraction(1)
        source = "measured"
    else:
        eps_floor = Fraction(epsilon)
        source = "override"
    links_ok = eps_floor > 0 and all(val >= eps_floor for _, val in floors)

    comp = skeleton_compare(X, l)
    skel_ok = not comp.violations and (max_M is None or comp.M <= Fraction(max_M))

    payload = {
        "schema": CERT_SCHEMA,
        "version": __version__,
        "complex": X.digest,
        "config": {
            "l": l,
            "epsilon": format_rational(eps_floor),
            "epsilon_source": source,
            "max_M": None if max_M is None else format_rational(Fraction(max_M)),
            "cap": cap,
        },
        "link_expansion": {
            "floor": format_rational(eps_floor),
            "min_epsilon1": fmt_value(worst),
            "argmin": list(worst_v),
            "per_vertex": {",".join(map(str, v)): fmt_value(val) for v, val in floors},
            "pass": links_ok,
        },
        "skeleton": dict(comp.to_dict(), **{"pass": skel_ok}),
    }

    spectral = {"lambda": format(lam, f".{config.FLOAT_DIGITS}g")}
    if 0 < eps_floor <= 1:
        k1, k2 = ledger_k1(), ledger_k2(eps_floor)
        theta = max(k1.theta, k2.theta)
        Lam = lambda_threshold(X.n, theta)
        spec_ok = Lam != INF and lam >= float(Lam) - config.TOLERANCE
        eps_small = min(k1["eps"], k2["eps"])
        C = [Fraction(1), k1.C, k2.C]
        mu, nu = mu_nu_from_isoperimetry(3, eps_small, C)
        payload["constants"] = {
            "ledger_k1": k1.to_dict(),
            "ledger_k2": k2.to_dict(),
            "theta": format_rational(theta),
            "eps": format_rational(eps_small),
            "C": [format_rational(c) for c in C],
            "mu": format_rational(mu),
            "nu": format_rational(nu),
        }
        spectral["Lambda2"] = fmt_value(Lam)
        Y = skeleton(X, l, WeightKind.NORMALIZED_HOMOGENEOUS)
        mu_l = comp.M ** 2 * mu
        rows = _pmap(
            lambda k: _kkl_row_skeleton(Y, k, mu_l, nu, comp.M, l, cap), range(l), threads
        )
        kkl_ok = all(r.mu_ok and r.systole_ok for r in rows)
        payload["kkl"] = {
            "mu_bound": format_rational(mu_l),
            "rows": [r.to_dict() for r in rows],
            "pass": kkl_ok,
        }
    else:
        spec_ok = kkl_ok = False
        spectral["Lambda2"] = None
        payload["constants"] = None
        payload["kkl"] = None
    spectral["pass"] = spec_ok
    payload["spectral"] = spectral
    verdict = {
        "spectral": spec_ok,
        "links": links_ok,
        "skeleton": skel_ok,
        "kkl": kkl_ok,
    }
    verdict["overall"] = "hypotheses-satisfied" if all(verdict.values()) else "hypotheses-not-satisfied"
    payload["verdict"] = verdict
    return OverlapCertificate(payload)


def _kkl_row_skeleton(Y, k, mu_bound, nu, M, l, cap) -> KKLRow:
    m = cofilling(Y, k, cap)
    s = systole(Y, k, cap)
    bound = nu * Fraction(math.factorial(l + 1), math.factorial(k + 1)) / M
    return KKLRow(k, m, m <= mu_bound, s, bound, s == INF or s >= bound)
