"""Corpus-wide identity checks behind the ``lemma-suite`` command.

Each check returns a ``CheckResult``; a failing one carries the first
counterexample it met.  All checks are deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hdx import config
from hdx.complex_core import WeightedComplex, corrupt_weight, format_rational, total_weight, weight_law_violations
from hdx.errors import Disconnected, DisconnectedLink
from hdx.expansion import INF, cocycle_expansion, cofilling
from hdx.f2_chains import (
    binomial_identity_holds,
    coboundary_bits,
    local_differential_norms_int,
    norm_int,
    random_cochain,
)
from hdx.generators import corpus
from hdx.isoperimetry import scan_isoperimetry
from hdx.overlap_cert import skeleton_compare
from hdx.spectral import WeightedGraph, cheeger_exhaustive, descent_check, spectral_profile


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    counterexample: dict | None = None
    skipped: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def fail(self, **payload) -> None:
        if self.counterexample is None:
            self.counterexample = payload

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "skipped": self.skipped,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.checked} checked)"


def _top_closed_form(X: WeightedComplex, tau) -> Fraction:
    ts = set(tau)
    return math.factorial(X.n - len(tau) + 1) * sum(
        (w for eta, w in zip(X.top_simplices, X.top_weights) if ts <= set(eta)), Fraction(0)
    )


def check_weight_law(named) -> CheckResult:
    res = CheckResult("weight-summation-law")
    for name, X in named:
        bad = weight_law_violations(X)
        res.checked += 1
        if bad:
            s, stored, expected = bad[0]
            res.fail(complex=name, simplex=list(s), stored=format_rational(stored),
                     expected=format_rational(expected))
    return res


def check_weight_closed_form(named) -> CheckResult:
    res = CheckResult("weight-closed-form")
    for name, X in named:
        for k in range(-1, X.n + 1):
            for tau, w in zip(X.cells(k), X.weights(k)):
                res.checked += 1
                want = _top_closed_form(X, tau)
                if w != want:
                    res.fail(complex=name, simplex=list(tau), stored=format_rational(w),
                             expected=format_rational(want))
    return res


def check_weight_totals(named) -> CheckResult:
    res = CheckResult("weight-level-totals")
    for name, X in named:
        tot = {k: total_weight(X, k) for k in range(-1, X.n + 1)}
        for k in range(-1, X.n + 1):
            for l in range(k, X.n + 1):
                res.checked += 1
                want = Fraction(math.factorial(l + 1), math.factorial(k + 1)) * tot[l]
                if tot[k] != want:
                    res.fail(complex=name, k=k, l=l, total=format_rational(tot[k]),
                             expected=format_rational(want))
    return res


def check_f2_identities(named, samples: int, seed: int) -> list[CheckResult]:
    """Norm identities on seeded random cochains, in exact integer units."""
    rng = np.random.default_rng(seed)
    contract = CheckResult("differential-contracts-norm")
    binom = CheckResult("localization-binomial-identity")
    vertex = CheckResult("vertex-differential-bound")
    faces = CheckResult("face-differential-bound")
    pool = [(name, X, k) for name, X in named for k in range(0, X.n + 1)]
    for i in range(samples):
        name, X, k = pool[i % len(pool)]
        phi = random_cochain(X, k, rng)
        n_phi = norm_int(X, k, phi.bits)
        ctx = dict(complex=name, k=k, cochain=phi.to_hex())
        for j in range(-1, k):
            binom.checked += 1
            if not binomial_identity_holds(phi, j):
                binom.fail(j=j, **ctx)
        if k >= X.n:
            continue
        n_d = norm_int(X, k + 1, coboundary_bits(X, k, phi.bits))
        contract.checked += 1
        if n_d > n_phi:
            contract.fail(**ctx)
        vertex.checked += 1
        if k * n_d + n_phi < int(local_differential_norms_int(phi, 0).sum()):
            vertex.fail(**ctx)
        if k >= 1:
            faces.checked += 1
            if n_d < int(local_differential_norms_int(phi, k - 1).sum()) - k * n_phi:
                faces.fail(**ctx)
    return [contract, binom, vertex, faces]


def check_cheeger(named, max_vertices: int = 12) -> CheckResult:
    res = CheckResult("cheeger-bounds")
    for name, X in named:
        if X.n < 1 or len(X.cells(0)) > max_vertices:
            continue
        G = WeightedGraph.from_complex(X)
        if G.components > 1:
            res.skipped.append(name)
            continue
        count, bad = cheeger_exhaustive(G)
        res.checked += count
        if bad:
            res.fail(complex=name, subset=sorted(bad[0]))
    return res


def check_descent(named) -> CheckResult:
    res = CheckResult("spectral-descent")
    for name, X in named:
        if X.n < 2:
            continue
        try:
            prof = spectral_profile(X)
        except (DisconnectedLink, Disconnected):
            res.skipped.append(name)
            continue
        flags = descent_check(prof)
        res.checked += len(flags)
        if not all(flags):
            res.fail(complex=name, flags=flags)
    return res


def check_cofilling_duality(named, max_cells: int = 16) -> CheckResult:
    res = CheckResult("cofilling-times-cocycle-expansion")
    for name, X in named:
        for k in range(-1, X.n):
            if X.num_cells(k) > max_cells:
                continue
            mu, et = cofilling(X, k), cocycle_expansion(X, k)
            if et == INF:
                continue
            res.checked += 1
            if mu * et != 1:
                res.fail(complex=name, k=k, mu=format_rational(mu), eps_tilde=format_rational(et))
    return res


def check_degree0_isoperimetry(named, max_vertices: int = 16) -> CheckResult:
    res = CheckResult("degree0-isoperimetry")
    for name, X in named:
        if X.n < 1 or len(X.cells(0)) > max_vertices:
            continue
        try:
            scan = scan_isoperimetry(X, 0)
        except Disconnected:
            res.skipped.append(name)
            continue
        res.checked += scan.in_hypothesis
        if not scan.passed:
            res.fail(complex=name, witness=scan.witness.to_hex(), ratio=format_rational(scan.worst))
    return res


def check_skeleton_bounds(named) -> CheckResult:
    res = CheckResult("skeleton-norm-comparison")
    for name, X in named:
        for l in range(1, X.n):
            comp = skeleton_compare(X, l)
            res.checked += len(X.cells(l))
            if comp.violations:
                res.fail(complex=name, l=l, simplex=list(comp.violations[0]))
    return res


def first_edge(X: WeightedComplex):
    return X.cells(min(1, X.n))[0]


def lemma_suite(seed: int = config.SEED, samples: int = 2000, inject_corruption: bool = False) -> list[CheckResult]:
    named = corpus()
    if inject_corruption:
        name, X = named[0]
        s = first_edge(X)
        named[0] = (name + "-corrupted", corrupt_weight(X, s, X.weight(s) + 1))
    results = [check_weight_law(named)]
    clean = [(n, X) for n, X in named if not weight_law_violations(X)]
    results += [
        check_weight_closed_form(clean),
        check_weight_totals(clean),
        *check_f2_identities(clean, samples, seed),
        check_cheeger(clean),
        check_descent(clean),
        check_cofilling_duality(clean),
        check_degree0_isoperimetry(clean),
        check_skeleton_bounds(clean),
    ]
    return results

