"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line (shown in the terminal summary and
printed under ``-s``) before asserting, so a failing criterion still
reports what it measured.
"""

import math
import time
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest

from hdx.cli import main
from hdx.complex_core import WeightKind, skeleton, total_weight
from hdx.errors import Disconnected, DisconnectedLink
from hdx.expansion import coboundary_expansion, cocycle_expansion, cofilling
from hdx.f2_chains import (
    Cochain,
    coboundary_bits,
    differential,
    local_differential_norms_int,
    local_norms_int,
    localize,
    norm,
    norm_int,
    random_cochain,
)
from hdx.generators import corpus, glued_tetrahedra, hollow_simplex, projective_plane_flag, simplex_skeleton
from hdx.isoperimetry import ledger_k1, ledger_k2, scan_isoperimetry, verify_k2_alternative
from hdx.minimality import eps_local_minimize, is_eps_locally_minimal, step_bound
from hdx.overlap_cert import certify_2skeleton, normalized, skeleton_compare
from hdx.spectral import (
    WeightedGraph,
    cheeger_check,
    cheeger_exhaustive,
    spectral_gap,
    spectral_profile,
)

import oracles
from conftest import ACCEPTANCE_LINES
from oracles import bits_to_set, ref_from

CORPUS = corpus()


def record(n: int, ok: bool, text: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def test_criterion_01_weight_law():
    t0 = time.perf_counter()
    cells = 0
    bad = []
    for name, X in CORPUS:
        R = ref_from(X)
        n = X.n
        for k in range(-1, n + 1):
            ws = dict(zip(X.cells(k), X.weights(k)))
            for s, w in ws.items():
                cells += 1
                if w != R.weight(s):
                    bad.append((name, s, "closed form"))
            if k < n:
                up = dict(zip(X.cells(k + 1), X.weights(k + 1)))
                acc = {s: Fraction(0) for s in ws}
                for eta, w in up.items():
                    for i in range(len(eta)):
                        acc[eta[:i] + eta[i + 1:]] += w
                bad += [(name, s, "summation law") for s in ws if acc[s] != ws[s]]
        top = sum(X.top_weights, Fraction(0))
        for k in range(-1, n + 1):
            if total_weight(X, k) != Fraction(factorial(n + 1), factorial(k + 1)) * top:
                bad.append((name, k, "level total"))
            for l in range(k, n + 1):
                if total_weight(X, k) != Fraction(factorial(l + 1), factorial(k + 1)) * total_weight(X, l):
                    bad.append((name, (k, l), "level ratio"))
    dt = time.perf_counter() - t0
    dims = {X.n for _, X in CORPUS}
    ok = (
        not bad
        and len(CORPUS) >= 50
        and dims == {1, 2, 3, 4}
        and all(len(X.top_simplices) <= 200 for _, X in CORPUS)
        and dt < 10
    )
    record(1, ok, f"weight law exact on {len(CORPUS)} complexes, {cells} cells, "
                  f"{len(bad)} mismatches, {dt:.2f}s (< 10s)")


def test_criterion_02_cheeger():
    t0 = time.perf_counter()
    graphs = subsets = 0
    bad = []
    for name, X in CORPUS:
        if X.n < 1 or X.num_cells(0) > 12:
            continue
        G = WeightedGraph.from_complex(X)
        if G.components > 1:
            continue
        count, fails = cheeger_exhaustive(G, tol=1e-9)
        graphs += 1
        subsets += count
        bad += [(name, sorted(U)) for U in fails]
        # second route: exact per-subset evaluation on the smaller graphs
        if X.num_cells(0) <= 8:
            lam = spectral_gap(G)
            vs = G.vertices
            for mask in range(1, (1 << len(vs)) - 1):
                U = {v for i, v in enumerate(vs) if mask >> i & 1}
                r = cheeger_check(G, U, lam, tol=1e-9)
                if not (r.ok1 and r.ok2):
                    bad.append((name, sorted(U)))
    K3 = WeightedGraph.from_complex(hollow_simplex(3))
    eq = cheeger_check(K3, {0})
    equality = eq.cut == 2 and abs(eq.bound1_rhs - 2) <= 1e-9
    dt = time.perf_counter() - t0
    ok = not bad and equality and graphs > 0 and dt < 60
    record(2, ok, f"Cheeger bounds on {graphs} graphs, {subsets} subsets, {len(bad)} failures; "
                  f"K3 single vertex cut {eq.cut} vs bound {eq.bound1_rhs:.12g}; {dt:.2f}s (< 60s)")


def test_criterion_03_spectral_fixtures():
    K3 = spectral_gap(WeightedGraph.from_complex(hollow_simplex(3)))
    K4 = spectral_gap(WeightedGraph.from_complex(simplex_skeleton(4, 1)))
    heawood_X = projective_plane_flag(2)
    heawood = spectral_gap(WeightedGraph.from_complex(heawood_X))
    heawood_ref = oracles.graph_gap(ref_from(heawood_X))
    lam = spectral_profile(simplex_skeleton(4, 3)).lambdas
    errs = {
        "K3": abs(K3 - 1.5),
        "K4": abs(K4 - 4 / 3),
        "Heawood": abs(heawood - (1 - math.sqrt(2) / 3)),
        "Heawood (generalized eigensolver)": abs(heawood_ref - (1 - math.sqrt(2) / 3)),
        "l0 = 2 - 1/l1": abs(lam[0] - (2 - 1 / lam[1])),
        "l1 = 2 - 1/l2": abs(lam[1] - (2 - 1 / lam[2])),
    }
    worst = max(errs.values())
    record(3, worst <= 1e-9, "spectral fixtures K3, K4, Heawood and tetrahedron descent; "
                             f"max error {worst:.2e} (<= 1e-9)")


def test_criterion_04_f2_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240611)
    pool = [(name, X, k) for name, X in CORPUS for k in range(0, X.n + 1)]
    total = 10_000
    fails = []
    slow_checked = 0
    for i in range(total):
        name, X, k = pool[i % len(pool)]
        phi = random_cochain(X, k, rng)
        n_phi = norm_int(X, k, phi.bits)
        for j in range(-1, k):
            lhs = comb(k + 1, j + 1) * n_phi
            if lhs != int(local_norms_int(phi, j).sum()):
                fails.append((name, k, "binomial"))
        if k < X.n:
            n_d = norm_int(X, k + 1, coboundary_bits(X, k, phi.bits))
            if n_d > n_phi:
                fails.append((name, k, "contraction"))
            dv = local_differential_norms_int(phi, 0)
            if k * n_d + n_phi < int(dv.sum()):
                fails.append((name, k, "vertex bound"))
            if k >= 1:
                dt_ = local_differential_norms_int(phi, k - 1)
                if n_d < int(dt_.sum()) - k * n_phi:
                    fails.append((name, k, "face bound"))
            # every 40th sample: recompute the vertex sums through links
            if i % 40 == 0 and k >= 1:
                slow_checked += 1
                by_link = sum(
                    (norm(differential(localize(phi, v))) for v in X.cells(0)
                     if localize(phi, v).k < localize(phi, v).X.n),
                    Fraction(0),
                )
                if by_link != Fraction(int(dv.sum()), X.denom):
                    fails.append((name, k, "link recomputation"))
    dt = time.perf_counter() - t0
    ok = not fails and dt < 120
    record(4, ok, f"F2 identities on {total} random cochains ({slow_checked} recomputed through links), "
                  f"{len(fails)} failures, {dt:.2f}s (< 120s)")


def test_criterion_05_expansion_constants():
    t0 = time.perf_counter()
    minus_one = 0
    bad = []
    products = 0
    for name, X in CORPUS:
        vals = (coboundary_expansion(X, -1), cocycle_expansion(X, -1), cofilling(X, -1))
        minus_one += 1
        if vals != (1, 1, 1):
            bad.append((name, -1))
        for k in range(0, X.n):
            if X.num_cells(k) > 20:
                continue
            et = cocycle_expansion(X, k)
            mu = cofilling(X, k)
            if et != math.inf:
                products += 1
                if mu * et != 1:
                    bad.append((name, k))
    fano = projective_plane_flag(2)
    eps0 = coboundary_expansion(fano, 0, mode="exhaustive")
    eps0_q = coboundary_expansion(fano, 0, mode="quotient")
    dt = time.perf_counter() - t0
    ok = not bad and eps0 == eps0_q and eps0 >= Fraction(1, 6) and dt < 60
    record(5, ok, f"eps/eps~/mu at -1 equal 1 on {minus_one} complexes; mu*eps~ = 1 in {products} cases; "
                  f"Fano eps0 = {eps0} over 2^14 cochains (>= 1/6); {len(bad)} failures, {dt:.2f}s (< 60s)")


def test_criterion_06_minimization_contract():
    small = [(n, X) for n, X in CORPUS if max(X.num_cells(k) for k in range(X.n + 1)) <= 16]
    eps_grid = [Fraction(1, 20), Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(9, 10)]
    rng = np.random.default_rng(77)
    pairs = steps = 0
    oracle_checked = 0
    bad = []
    i = 0
    while pairs < 1000:
        name, X = small[i % len(small)]
        k = int(rng.integers(0, min(X.n, 2) + 1))
        eps = eps_grid[i % len(eps_grid)]
        i += 1
        phi = random_cochain(X, k, rng)
        tr = eps_local_minimize(phi, eps)
        pairs += 1
        steps += len(tr.steps)
        out = Cochain(X, k, phi.bits ^ coboundary_bits(X, k - 1, tr.psi.bits))
        if out != tr.result:
            bad.append((name, "output is not phi - d psi"))
        if not is_eps_locally_minimal(tr.result, eps):
            bad.append((name, "not eps-locally minimal"))
        if norm(phi) < norm(tr.result) + eps * norm(tr.psi):
            bad.append((name, "norm decrease"))
        if len(tr.steps) > step_bound(phi, eps):
            bad.append((name, "step bound"))
        if pairs % 25 == 0 and max(X.num_cells(j) for j in range(X.n + 1)) <= 10:
            oracle_checked += 1
            R = ref_from(X)
            if not oracles.eps_locally_minimal(R, bits_to_set(X, k, tr.result.bits), k, eps):
                bad.append((name, "oracle disagrees"))
    ok = not bad
    record(6, ok, f"{pairs} (phi, eps) minimizations, {steps} steps, both post-conditions and step bound "
                  f"hold ({oracle_checked} outputs confirmed by brute force); {len(bad)} failures")


# hand substitution, written out as literals
HAND_K1 = {"C1": Fraction(1, 8192), "theta1": Fraction(511, 512)}
HAND_K2_ONE_SIXTH = {"eps2": Fraction(7, 120), "delta": Fraction(1, 6000)}


def test_criterion_07_constant_ledger():
    k1 = ledger_k1()
    k2 = ledger_k2(Fraction(1, 6))
    got = {"C1": k1.C, "theta1": k1.theta, "eps2": k2["eps2"], "delta": k2["delta"]}
    want = {**HAND_K1, **HAND_K2_ONE_SIXTH}
    ok = got == want
    shown = ", ".join(f"{k} = {v}" for k, v in got.items())
    record(7, ok, f"ledger constants {shown} match hand substitution")


def test_criterion_08_isoperimetry_scans():
    k0 = k0_phis = 0
    skipped = []
    bad = []
    for name, X in CORPUS:
        if X.n < 1:
            continue
        for eps in (Fraction(1, 16), Fraction(1, 6), Fraction(1, 2)):
            try:
                s = scan_isoperimetry(X, 0, eps=eps)
            except Disconnected:
                # the constant is zero when the graph is disconnected
                skipped.append(name)
                break
            k0 += 1
            k0_phis += s.in_hypothesis
            if not s.passed:
                bad.append((name, 0, eps))
    vacuous = 0
    for name, X in CORPUS:
        for k in (1, 2):
            if X.n > k:
                s = scan_isoperimetry(X, k)
                vacuous += 1
                if not (s.mode == "vacuous" and s.passed and s.in_hypothesis == 0):
                    bad.append((name, k, "not vacuous"))
    overrides = {1: (Fraction(1, 4), Fraction(1, 2)), 2: (Fraction(1, 10), Fraction(1, 2))}
    over_runs = over_pass = 0
    for name, X in CORPUS:
        for k, (C, eps) in overrides.items():
            if X.n <= k or X.num_cells(k) > 40:
                continue
            s = scan_isoperimetry(X, k, C=C, eps=eps, limit=300)
            if s.in_hypothesis == 0:
                continue
            over_runs += 1
            over_pass += s.passed
            w = s.witness
            if w is None or norm(differential(w)) / norm(w) != s.worst:
                bad.append((name, k, "override witness"))
    neither = k2_inputs = 0
    L = ledger_k2(Fraction(1, 6))
    for name, X in CORPUS:
        if X.n <= 2:
            continue
        try:
            spectral_profile(X)
        except DisconnectedLink:
            continue
        # hypothesis set ||phi|| <= C2' m(X^2): enumerate it through the scanner's bound
        bound = L["C2p"] * total_weight(X, 2)
        members = [Cochain.zero(X, 2)]
        members += [
            Cochain.indicator(X, 2, [s]) for s, w in zip(X.cells(2), X.weights(2)) if w <= bound
        ]
        for phi in members:
            k2_inputs += 1
            if verify_k2_alternative(X, phi, L).case == "neither":
                neither += 1
    ok = not bad and neither == 0 and over_runs > 0 and k0 > 0
    record(8, ok, f"k=0 bound holds in {k0} (complex, eps) scans ({k0_phis} minimal cochains, "
                  f"disconnected skipped: {', '.join(skipped) or 'none'}); "
                  f"{vacuous} default-constant k=1,2 scans vacuous; {over_runs} override scans with witnesses "
                  f"({over_pass} meet the target); {k2_inputs} in-hypothesis k=2 inputs, {neither} 'neither'")


def test_criterion_09_certificate_determinism(tmp_path):
    X = hollow_simplex(5)
    texts = [certify_2skeleton(X, threads=1).to_json() for _ in range(5)]
    texts.append(certify_2skeleton(X, threads=4).to_json())
    files = []
    for threads in ("1", "4"):
        out = tmp_path / f"cert-{threads}.json"
        main(["certify", "gen:hollow-simplex:v=5", "--threads", threads, "--out", str(out)])
        files.append(out.read_bytes())
    ok = len(set(texts)) == 1 and files[0] == files[1] == texts[0].encode()
    record(9, ok, "certificate JSON byte-identical over 5 runs and threads {1, 4} "
                  f"(API and CLI, {len(texts[0])} bytes)")


def _two_sided(X, l):
    """Independent route: weights of the normalized complex and of its
    normalized l-skeleton, compared cell by cell."""
    n = X.n
    full = dict(zip(X.cells(l), normalized(X).weights(l)))
    skel = dict(zip(X.cells(l), skeleton(X, l, WeightKind.NORMALIZED_HOMOGENEOUS).weights(l)))
    return full, skel, factorial(n - l) * comb(n + 1, l + 1)


def test_criterion_10_skeleton_comparison(tetrahedron, glued):
    tet = skeleton_compare(tetrahedron, 2)
    full, skel, factor = _two_sided(tetrahedron, 2)
    tet_eq = all(full[s] == factor * skel[s] for s in full) and factor == 4
    glu = skeleton_compare(glued, 2)
    full, skel, factor = _two_sided(glued, 2)
    M = glu.M
    glu_ok = all(factor / M * skel[s] <= full[s] <= factor * M * skel[s] for s in full)
    ok = (
        tet.M == 1 and tet.equalities == 4 and tet_eq
        and M == 2 and glu_ok and not glu.violations
    )
    record(10, ok, f"tetrahedron M = {tet.M}, mbar_h = 4 mbar_h2 on {tet.equalities} triangles; "
                   f"glued tetrahedra M = {M}, two-sided bound exact on {len(full)} triangles")
