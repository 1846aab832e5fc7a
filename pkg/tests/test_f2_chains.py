from fractions import Fraction
from math import comb

import numpy as np
import pytest

from hdx.errors import BadArgs, ParseError, TopDimension
from hdx.f2_chains import (
    Cochain,
    binomial_identity_holds,
    coboundary_bits,
    cohomology_dim,
    differential,
    local_differential_norms_int,
    local_norms_int,
    localize,
    norm,
    random_cochain,
    rref,
    solve_preimage,
    subspace_basis,
)
from hdx.generators import corpus, hollow_simplex

from oracles import bits_to_set, ref_from, set_to_bits

SMALL = [(n, X) for n, X in corpus() if max(X.num_cells(k) for k in range(X.n + 1)) <= 12]


def test_cochain_hex_roundtrip(two_tri):
    phi = Cochain.indicator(two_tri, 1, [(0, 1), (2, 3)])
    assert Cochain.from_hex(two_tri, 1, phi.to_hex()) == phi
    assert phi.support == [(0, 1), (2, 3)]


def test_cochain_hex_errors(two_tri):
    with pytest.raises(ParseError):
        Cochain.from_hex(two_tri, 1, "zz")
    with pytest.raises(ParseError):
        Cochain.from_hex(two_tri, 1, "ffff")
    with pytest.raises(ParseError):
        Cochain.from_hex(two_tri, 1, "ff")  # padding bits set


def test_cochain_shape_checked(two_tri):
    with pytest.raises(BadArgs):
        Cochain(two_tri, 1, [1, 0])


def test_xor_and_zero(triangle):
    a = Cochain.indicator(triangle, 0, [(0,)])
    assert not (a + a)
    assert a - a == Cochain.zero(triangle, 0)


def test_differential_of_vertex(triangle):
    phi = Cochain.indicator(triangle, 0, [(0,)])
    assert differential(phi).support == [(0, 1), (0, 2)]
    assert norm(differential(phi)) == 2


def test_differential_top_raises(triangle):
    with pytest.raises(TopDimension):
        differential(Cochain.zero(triangle, 2))


@pytest.mark.parametrize("name,X", SMALL[:15])
def test_differential_matches_reference(name, X):
    R = ref_from(X)
    rng = np.random.default_rng(7)
    for k in range(-1, X.n):
        for _ in range(5):
            phi = random_cochain(X, k, rng)
            want = R.d(bits_to_set(X, k, phi.bits), k)
            assert bits_to_set(X, k + 1, differential(phi).bits) == want
            assert norm(phi) == R.norm(bits_to_set(X, k, phi.bits))


def test_dd_is_zero():
    rng = np.random.default_rng(3)
    for _, X in corpus()[:25]:
        for k in range(-1, X.n - 1):
            phi = random_cochain(X, k, rng)
            assert not differential(differential(phi))


def test_localize(two_tri):
    phi = Cochain.indicator(two_tri, 1, [(1, 2), (1, 3), (0, 2)])
    loc = localize(phi, (1,))
    assert loc.support == [(2,), (3,)]
    assert norm(loc) == two_tri.weight((1, 2)) + two_tri.weight((1, 3))


def test_local_norms_match_links():
    rng = np.random.default_rng(11)
    for _, X in SMALL[:20]:
        for k in range(0, X.n + 1):
            phi = random_cochain(X, k, rng)
            for j in range(-1, k):
                got = local_norms_int(phi, j)
                for t, tau in enumerate(X.cells(j)):
                    assert Fraction(int(got[t]), X.denom) == norm(localize(phi, tau))


def test_local_differential_norms_match_links():
    rng = np.random.default_rng(12)
    for _, X in SMALL[:20]:
        for k in range(0, X.n):
            phi = random_cochain(X, k, rng)
            for j in range(-1, k):
                got = local_differential_norms_int(phi, j)
                for t, tau in enumerate(X.cells(j)):
                    loc = localize(phi, tau)
                    if loc.k >= loc.X.n:
                        assert got[t] == 0
                        continue
                    assert Fraction(int(got[t]), X.denom) == norm(differential(loc))


def test_binomial_identity(tetrahedron):
    rng = np.random.default_rng(5)
    for k in range(4):
        phi = random_cochain(tetrahedron, k, rng)
        for j in range(-1, k):
            assert binomial_identity_holds(phi, j)
            assert comb(k + 1, j + 1) * norm(phi) == sum(
                norm(localize(phi, t)) for t in tetrahedron.cells(j)
            )


@pytest.mark.parametrize(
    "build,k,dim",
    [
        (lambda: hollow_simplex(3), 1, 1),
        (lambda: hollow_simplex(4), 2, 1),
        (lambda: hollow_simplex(4), 1, 0),
    ],
)
def test_cohomology_dims(build, k, dim):
    assert cohomology_dim(build(), k) == dim


def test_tetrahedron_subspaces(tetrahedron):
    assert subspace_basis(tetrahedron, 1, "Z").dim == 3
    assert subspace_basis(tetrahedron, 1, "B").dim == 3
    assert cohomology_dim(tetrahedron, 0) == 0


def test_triangle_h0(triangle):
    assert cohomology_dim(triangle, 0) == 0
    assert subspace_basis(triangle, 0, "B").dim == 1


@pytest.mark.parametrize("name,X", SMALL[:15])
def test_subspaces_match_reference(name, X):
    R = ref_from(X)
    for k in range(0, X.n + 1):
        for kind, ref in (("B", R.coboundaries(k)), ("Z", R.cocycles(k))):
            S = subspace_basis(X, k, kind)
            assert 2 ** S.dim == len(ref)
            for v in S.vectors:
                assert bits_to_set(X, k, v.bits) in ref


def test_reduce_is_lex_least_in_coset(two_tri):
    X = two_tri
    B = subspace_basis(X, 1, "B")
    R = ref_from(X)
    rng = np.random.default_rng(1)
    for _ in range(10):
        phi = random_cochain(X, 1, rng)
        red = B.reduce(phi).bits
        coset = [set_to_bits(X, 1, bits_to_set(X, 1, phi.bits) ^ b) for b in R.coboundaries(1)]
        assert tuple(red) == min(tuple(c) for c in coset)


def test_coset_keys(two_tri):
    B = subspace_basis(two_tri, 1, "B")
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = random_cochain(two_tri, 1, rng)
        b = random_cochain(two_tri, 1, rng)
        same = B.contains(a + b)
        assert (B.key(a.bits) == B.key(b.bits)) == same


def test_rref():
    m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], np.uint8)
    rows, piv = rref(m)
    assert piv == (0, 1)
    assert rows.tolist() == [[1, 0, 1], [0, 1, 1]]


def test_solve_preimage(tetrahedron):
    rng = np.random.default_rng(4)
    for _ in range(10):
        psi = random_cochain(tetrahedron, 0, rng)
        beta = coboundary_bits(tetrahedron, 0, psi.bits)
        got = solve_preimage(tetrahedron, 0, beta)
        assert np.array_equal(coboundary_bits(tetrahedron, 0, got), beta)


def test_solve_preimage_inconsistent(tetrahedron):
    # odd number of edges around a triangle boundary: not a coboundary
    beta = np.ones(6, np.uint8)
    assert solve_preimage(tetrahedron, 0, beta) is None
