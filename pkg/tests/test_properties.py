from fractions import Fraction
from itertools import combinations

import numpy as np
from hypothesis import given, settings, strategies as st

from hdx.complex_core import (
    build_complex,
    complex_from_json,
    format_rational,
    parse_rational,
    relabel,
    weight_law_violations,
)
from hdx.f2_chains import Cochain, coboundary_bits, differential, norm
from hdx.minimality import eps_local_minimize, is_eps_locally_minimal

VERTS = 7


@st.composite
def pure_complexes(draw):
    n = draw(st.integers(1, 3))
    faces = list(combinations(range(VERTS), n + 1))
    tops = draw(st.lists(st.sampled_from(faces), min_size=1, max_size=8, unique=True))
    if draw(st.booleans()):
        ws = draw(st.lists(st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9),
                           min_size=len(tops), max_size=len(tops)))
        return build_complex(tops, custom_weights=ws)
    return build_complex(tops)


@st.composite
def complex_and_cochain(draw, max_k=None):
    X = draw(pure_complexes())
    k = draw(st.integers(0, X.n if max_k is None else min(X.n, max_k)))
    bits = draw(st.lists(st.integers(0, 1), min_size=X.num_cells(k), max_size=X.num_cells(k)))
    return Cochain(X, k, np.array(bits, np.uint8))


@given(pure_complexes())
def test_weight_law_always_holds(X):
    assert weight_law_violations(X) == []


@given(pure_complexes())
def test_json_round_trip(X):
    assert complex_from_json(X.to_json_dict()) == X


@given(pure_complexes(), st.randoms())
def test_relabel_preserves_weight_multiset(X, rnd):
    perm = list(range(VERTS))
    rnd.shuffle(perm)
    Y = relabel(X, perm)
    for k in range(X.n + 1):
        assert sorted(X.weights(k)) == sorted(Y.weights(k))


@given(st.fractions(max_denominator=10**6))
def test_rational_text_round_trip(q):
    assert parse_rational(format_rational(q)) == q


@given(complex_and_cochain())
def test_cochain_hex_round_trip(phi):
    assert Cochain.from_hex(phi.X, phi.k, phi.to_hex()) == phi


@given(complex_and_cochain())
def test_differential_squares_to_zero(phi):
    if phi.k + 2 <= phi.X.n:
        assert not differential(differential(phi)).bits.any()


@settings(max_examples=60, deadline=None)
@given(complex_and_cochain(max_k=2), st.sampled_from([Fraction(1, 10), Fraction(1, 3), Fraction(3, 4)]))
def test_minimize_contract(phi, eps):
    tr = eps_local_minimize(phi, eps)
    X, k = phi.X, phi.k
    assert tr.result == Cochain(X, k, phi.bits ^ coboundary_bits(X, k - 1, tr.psi.bits))
    assert is_eps_locally_minimal(tr.result, eps)
    assert norm(phi) >= norm(tr.result) + eps * norm(tr.psi)
