import json
import math
from fractions import Fraction

import pytest

from hdx.errors import BadArgs, BadDimension, DisconnectedLink
from hdx.generators import cycle, full_simplex, glued_tetrahedra, hollow_simplex, join, simplex_skeleton
from hdx.complex_core import build_complex
from hdx.isoperimetry import ledger_k1, ledger_k2
from hdx.overlap_cert import (
    CERT_SCHEMA,
    certify_2skeleton,
    kkl_hypothesis_check,
    lambda_threshold,
    mu_nu_from_isoperimetry,
    normalized,
    skeleton_compare,
)


def test_mu_nu():
    mu, nu = mu_nu_from_isoperimetry(3, Fraction(1, 100), [1, Fraction(1, 10), Fraction(1, 20)])
    assert mu == 100 and nu == Fraction(1, 20)
    mu, nu = mu_nu_from_isoperimetry(2, Fraction(1, 2), [1, Fraction(1, 100)])
    assert mu == 200


@pytest.mark.parametrize("args", [(2, 1, [1]), (1, 0, [1]), (1, 1, [0]), (0, 1, [])])
def test_mu_nu_rejects(args):
    with pytest.raises(BadArgs):
        mu_nu_from_isoperimetry(*args)


def test_lambda_threshold():
    assert lambda_threshold(2, Fraction(1, 2)) == Fraction(2, 3)
    assert lambda_threshold(1, Fraction(3, 4)) == Fraction(3, 4)
    assert lambda_threshold(3, 1) == 1
    assert lambda_threshold(4, 3) == math.inf


def test_lambda_threshold_with_ledger_exceeds_one():
    theta = max(ledger_k1().theta, ledger_k2(1).theta)
    assert lambda_threshold(3, theta) == Fraction(3522, 2983)


def test_skeleton_compare_tetrahedron(tetrahedron):
    c = skeleton_compare(tetrahedron, 2)
    assert (c.M1, c.M2, c.M) == (1, 1, 1)
    assert c.factor == 4 and c.equalities == 4 and c.violations == ()


def test_skeleton_compare_glued(glued):
    c = skeleton_compare(glued, 2)
    assert c.M == 2 and c.violations == ()
    c1 = skeleton_compare(glued, 1)
    assert c1.M == 2 and c1.factor == 2 * 6 and c1.violations == ()


def test_skeleton_compare_range(tetrahedron):
    for l in (0, 3):
        with pytest.raises(BadDimension):
            skeleton_compare(tetrahedron, l)


def test_kkl_rows_hollow_triangle():
    X = normalized(hollow_simplex(3))
    rows = kkl_hypothesis_check(X, mu=10, nu=Fraction(1, 10), ks=[0, 1])
    assert rows[0].mu_ok and rows[0].systole == math.inf
    assert rows[1].mu_k is None and rows[1].systole == Fraction(1, 3)
    assert rows[1].systole_bound == Fraction(1, 10)  # normalized m(X^1) = 1


def test_kkl_threads_agree():
    X = simplex_skeleton(6, 2)
    a = kkl_hypothesis_check(X, 100, Fraction(1, 100), threads=1)
    b = kkl_hypothesis_check(X, 100, Fraction(1, 100), threads=3)
    assert a == b


def test_kkl_range():
    with pytest.raises(BadDimension):
        kkl_hypothesis_check(cycle(4), 1, 1, ks=[2])


def test_certificate_passes_on_hollow_4_simplex():
    cert = certify_2skeleton(hollow_simplex(5))
    p = cert.payload
    assert p["schema"] == CERT_SCHEMA and cert.satisfied
    assert p["config"]["epsilon_source"] == "measured"
    assert set(p) == {
        "schema", "version", "complex", "config", "link_expansion",
        "skeleton", "constants", "kkl", "spectral", "verdict",
    }
    assert "threads" not in p["config"]


def test_certificate_fails_spectral_on_cycle_join():
    cert = certify_2skeleton(join(cycle(5), full_simplex(2)))
    v = cert.payload["verdict"]
    assert not cert.satisfied and v["spectral"] is False
    assert cert.payload["spectral"]["Lambda2"] == "3522/2983"


def test_certificate_glued_reports_M():
    cert = certify_2skeleton(glued_tetrahedra(), max_M=1)
    assert cert.payload["skeleton"]["M"] == "2/1"
    assert cert.payload["verdict"]["skeleton"] is False


def test_certificate_epsilon_override():
    cert = certify_2skeleton(hollow_simplex(5), epsilon=Fraction(1, 2))
    assert cert.payload["config"]["epsilon_source"] == "override"
    assert cert.payload["constants"]["ledger_k2"]["inputs"]["epsilon"] == "1/2"


def test_certificate_bad_epsilon_fails_closed():
    cert = certify_2skeleton(hollow_simplex(5), epsilon=0)
    assert cert.payload["constants"] is None and not cert.satisfied


def test_certificate_is_deterministic():
    X = hollow_simplex(5)
    texts = {certify_2skeleton(X).to_json() for _ in range(3)}
    texts.add(certify_2skeleton(X, threads=4).to_json())
    assert len(texts) == 1
    json.loads(texts.pop())


def test_certificate_input_checks(triangle):
    with pytest.raises(BadDimension):
        certify_2skeleton(triangle)
    with pytest.raises(BadArgs):
        certify_2skeleton(hollow_simplex(5), l=1)
    with pytest.raises(DisconnectedLink):
        certify_2skeleton(build_complex([(0, 1, 2, 3), (0, 4, 5, 6)]))
