"""Isoperimetric inequalities for small-norm, nearly locally minimal cochains.

Three pieces:

* ``ConstantsLedger`` holds the explicit constants that make the degree 1 and
  degree 2 inequalities go through, derived exactly from their inputs.
* ``verify_thin_laplacian`` evaluates the Laplacian-type lower bound on
  ``||d phi||`` for thin cochains.
* ``scan_isoperimetry`` and ``verify_k2_alternative`` test the inequalities
  empirically, exhaustively when the candidate set is small and by seeded
  sampling otherwise.

The ledger constants are tiny (``C_1 = 1/8192``), so on any complex that fits
in memory the hypothesis set ``{phi : ||phi|| <= C m(X^k)}`` holds only the
zero cochain and the inequalities are vacuously true.  Scans therefore accept
overrides and report them next to the ledger values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hdx import _kernels, config
from hdx.complex_core import WeightedComplex, format_rational, total_weight
from hdx.errors import BadDimension, BadEpsilon, BadK, CapExceeded, DisconnectedLink, HypothesisNotMet
from hdx.f2_chains import (
    Cochain,
    coboundary_bits,
    local_differential_norms_int,
    local_norms_int,
    norm,
    norm_int,
)
from hdx.minimality import is_eps_locally_minimal, thinness
from hdx.spectral import WeightedGraph, spectral_gap, spectral_profile

# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantsLedger:
    """Exact constants with a note on where each one comes from.

    ``values`` maps names (``delta``, ``eps``, ``eps1``, ``eps2``, ``C1p``,
    ``theta1p``, ``C1``, ``theta1``, ``C2p``, ``theta2p``, ``C2``, ``theta2``,
    ``target``) to Fractions.
    """

    degree: int
    inputs: dict
    values: dict
    notes: dict

    def __getitem__(self, name: str) -> Fraction:
        return self.values[name]

    @property
    def C(self) -> Fraction:
        return self.values[f"C{self.degree}"]

    @property
    def theta(self) -> Fraction:
        return self.values[f"theta{self.degree}"]

    def invariant_issues(self) -> list[str]:
        """Constants outside (0, 1), and breaks in ``C2' <= C1' <= 1``."""
        issues = []
        for name, v in self.values.items():
            if name == "target":
                continue
            if not 0 < v < 1:
                issues.append(f"{name} = {format_rational(v)} is outside (0, 1)")
        if "C2p" in self.values and not self["C2p"] <= self["C1p"] <= 1:
            issues.append("C2p <= C1p <= 1 fails")
        return issues

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "inputs": {k: format_rational(v) for k, v in self.inputs.items()},
            "values": {k: format_rational(v) for k, v in self.values.items()},
            "notes": dict(self.notes),
            "issues": self.invariant_issues(),
        }


_SMALL_THIN = "small-norm-implies-thin lemma"


def _small_thin(delta: Fraction, eps1: Fraction) -> tuple[Fraction, Fraction]:
    return delta * delta * eps1, 1 - delta * eps1


def ledger_k1() -> ConstantsLedger:
    """Constants for ``||d phi|| >= ||phi|| / 4`` on 1-cochains."""
    delta = eps = Fraction(1, 16)
    eps1 = Fraction(1, 32)
    C1p, theta1p = _small_thin(delta, eps1)
    theta1 = max(theta1p, Fraction(1, 4) / (Fraction(1, 2) - Fraction(7, 32)))
    values = {
        "delta": delta,
        "eps": eps,
        "eps1": eps1,
        "C1p": C1p,
        "theta1p": theta1p,
        "C1": C1p,
        "theta1": theta1,
        "target": Fraction(1, 4),
    }
    notes = {
        "delta": "degree-1 inequality: delta = eps = 1/16",
        "eps": "degree-1 inequality: delta = eps = 1/16",
        "eps1": "degree-1 inequality: eps1 = 1/32",
        "C1p": f"{_SMALL_THIN}: C1' = delta^2 eps1",
        "theta1p": f"{_SMALL_THIN}: theta1' = 1 - delta eps1",
        "C1": "degree-1 inequality: C1 = C1'",
        "theta1": "degree-1 inequality: theta1 = max(theta1', (1/4)/(1/2 - 7/32))",
        "target": "degree-1 inequality: ratio 1/4",
    }
    return ConstantsLedger(1, {}, values, notes)


def ledger_k2(epsilon) -> ConstantsLedger:
    """Constants for the degree-2 inequality given a vertex-link coboundary
    expansion floor ``epsilon`` in (0, 1].

    ``target`` is ``65 epsilon / 2000``, the ratio the case analysis actually
    reaches; ``stated_target`` keeps the stated ``3 epsilon / 10``.
    """
    e = Fraction(epsilon)
    if not 0 < e <= 1:
        raise BadEpsilon(f"epsilon must lie in (0, 1], got {e}")
    eps2 = 35 * e / 100
    delta = e / 1000
    eps1 = eps2 / 60
    C1p, theta1p = _small_thin(delta, eps1)
    theta2p = max(theta1p, 1 - C1p * eps2 / 60)
    C2p = C1p * C1p * eps2 / 60
    eps = min(C1p / 4, e / 1000)
    theta2 = max(theta2p, (2 + 3 * e / 10) / (2 + 61 * e / 2000))
    values = {
        "eps2": eps2,
        "delta": delta,
        "eps1": eps1,
        "C1p": C1p,
        "theta1p": theta1p,
        "theta2p": theta2p,
        "C2p": C2p,
        "C2": C2p,
        "eps": eps,
        "theta2": theta2,
        "target": 65 * e / 2000,
        "stated_target": 3 * e / 10,
    }
    notes = {
        "eps2": "degree-2 inequality: eps2 = 35 epsilon / 100",
        "delta": "degree-2 inequality: delta = epsilon / 1000",
        "eps1": "degree-2 alternative: eps1 = eps2 / 60",
        "C1p": f"{_SMALL_THIN}: C1' = delta^2 eps1",
        "theta1p": f"{_SMALL_THIN}: theta1' = 1 - delta eps1",
        "theta2p": "degree-2 alternative: theta2' = max(theta1', 1 - C1' eps2 / 60)",
        "C2p": "degree-2 alternative: C2' = C1'^2 eps2 / 60",
        "C2": "degree-2 inequality: C2 = C2'",
        "eps": "degree-2 inequality: eps = min(C1'/4, epsilon/1000)",
        "theta2": "degree-2 inequality: theta2 = max(theta2', (2 + 3 epsilon/10)/(2 + 61 epsilon/2000))",
        "target": "degree-2 inequality: ratio reached by the case analysis, 65 epsilon / 2000",
        "stated_target": "degree-2 inequality: stated ratio 3 epsilon / 10",
    }
    return ConstantsLedger(2, {"epsilon": e}, values, notes)


# ---------------------------------------------------------------------------
# thin cochains and the Laplacian bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThinLaplacianRecord:
    lhs: Fraction
    rhs: float
    passed: bool

    def to_dict(self) -> dict:
        return {"lhs": format_rational(self.lhs), "rhs": _f(self.rhs), "pass": self.passed}


def _f(x: float) -> str:
    return format(x, f".{config.FLOAT_DIGITS}g")


def min_link_gap(X: WeightedComplex, k: int) -> float:
    """``lambda_k``: least spectral gap over links of ``(k-1)``-faces."""
    if k == 0:
        return spectral_gap(WeightedGraph.from_complex(X))
    return spectral_profile(X).lambdas[k]


def verify_thin_laplacian(
    X: WeightedComplex,
    phi: Cochain,
    delta,
    r=None,
    eps=None,
    lam: float | None = None,
    tol: float = config.TOLERANCE,
) -> ThinLaplacianRecord:
    """Check ``||d phi|| >= lam_0 (1 - delta) ||phi||`` for a delta-thin
    0-cochain, or for k >= 1

    ``||d phi|| >= (((r+1)/2 - delta - eps/2) lam_k (k+1) - k) ||phi||``

    when phi is eps-locally minimal and (r, delta)-thin.  Hypotheses are
    checked exactly; a failing one raises ``HypothesisNotMet``.
    """
    delta = Fraction(delta)
    k = phi.k
    if k >= X.n:
        raise BadDimension("the bound needs k <= n - 1")
    lhs = norm(Cochain(X, k + 1, coboundary_bits(X, k, phi.bits)))
    size = norm(phi)
    if k == 0:
        if not 0 < delta < 1:
            raise HypothesisNotMet("0 < delta < 1", f"delta = {delta}")
        if size > delta * total_weight(X, 0):
            raise HypothesisNotMet("phi is delta-thin", f"||phi|| = {size}")
        lam = min_link_gap(X, 0) if lam is None else lam
        rhs = lam * (1 - float(delta)) * float(size)
    else:
        r, eps = Fraction(r), Fraction(eps)
        if not 0 < eps < 1:
            raise HypothesisNotMet("0 < eps < 1", f"eps = {eps}")
        if not 0 < delta < Fraction(1, 2):
            raise HypothesisNotMet("0 < delta < 1/2", f"delta = {delta}")
        if not 0 < r <= 1:
            raise HypothesisNotMet("0 < r <= 1", f"r = {r}")
        if not is_eps_locally_minimal(phi, eps):
            raise HypothesisNotMet("phi is eps-locally minimal")
        if size and thinness(phi, delta).r_star < r:
            raise HypothesisNotMet("phi is (r, delta)-thin")
        lam = min_link_gap(X, k) if lam is None else lam
        coef = (float((r + 1) / 2 - delta - eps / 2) * lam * (k + 1)) - k
        rhs = coef * float(size)
    return ThinLaplacianRecord(lhs, rhs, float(lhs) >= rhs - tol)


# ---------------------------------------------------------------------------
# bounded-norm enumeration
# ---------------------------------------------------------------------------


def _count_table(w: np.ndarray, bound: int) -> np.ndarray:
    """``T[i, b]`` = number of subsets of cells ``i..N-1`` with weight <= b
    (float64, exact below 2^53)."""
    N = w.size
    T = np.zeros((N + 1, bound + 1))
    T[N, :] = 1
    for i in range(N - 1, -1, -1):
        T[i] = T[i + 1]
        wi = int(w[i])
        if wi <= bound:
            T[i, wi:] += T[i + 1, : bound + 1 - wi]
    return T


def _enumerate_bounded(w: np.ndarray, bound: int):
    """All nonzero 0/1 vectors with ``w . x <= bound``, lexicographically
    descending from the all-ones prefix (deterministic)."""
    N = w.size
    x = np.zeros(N, np.uint8)

    def rec(i: int, room: int):
        if i == N:
            if x.any():
                yield x.copy()
            return
        if w[i] <= room:
            x[i] = 1
            yield from rec(i + 1, room - int(w[i]))
            x[i] = 0
        yield from rec(i + 1, room)

    yield from rec(0, bound)


def _sample_bounded(w: np.ndarray, bound: int, T: np.ndarray, rng: np.random.Generator, count: int):
    N = w.size
    out = []
    while len(out) < count:
        x = np.zeros(N, np.uint8)
        room = bound
        for i in range(N):
            total = T[i, room]
            take = T[i + 1, room - int(w[i])] if w[i] <= room else 0.0
            if rng.random() * total < take:
                x[i] = 1
                room -= int(w[i])
        if x.any():
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------


@dataclass
class IsoperimetryScan:
    """Outcome of testing one inequality over its hypothesis set.

    ``mode`` is ``exhaustive``, ``sampled`` or ``vacuous`` (no candidate).
    ``worst`` is the least ``||d phi|| / ||phi||`` seen, with its witness.
    """

    k: int
    digest: str
    constants: dict
    target: object
    mode: str
    candidates: int
    in_hypothesis: int
    worst: Fraction | None
    witness: Cochain | None
    passed: bool
    spectral: dict = field(default_factory=dict)
    seed: int | None = None

    def to_dict(self) -> dict:
        tgt = self.target if isinstance(self.target, float) else None
        return {
            "k": self.k,
            "complex": self.digest,
            "constants": {k: format_rational(v) for k, v in self.constants.items()},
            "target": _f(tgt) if tgt is not None else format_rational(self.target),
            "mode": self.mode,
            "candidates": self.candidates,
            "in_hypothesis": self.in_hypothesis,
            "worst_ratio": None if self.worst is None else format_rational(self.worst),
            "witness": None if self.witness is None else self.witness.to_hex(),
            "pass": self.passed,
            "vacuous": self.in_hypothesis == 0,
            "spectral": self.spectral,
            "seed": self.seed,
        }


def _spectral_report(X: WeightedComplex, levels: int, theta) -> dict:
    try:
        prof = spectral_profile(X)
    except DisconnectedLink as exc:
        return {"connected": False, "detail": str(exc)}
    lams = prof.lambdas[:levels]
    out = {"connected": True, "lambdas": [_f(x) for x in lams]}
    if theta is not None:
        out["theta"] = format_rational(theta)
        out["meets_theta"] = len(lams) == levels and min(lams) >= float(theta)
    return out


def scan_isoperimetry(
    X: WeightedComplex,
    k: int,
    ledger: ConstantsLedger | None = None,
    C=None,
    eps=None,
    target=None,
    epsilon=Fraction(1, 6),
    limit: int = 4000,
    seed: int = config.SEED,
    cap: int = config.ENUMERATION_CAP,
    tol: float = config.TOLERANCE,
    enforce_spectral: bool = False,
) -> IsoperimetryScan:
    """Test ``||d phi|| >= target * ||phi||`` over every nonzero phi that is
    eps-locally minimal with ``||phi|| <= C m(X^k)``.

    k = 0 has no norm bound (eps-local minimality already caps the norm) and
    the target ``lambda_0 (1 - eps)/2`` is a float.  For k = 1, 2 the defaults
    come from ``ledger_k1()`` and ``ledger_k2(epsilon)``; ``C``, ``eps`` and
    ``target`` override them.  When more than ``limit`` cochains satisfy the
    norm bound, ``limit`` of them are drawn with the seeded generator.
    """
    if k not in (0, 1, 2):
        raise BadK(f"scans cover k in {{0, 1, 2}}, got {k}")
    if k >= X.n:
        raise BadK(f"k = {k} needs a complex of dimension > {k}")
    w = X.int_weights(k)
    N = w.size
    if k == 0:
        eps = Fraction(1, 16) if eps is None else Fraction(eps)
        if not 0 < eps < 1:
            raise BadEpsilon("the degree-0 inequality needs 0 < eps < 1")
        if N >= 63 or (1 << N) > cap:
            raise CapExceeded("0-cochain enumeration", N, cap)
        lam0 = min_link_gap(X, 0)
        tgt = lam0 * (1 - float(eps)) / 2 if target is None else target
        bound = math.floor((1 + eps) * int(X.int_weights(0).sum()) / 2)
        ptr, idx = X.cofacets[0]
        count, found, bdn, bn, bcode = _kernels.active.ratio_scan(N, w, ptr, idx, X.int_weights(1), bound)
        worst = Fraction(int(bdn), int(bn)) if found else None
        wit = Cochain(X, 0, _kernels.decode(int(bcode), N)) if found else None
        ok = worst is None or float(worst) >= float(tgt) - tol
        return IsoperimetryScan(
            0, X.digest, {"eps": eps}, tgt, "exhaustive" if count else "vacuous",
            (1 << N) - 1, int(count), worst, wit, ok,
            {"lambda0": _f(lam0)},
        )

    led = ledger if ledger is not None else (ledger_k1() if k == 1 else ledger_k2(epsilon))
    Cv = led.C if C is None else Fraction(C)
    ev = led["eps"] if eps is None else Fraction(eps)
    tgt = led["target"] if target is None else Fraction(target)
    consts = {"C": Cv, "eps": ev}
    spec = _spectral_report(X, k + 1, led.theta)
    base = dict(k=k, digest=X.digest, constants=consts, target=tgt, spectral=spec, seed=seed)
    if enforce_spectral and not spec.get("meets_theta", False):
        return IsoperimetryScan(mode="vacuous", candidates=0, in_hypothesis=0, worst=None,
                                witness=None, passed=True, **base)
    bound_frac = Cv * int(w.sum())
    bound = math.floor(bound_frac)
    T = _count_table(w, bound)
    total = int(T[0, bound]) - 1
    if total <= 0:
        return IsoperimetryScan(mode="vacuous", candidates=0, in_hypothesis=0, worst=None,
                                witness=None, passed=True, **base)
    if total <= limit:
        mode, cands = "exhaustive", _enumerate_bounded(w, bound)
    else:
        rng = np.random.default_rng(seed)
        mode, cands = "sampled", _sample_bounded(w, bound, T, rng, limit)
    wk = X.int_weights(k - 1)
    half = (1 + ev)
    seen = hits = 0
    worst, wbits = None, None
    for bits in cands:
        seen += 1
        phi = Cochain(X, k, bits)
        # cheap necessary condition before the exact local check
        loc = local_norms_int(phi, k - 1)
        if np.any(2 * loc * half.denominator > half.numerator * wk):
            continue
        if not is_eps_locally_minimal(phi, ev, cap):
            continue
        hits += 1
        n_phi = norm_int(X, k, bits)
        n_d = norm_int(X, k + 1, coboundary_bits(X, k, bits))
        ratio = Fraction(n_d, n_phi)
        if worst is None or ratio < worst or (ratio == worst and tuple(bits) < tuple(wbits)):
            worst, wbits = ratio, bits
    ok = worst is None or worst >= tgt
    return IsoperimetryScan(
        mode=mode if hits else "vacuous", candidates=seen, in_hypothesis=hits, worst=worst,
        witness=None if wbits is None else Cochain(X, k, wbits), passed=ok, **base,
    )


# ---------------------------------------------------------------------------
# degree-2 alternative
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class K2Alternative:
    """Which branch of the degree-2 dichotomy phi satisfies: ``S2`` (heavy
    vertex links carry the norm and the differential), ``thin`` or
    ``neither``."""

    case: str
    details: dict

    def to_dict(self) -> dict:
        return {"case": self.case, "details": self.details}


def verify_k2_alternative(
    X: WeightedComplex,
    phi: Cochain,
    ledger: ConstantsLedger,
    C2p=None,
    check_norm: bool = True,
) -> K2Alternative:
    """Heavy vertices are ``S2 = {v : ||phi_v|| > C1' m(X_v^(1))}``.  The S2
    branch needs S2 nonempty with

    * ``sum over S2 of ||phi_v|| >= 9/20 ||phi||`` and
    * ``||d phi|| >= sum over S2 of ||d_v phi_v|| - (11 eps2 / 9) sum over S2 of ||phi_v||``;

    otherwise the thin branch needs phi to be ``(1/3 + eps2/15, delta)``-thin.
    """
    if X.n <= 2:
        raise HypothesisNotMet("n > 2", f"n = {X.n}")
    if phi.k != 2:
        raise HypothesisNotMet("phi is a 2-cochain", f"k = {phi.k}")
    C1p, eps2, delta = ledger["C1p"], ledger["eps2"], ledger["delta"]
    bound = ledger["C2p"] if C2p is None else Fraction(C2p)
    size = norm_int(X, 2, phi.bits)
    if check_norm and Fraction(size, X.denom) > bound * total_weight(X, 2):
        raise HypothesisNotMet("||phi|| <= C2' m(X^(2))", f"||phi|| = {Fraction(size, X.denom)}")
    loc = local_norms_int(phi, 0)
    # m_v(X_v^(1)) = m(v) / 2
    half_mv = X.int_weights(0)
    heavy = loc * 2 * C1p.denominator > C1p.numerator * half_mv
    S2 = [X.cells(0)[i] for i in np.flatnonzero(heavy)]
    s_phi = int(loc[heavy].sum())
    s_dphi = int(local_differential_norms_int(phi, 0)[heavy].sum())
    dnorm = norm_int(X, 3, coboundary_bits(X, 2, phi.bits))
    mass_ok = 20 * s_phi >= 9 * size
    diff_ok = dnorm >= s_dphi - (11 * eps2 / 9) * s_phi
    details = {
        "S2": [list(v) for v in S2],
        "sum_phi_v": format_rational(Fraction(s_phi, X.denom)),
        "sum_dphi_v": format_rational(Fraction(s_dphi, X.denom)),
        "norm_phi": format_rational(Fraction(size, X.denom)),
        "norm_dphi": format_rational(Fraction(dnorm, X.denom)),
        "mass_ok": bool(mass_ok),
        "differential_ok": bool(diff_ok),
    }
    if S2 and mass_ok and diff_ok:
        return K2Alternative("S2", details)
    r = Fraction(1, 3) + eps2 / 15
    details["r"] = format_rational(r)
    if size == 0:
        details["r_star"] = None
        return K2Alternative("thin", details)
    rep = thinness(phi, delta)
    details["r_star"] = format_rational(rep.r_star)
    if rep.r_star >= r:
        return K2Alternative("thin", details)
    return K2Alternative("neither", details)
