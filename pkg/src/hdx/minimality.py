"""Minimality predicates, the epsilon-local minimization procedure, and
thin/thick classification of cochains."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hdx import _kernels, config
from hdx.complex_core import WeightedComplex, format_rational, link, total_weight
from hdx.errors import BadDimension, BadEpsilon, CapExceeded, HDXError, ZeroCochain
from hdx.f2_chains import (
    Cochain,
    coboundary_bits,
    local_norms_int,
    norm,
    norm_int,
    solve_preimage,
    subspace_basis,
)


def _coset_min(X: WeightedComplex, k: int, bits: np.ndarray, cap: int) -> tuple[int, np.ndarray]:
    """``(denom * least norm, lex-least minimizer)`` over ``bits + B^k``."""
    B = subspace_basis(X, k, "B")
    if B.dim >= 63 or (1 << B.dim) > cap:
        raise CapExceeded("coset enumeration", B.dim, cap)
    ptr, idx = B.generators_csr()
    best, vec = _kernels.active.span_min(np.ascontiguousarray(bits), ptr, idx, X.int_weights(k))
    return int(best), vec


def is_minimal(phi: Cochain, cap: int = config.ENUMERATION_CAP) -> bool:
    """``||phi|| <= ||phi - beta||`` for every coboundary beta."""
    best, _ = _coset_min(phi.X, phi.k, phi.bits, cap)
    return norm_int(phi.X, phi.k, phi.bits) <= best


def is_locally_minimal(phi: Cochain, cap: int = config.ENUMERATION_CAP) -> bool:
    """Every vertex localization is minimal in its link (minimal, for k = 0)."""
    if phi.k == 0:
        return is_minimal(phi, cap)
    if phi.k < 0:
        raise BadDimension("local minimality needs k >= 0")
    X = phi.X
    for v in X.cells(0):
        lk = link(X, v)
        local = phi.bits[X.star_embedding(v, phi.k)]
        if norm_int(lk, phi.k - 1, local) > _coset_min(lk, phi.k - 1, local, cap)[0]:
            return False
    return True


def _excess(phi: Cochain, tau, cap: int) -> tuple[Fraction, np.ndarray, np.ndarray]:
    """``||phi_tau|| - min over beta of ||phi_tau - beta||`` in the link of tau,
    with ``phi_tau`` and its lex-least coset minimizer."""
    X = phi.X
    lk = link(X, tau)
    kk = phi.k - len(tau)
    local = np.ascontiguousarray(phi.bits[X.star_embedding(tau, phi.k)])
    best, vec = _coset_min(lk, kk, local, cap)
    return Fraction(norm_int(lk, kk, local) - best, lk.denom), local, vec


def eps_slack(phi: Cochain, cap: int = config.ENUMERATION_CAP) -> Fraction:
    """Least epsilon for which phi is epsilon-locally minimal.

    For k >= 1 this is the largest ``excess(tau) / m(tau)`` over faces of
    dimension below k; for k = 0 it is ``2 ||phi|| / m(X^0) - 1``.
    """
    X, k = phi.X, phi.k
    if k == 0:
        return 2 * norm(phi) / total_weight(X, 0) - 1
    if not 1 <= k <= X.n:
        raise BadDimension(f"epsilon-local minimality needs 0 <= k <= {X.n}")
    worst = Fraction(0)
    for j in range(k):
        for tau, m in zip(X.cells(j), X.weights(j)):
            worst = max(worst, _excess(phi, tau, cap)[0] / m)
    return worst


def is_eps_locally_minimal(phi: Cochain, eps, cap: int = config.ENUMERATION_CAP) -> bool:
    eps = Fraction(eps)
    if eps < 0:
        raise BadEpsilon("epsilon must be non-negative")
    return _first_violation(phi, eps, cap) is None


def _first_violation(phi: Cochain, eps: Fraction, cap: int):
    X, k = phi.X, phi.k
    if k == 0:
        return () if 2 * norm(phi) > (1 + eps) * total_weight(X, 0) else None
    if not 1 <= k <= X.n:
        raise BadDimension(f"epsilon-local minimality needs 0 <= k <= {X.n}")
    for j in range(k):
        for tau, m in zip(X.cells(j), X.weights(j)):
            ex, local, vec = _excess(phi, tau, cap)
            if ex > eps * m:
                return tau, local, vec
    return None


@dataclass(frozen=True)
class Step:
    tau: tuple
    correction: Cochain
    decrease: Fraction

    def to_dict(self) -> dict:
        return {
            "j": len(self.tau) - 1,
            "tau": list(self.tau),
            "correction": self.correction.to_hex(),
            "decrease": format_rational(self.decrease),
        }


@dataclass
class MinimizationTrace:
    phi: Cochain
    psi: Cochain
    result: Cochain
    eps: Fraction
    steps: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": self.phi.k,
            "eps": format_rational(self.eps),
            "input": self.phi.to_hex(),
            "psi": self.psi.to_hex(),
            "output": self.result.to_hex(),
            "input_norm": format_rational(norm(self.phi)),
            "output_norm": format_rational(norm(self.result)),
            "psi_norm": format_rational(norm(self.psi)),
            "steps": [s.to_dict() for s in self.steps],
        }


def step_bound(phi: Cochain, eps) -> Fraction:
    """Upper bound on the number of correction steps: each one lowers the norm
    by more than ``eps * min m(tau)`` over ``tau`` in ``X^(k-1)``."""
    X = phi.X
    return norm(phi) / (Fraction(eps) * min(X.weights(phi.k - 1)))


def eps_local_minimize(phi: Cochain, eps, cap: int = config.ENUMERATION_CAP) -> MinimizationTrace:
    """Find psi with ``phi - d psi`` epsilon-locally minimal and
    ``||phi|| >= ||phi - d psi|| + eps ||psi||``.

    Each round takes the first violating face tau (by dimension, then
    canonical order), replaces ``phi_tau`` with its lex-least coset minimum,
    and pulls the change back to the lex-least link preimage, extended by zero
    off the star of tau.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise BadEpsilon("epsilon must be positive")
    X, k = phi.X, phi.k
    if not 0 <= k <= X.n:
        raise BadDimension(f"degree {k} outside [0, {X.n}]")
    cur = np.array(phi.bits, dtype=np.uint8)
    psi = np.zeros(X.num_cells(k - 1), np.uint8)
    steps = []
    limit = int(step_bound(phi, eps)) + 1
    while True:
        viol = _first_violation(Cochain(X, k, cur), eps, cap)
        if viol is None:
            break
        if len(steps) >= limit:
            raise HDXError("minimization exceeded its step bound")
        before = norm_int(X, k, cur)
        if k == 0:
            tau, local_psi = (), np.ones(1, np.uint8)
            emb = np.zeros(1, np.int64)
            lk = X
        else:
            tau, local, vec = viol
            lk = link(X, tau)
            kk = k - len(tau)
            local_psi = solve_preimage(lk, kk - 1, local ^ vec)
            emb = X.star_embedding(tau, k - 1)
        step_psi = np.zeros_like(psi)
        step_psi[emb] = local_psi
        psi ^= step_psi
        cur = cur ^ coboundary_bits(X, k - 1, step_psi)
        steps.append(
            Step(
                tau,
                Cochain(lk, k - len(tau) - 1, local_psi),
                Fraction(before - norm_int(X, k, cur), X.denom),
            )
        )
    return MinimizationTrace(phi, Cochain(X, k - 1, psi), Cochain(X, k, cur), eps, steps)


@dataclass(frozen=True)
class ThinnessReport:
    delta: Fraction
    thin: tuple
    r_star: Fraction

    def is_thin(self, r) -> bool:
        return self.r_star >= Fraction(r)

    def to_dict(self) -> dict:
        return {
            "delta": format_rational(self.delta),
            "thin": [list(t) for t in self.thin],
            "r_star": format_rational(self.r_star),
        }


def thinness(phi: Cochain, delta) -> ThinnessReport:
    """``A_delta = {tau in X^(k-1) : ||phi_tau|| <= delta m(tau)}`` and
    ``r_star = sum over A_delta of ||phi_tau|| / ((k+1) ||phi||)``."""
    delta = Fraction(delta)
    X, k = phi.X, phi.k
    if k < 1:
        raise BadDimension("thinness of faces needs k >= 1")
    total = norm_int(X, k, phi.bits)
    if total == 0:
        raise ZeroCochain("r_star is undefined for the zero cochain")
    loc = local_norms_int(phi, k - 1)
    w = X.int_weights(k - 1)
    mask = loc * delta.denominator <= delta.numerator * w
    cells = X.cells(k - 1)
    thin = tuple(cells[i] for i in np.flatnonzero(mask))
    return ThinnessReport(delta, thin, Fraction(int(loc[mask].sum()), (k + 1) * total))


def is_delta_thin_vertex_cochain(phi: Cochain, delta) -> bool:
    """``||phi|| <= delta m(X^0)`` for a 0-cochain."""
    if phi.k != 0:
        raise BadDimension("vertex thinness applies to 0-cochains")
    return norm(phi) <= Fraction(delta) * total_weight(phi.X, 0)
