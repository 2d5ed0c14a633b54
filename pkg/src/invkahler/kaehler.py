"""Momentum map, tautological symplectic form, Psi, metric and the Kähler verdict.

The inner product on g identifies covectors with vectors; covectors are kept
in gram coordinates (``sharp(a) = gram @ a``) so that pairing with a vector
is a plain dot product.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ad_calculus import COS, X_COT_X, dexp_left, eval_spectral
from .jstruct import (
    DEFAULT_STEP,
    INTEGRABILITY_TOL,
    FormPair,
    _regular_inverse,
    admissibility_check,
    j_at,
    maurer_cartan_residual,
    standard_pair,
)
from .lie_core import LieAlgebra, su2

DEFAULT_TAU = 1e-5
POSITIVITY_FLOOR = 1e-10
METRIC_CONSISTENCY = 1e-8

# d^theta mu (V) = V + COADJOINT_SIGN * [a, c(a) V]; pinned by _self_test
COADJOINT_SIGN = 1.0


class InternalConsistencyError(RuntimeError):
    """Two independent routes to the same geometric quantity disagree."""


def momentum(alg: LieAlgebra, a) -> np.ndarray:
    """Momentum at ``(e, a)``: the covector ``V -> a . V``."""
    return alg.sharp(np.asarray(a, float))


def _stencil_derivative(fn, z, k, h):
    # fourth-order central difference along coordinate k
    e = np.zeros_like(z)
    e[k] = h
    return (-fn(z + 2 * e) + 8 * fn(z + e) - 8 * fn(z - e) + fn(z - 2 * e)) / (12 * h)


def tautological_form(alg: LieAlgebra):
    """The tautological 1-form pulled back to the chart ``(t, b) -> (exp(t), b)``.

    Returns a function of the chart point ``z = (t, b)`` giving the ``2n``
    components of the form.  At ``t = 0`` the chart frame is the left
    trivialized frame ``(u, v)``.
    """
    n = alg.dim

    def theta(z):
        t, b = z[:n], z[n:]
        return np.concatenate([dexp_left(alg, t).T @ alg.gram @ b, np.zeros(n)])

    return theta


def symplectic_at(alg: LieAlgebra, a, h: float = DEFAULT_STEP) -> np.ndarray:
    """``omega = -d<mu, theta_G>`` at ``(e, a)`` by numerical exterior derivative."""
    n = alg.dim
    theta = tautological_form(alg)
    z = np.concatenate([np.zeros(n), np.asarray(a, float)])
    D = np.array([_stencil_derivative(theta, z, k, h) for k in range(2 * n)])  # D[k, l] = d_k theta_l
    return -(D - D.T)


def symplectic_closed_form(alg: LieAlgebra, a) -> np.ndarray:
    """``omega((u1,v1),(u2,v2)) = a.[u1,u2] + u1.v2 - v1.u2``."""
    a = np.asarray(a, float)
    G = alg.gram
    top = np.einsum("ijk,kl,l->ij", alg.structure_constants, G, a)
    return np.block([[top, G], [-G, np.zeros_like(G)]])


def momentum_condition_residual(alg: LieAlgebra, a, X, h: float = DEFAULT_STEP) -> float:
    """Residual of ``i_{X_P} omega = d<mu, X>`` at ``(e, a)``."""
    n = alg.dim
    a = np.asarray(a, float)
    X = np.asarray(X, float)
    omega = symplectic_at(alg, a, h)
    lhs = np.concatenate([X, np.zeros(n)]) @ omega

    def pairing(z):
        # <mu(exp(t), b), X> with mu(x, b) = Ad_x b
        t, b = z[:n], z[n:]
        x = alg.exp_c(t).matrix
        return np.array([alg.inner(alg.Ad(x, b), X)])

    z = np.concatenate([np.zeros(n), a])
    rhs = np.array([_stencil_derivative(pairing, z, k, h)[0] for k in range(2 * n)])
    return float(np.max(np.abs(lhs - rhs)))


def covariant_momentum(pair: FormPair, a) -> np.ndarray:
    """``d^theta mu`` at ``(e, a)`` as a map ``g -> g`` (fiber directions)."""
    alg = pair.algebra
    a = np.asarray(a, float)
    return np.eye(alg.dim) + COADJOINT_SIGN * alg.ad_matrix(a) @ pair.c(a)


@dataclass(frozen=True)
class PsiOperator:
    """``Psi`` at ``(e, a)`` as a gram-coordinate matrix: ``<X, Psi Y> = X @ matrix @ Y``."""

    base: np.ndarray
    matrix: np.ndarray

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh((self.matrix + self.matrix.T) / 2)))

    def is_symmetric(self, tol: float = 1e-8) -> bool:
        return self.asymmetry() <= tol * max(1.0, np.max(np.abs(self.matrix)))


def psi_at(pair: FormPair, a) -> PsiOperator:
    """``Psi = (d^theta mu) o s^-1``."""
    a = np.asarray(a, float)
    alg = pair.algebra
    s_inv = _regular_inverse(pair.s(a))
    return PsiOperator(a.copy(), alg.gram @ covariant_momentum(pair, a) @ s_inv)


def one_form_mu(pair: FormPair, which: str):
    """The real 1-form ``<mu, c>`` or ``<mu, s>`` on A_g as covector components."""
    alg = pair.algebra
    field_fn = {"c": pair.c, "s": pair.s}[which]

    def beta(a):
        a = np.asarray(a, float)
        return field_fn(a).T @ alg.gram @ a

    return beta


def exterior_derivative_at(one_form, a, h: float = DEFAULT_STEP) -> np.ndarray:
    """``d beta(e_j, e_k)`` at ``a`` by central differences."""
    a = np.asarray(a, float)
    n = len(a)
    D = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        D[j] = (one_form(a + e) - one_form(a - e)) / (2 * h)
    return D - D.T


def closedness_residual(one_form, sample, h: float = DEFAULT_STEP) -> float:
    """Max over the sample and basis pairs of ``|D_V beta(W) - D_W beta(V)|``."""
    return max(float(np.max(np.abs(exterior_derivative_at(one_form, a, h)))) for a in sample)


@dataclass(frozen=True)
class MetricTensor:
    base: np.ndarray
    matrix: np.ndarray

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh((self.matrix + self.matrix.T) / 2)))

    def is_positive(self) -> bool:
        return self.min_eigenvalue() > POSITIVITY_FLOOR


def _metric_pieces(pair: FormPair, a):
    alg = pair.algebra
    n = alg.dim
    a = np.asarray(a, float)
    c, s = pair.c_and_s(a)
    # theta(u, v) = u + c v ; L(u, v) = s v ; d^theta mu(u, v) = D v
    theta = np.hstack([np.eye(n), c])
    L = np.hstack([np.zeros((n, n)), s])
    D = np.hstack([np.zeros((n, n)), covariant_momentum(pair, a)])
    return alg, a, theta, L, D


def metric_at(pair: FormPair, a, *, check: bool = True, h: float = DEFAULT_STEP) -> MetricTensor:
    """``g = <Psi theta, theta> + <L, d^theta mu> + <mu, [L, theta]>`` at ``(e, a)``.

    With ``check`` the result is compared against ``omega(., J .)`` built
    from :func:`symplectic_at` and :func:`j_at`; a mismatch above 1e-8
    raises :class:`InternalConsistencyError`.
    """
    alg, a, theta, L, D = _metric_pieces(pair, a)
    P = psi_at(pair, a).matrix
    G = alg.gram
    first = theta.T @ P @ theta
    second = (G @ D).T @ L  # (xi, eta) -> L(eta) . d^theta mu(xi)
    # a.[L xi, theta eta] + a.[L eta, theta xi]
    ada = np.einsum("ijk,kl,l->ij", alg.structure_constants, G, a)  # a.[e_i, e_j]
    third = L.T @ ada @ theta
    g = first + second + third + third.T
    if check:
        other = symplectic_at(alg, a, h) @ j_at(pair, a).block_matrix
        gap = float(np.max(np.abs(g - other)))
        if gap > METRIC_CONSISTENCY * max(1.0, float(np.max(np.abs(g)))):
            raise InternalConsistencyError(f"metric formula and omega(., J .) differ by {gap:.3g}")
    return MetricTensor(a.copy(), g)


def metric_from_symplectic(pair: FormPair, a, h: float = DEFAULT_STEP) -> np.ndarray:
    """``omega(., J .)`` as a matrix."""
    return symplectic_at(pair.algebra, a, h) @ j_at(pair, a).block_matrix


def metric_constitutive(pair: FormPair, a) -> np.ndarray:
    """Metric with ``<L, d^theta mu>`` rewritten as ``<Psi^-1 d^theta mu, d^theta mu>``."""
    alg, a, theta, L, D = _metric_pieces(pair, a)
    G = alg.gram
    Pt = np.linalg.solve(G, psi_at(pair, a).matrix)  # Psi as a map g -> g
    Linv = np.linalg.solve(Pt, D)
    ada = np.einsum("ijk,kl,l->ij", alg.structure_constants, G, a)
    third = L.T @ ada @ theta
    return theta.T @ G @ Pt @ theta + (G @ D).T @ Linv + third + third.T


def compatibility_residual(pair: FormPair, a, h: float = DEFAULT_STEP) -> float:
    """``max |J^T omega J - omega|`` at ``(e, a)``."""
    omega = symplectic_at(pair.algebra, a, h)
    J = j_at(pair, a).block_matrix
    return float(np.max(np.abs(J.T @ omega @ J - omega)))


def potential_residual(pair: FormPair, F, sample, grad=None, h: float = DEFAULT_STEP) -> float:
    """Max over the sample of the dual-norm gap ``|dF - <mu, s>|``."""
    alg = pair.algebra
    beta = one_form_mu(pair, "s")
    G_inv = np.linalg.inv(alg.gram)
    worst = 0.0
    for a in sample:
        a = np.asarray(a, float)
        if grad is not None:
            dF = np.asarray(grad(a), float)
        else:
            dF = np.empty(len(a))
            for j in range(len(a)):
                e = np.zeros(len(a))
                e[j] = h
                dF[j] = (F(a + e) - F(a - e)) / (2 * h)
        w = dF - beta(a)
        worst = max(worst, float(np.sqrt(abs(w @ G_inv @ w))))
    return worst


KAHLER = "KAHLER"
PSEUDO_KAHLER = "PSEUDO_KAHLER"
NOT_KAHLER = "NOT_KAHLER"
INADMISSIBLE = "INADMISSIBLE"
NON_INTEGRABLE = "NON_INTEGRABLE"


@dataclass
class KaehlerReport:
    verdict: str
    residuals: dict = field(default_factory=dict)
    causes: list = field(default_factory=list)
    flags: list = field(default_factory=list)


def kaehler_verdict(
    pair: FormPair,
    sample,
    *,
    h: float = DEFAULT_STEP,
    tau: float = DEFAULT_TAU,
    integrability_tol: float = INTEGRABILITY_TOL,
) -> KaehlerReport:
    """Classify ``(J, omega)`` on the sample as Kähler, pseudo-Kähler or neither.

    Closedness is tested against ``tau * max(1, |a|)``; positivity by the
    smallest eigenvalue of the metric.
    """
    sample = [np.asarray(a, float) for a in sample]
    alg = pair.algebra
    res: dict = {}
    adm = admissibility_check(pair, sample)
    if not adm.passed:
        return KaehlerReport(INADMISSIBLE, res, ["s singular at %d point(s)" % len(adm.failures)])

    mc = [maurer_cartan_residual(pair, a, h, guard=False) for a in sample]
    res["maurer_cartan_real"] = max(m[0] for m in mc)
    res["maurer_cartan_imag"] = max(m[1] for m in mc)
    flags = []
    if res["maurer_cartan_imag"] <= integrability_tol < res["maurer_cartan_real"]:
        # imaginary part alone vanishing suffices for integrability of J, not for integrating to gamma
        flags.append("imaginary part of the Maurer-Cartan residual vanishes but the real part does not")
    if max(res["maurer_cartan_real"], res["maurer_cartan_imag"]) > integrability_tol:
        return KaehlerReport(NON_INTEGRABLE, res, ["maurer_cartan"], flags)

    causes = []
    for which in ("c", "s"):
        beta = one_form_mu(pair, which)
        key = f"closedness_mu_{which}"
        worst, scaled = 0.0, 0.0
        for a in sample:
            r = float(np.max(np.abs(exterior_derivative_at(beta, a, h))))
            worst = max(worst, r)
            scaled = max(scaled, r / max(1.0, alg.norm(a)))
        res[key] = worst
        if scaled > tau:
            causes.append(key)
    res["psi_asymmetry"] = max(psi_at(pair, a).asymmetry() for a in sample)
    if causes:
        return KaehlerReport(NOT_KAHLER, res, causes, flags)

    metrics = [metric_at(pair, a, h=h) for a in sample]
    res["metric_min_eigenvalue"] = min(m.min_eigenvalue() for m in metrics)
    res["compatibility"] = max(compatibility_residual(pair, a, h) for a in sample)
    if res["metric_min_eigenvalue"] <= POSITIVITY_FLOOR:
        return KaehlerReport(PSEUDO_KAHLER, res, ["metric_not_positive"], flags)
    return KaehlerReport(KAHLER, res, [], flags)


def _self_test() -> None:
    """Pin the coadjoint sign: ``d^theta mu = cos(ad a)`` for the standard pair."""
    alg = su2()
    a = np.array([0.3, -0.7, 0.5])
    got = covariant_momentum(standard_pair(alg), a)
    want = eval_spectral(alg, COS, a)
    if np.max(np.abs(got - want)) > 1e-9:
        raise InternalConsistencyError("coadjoint sign convention does not reproduce cos(ad a)")
    psi = psi_at(standard_pair(alg), a).matrix
    if np.max(np.abs(psi - alg.gram @ eval_spectral(alg, X_COT_X, a))) > 1e-9:
        raise InternalConsistencyError("Psi of the standard pair is not x cot x of ad a")


_self_test()
