"""Integration of ``phi = c + i s`` to ``gamma`` and the generalized polar map.

``gamma`` solves ``(d gamma) gamma^-1 = phi`` and is obtained by fixed-step
RK4 along straight segments from the origin.  The polar map is
``Pi(x, a) = x gamma(a)``.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .jstruct import DEFAULT_STEP, FormPair, RegularityError, j_at
from .kaehler import symplectic_at
from .lie_core import GroupElement

DEFAULT_STEPS = 1000


class IntegrationError(ArithmeticError):
    pass


class GammaIntegrator:
    """Integrates ``phi`` of a :class:`FormPair` to ``gamma`` with a fixed-step RK4.

    ``base_value`` fixes the constant of integration ``gamma(0)``; by default
    it is the pair's closed form at 0 when one is attached, else the
    identity.  Results are memoized per point.
    """

    def __init__(self, pair: FormPair, steps: int = DEFAULT_STEPS, base_value=None, check_regularity: bool = True):
        if steps < 1:
            raise ValueError("steps must be positive")
        self.pair = pair
        self.steps = int(steps)
        self.check_regularity = check_regularity
        alg = pair.algebra
        if base_value is None:
            base_value = pair.gamma(np.zeros(alg.dim)) if pair.gamma is not None else np.eye(alg.rep_dim)
        self.base_value = np.asarray(base_value, dtype=complex)
        self._cache: dict = {}

    def _generator(self, p, direction):
        alg = self.pair.algebra
        c, s = self.pair.c_and_s(p)
        if self.check_regularity and not abs(np.linalg.det(s)) > 1e-10 * np.linalg.norm(s) ** alg.dim:
            raise RegularityError(f"s is singular on the integration path at {p}")
        return alg.to_matrix(c @ direction + 1j * (s @ direction))

    def segment(self, start, end, g0) -> np.ndarray:
        """Transport ``g0`` from ``start`` to ``end`` along the straight segment."""
        start = np.asarray(start, float)
        d = np.asarray(end, float) - start
        n = self.steps
        dt = 1.0 / n
        g = np.array(g0, dtype=complex)
        k_next = self._generator(start, d)
        for i in range(n):
            t = i * dt
            k1 = k_next
            k23 = self._generator(start + (t + dt / 2) * d, d)
            k_next = self._generator(start + (t + dt) * d, d)
            y1 = k1 @ g
            y2 = k23 @ (g + dt / 2 * y1)
            y3 = k23 @ (g + dt / 2 * y2)
            y4 = k_next @ (g + dt * y3)
            g = g + dt / 6 * (y1 + 2 * y2 + 2 * y3 + y4)
        return g

    def path(self, waypoints) -> np.ndarray:
        """``gamma`` at the last waypoint, integrated through all waypoints from the origin."""
        alg = self.pair.algebra
        pts = [np.zeros(alg.dim)] + [np.asarray(w, float) for w in waypoints]
        g = self.base_value
        for p, q in zip(pts[:-1], pts[1:]):
            g = self.segment(p, q, g)
        return g

    def __call__(self, a) -> np.ndarray:
        a = np.asarray(a, float)
        key = a.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            hit = self.segment(np.zeros_like(a), a, self.base_value) if np.any(a) else self.base_value.copy()
            self._cache[key] = hit
        return hit


def integrate_gamma(pair: FormPair, a, steps: int = DEFAULT_STEPS, base_value=None, verify: bool = False) -> GroupElement:
    """``gamma(a)`` along the ray from the origin.

    With ``verify`` the result is recomputed at twice the step count and an
    :class:`IntegrationError` is raised when the two disagree beyond 1e-6.
    """
    g = GammaIntegrator(pair, steps, base_value)(a)
    if verify:
        g2 = GammaIntegrator(pair, 2 * steps, base_value)(a)
        gap = float(np.max(np.abs(g - g2)))
        if gap > 1e-6 * max(1.0, float(np.max(np.abs(g)))):
            raise IntegrationError(f"step halving changed gamma by {gap:.3g}")
    return GroupElement(g)


def path_independence_residual(pair: FormPair, a, waypoint, steps: int = DEFAULT_STEPS, base_value=None) -> float:
    """Gap between ``gamma(a)`` along the ray and along the path via ``waypoint``."""
    integ = GammaIntegrator(pair, steps, base_value)
    return float(np.max(np.abs(integ(a) - integ.path([waypoint, a]))))


def _integrator(pair, integrator):
    return integrator if integrator is not None else GammaIntegrator(pair)


def polar_map(pair: FormPair, x, a, integrator: GammaIntegrator | None = None) -> GroupElement:
    """``Pi(x, a) = x gamma(a)``."""
    if isinstance(x, GroupElement) and not x.real_form:
        raise ValueError("polar_map expects x in the compact group")
    return GroupElement(np.asarray(x) @ _integrator(pair, integrator)(a))


def polar_differential(pair: FormPair, x, a, h: float = DEFAULT_STEP, integrator=None) -> np.ndarray:
    """``dPi`` at ``(x, a)`` on the basis tangent vectors, by central differences.

    Entry ``k`` is the derivative along ``t -> (x exp(t u), a + t v)`` for the
    ``k``-th basis vector of the stacked ``(u, v)``.
    """
    alg = pair.algebra
    n = alg.dim
    integ = _integrator(pair, integrator)
    x = np.asarray(x, dtype=complex)
    a = np.asarray(a, float)
    g_a = integ(a)
    out = []
    for k in range(2 * n):
        if k < n:
            U = alg.rep_basis[k]
            plus = x @ scipy.linalg.expm(h * U) @ g_a
            minus = x @ scipy.linalg.expm(-h * U) @ g_a
        else:
            e = np.zeros(n)
            e[k - n] = h
            plus = x @ integ(a + e)
            minus = x @ integ(a - e)
        out.append((plus - minus) / (2 * h))
    return np.array(out)


def holomorphy_residual(pair: FormPair, x, a, h: float = DEFAULT_STEP, integrator=None) -> float:
    """``max_xi |dPi(J xi) - i dPi(xi)|`` over the basis tangent vectors."""
    dPi = polar_differential(pair, x, a, h, integrator)
    J = j_at(pair, a).block_matrix
    dPi_J = np.einsum("lk,lab->kab", J, dPi)  # dPi(J e_k) = sum_l J[l, k] dPi(e_l)
    gap = dPi_J - 1j * dPi
    return float(np.max(np.linalg.norm(gap, axis=(1, 2))))


def polar_coordinates(alg, g) -> tuple[np.ndarray, np.ndarray]:
    """Split ``g = y exp(i b)`` with ``y`` unitary; returns ``(y, b)``."""
    y, p = scipy.linalg.polar(np.asarray(g, dtype=complex), side="right")
    w, V = np.linalg.eigh((p + p.conj().T) / 2)
    log_p = (V * np.log(w)) @ V.conj().T
    return y, alg.from_matrix(-1j * log_p)


def _fiber_logderivatives(integ, a, h):
    """``Phi_j = (d_j gamma) gamma^-1`` at ``a`` by central differences of the integrated ``gamma``."""
    n = len(a)
    g_inv = np.linalg.inv(integ(a))
    out = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        out.append((integ(a + e) - integ(a - e)) / (2 * h) @ g_inv)
    return out


def moment_pullback_defect(pair: FormPair, a, h: float = DEFAULT_STEP, integrator=None) -> np.ndarray:
    """``Pi^* omega_st - omega`` at ``(e, a)`` with ``mu`` carried along ``Pi``.

    ``omega_st = -d<mu, theta_st>`` where ``theta_st`` is the real part of the
    right Maurer-Cartan form of the complexification.  Pulled back by ``Pi``
    the difference to ``omega`` lives in the fiber block and equals
    ``-d beta`` with ``beta(V) = a . Re((d_V gamma) gamma^-1)``.  With
    ``Phi_j = (d_j gamma) gamma^-1``,

        d beta(e_j, e_k) = e_j . Re Phi_k - e_k . Re Phi_j + a . Re [Phi_j, Phi_k].
    """
    alg = pair.algebra
    n = alg.dim
    a = np.asarray(a, float)
    Phi = _fiber_logderivatives(_integrator(pair, integrator), a, h)
    G = alg.gram
    re = np.array([alg.complex_from_matrix(P).real for P in Phi])  # re[j] = Re Phi_j
    db = np.empty((n, n))
    for j in range(n):
        for k in range(n):
            comm = alg.complex_from_matrix(Phi[j] @ Phi[k] - Phi[k] @ Phi[j]).real
            db[j, k] = G[j] @ re[k] - G[k] @ re[j] + a @ G @ comm
    out = np.zeros((2 * n, 2 * n))
    out[n:, n:] = -db
    return out


def symplecto_residual(pair: FormPair, a, h: float = DEFAULT_STEP, integrator=None, mode: str = "moment") -> float:
    """``max |Pi^* omega_st - omega|`` at ``(e, a)``.

    ``mode="moment"`` keeps the momentum of the source along ``Pi`` (see
    :func:`moment_pullback_defect`); it vanishes exactly when ``<mu, c>`` is
    closed.  ``mode="polar"`` pulls back the standard form itself through
    the ordinary polar decomposition ``Pi(x, a) = y exp(i b)``; for the
    standard pair the two agree, for a rescaling ``b = chi(a)`` they do not.
    """
    if mode == "moment":
        return float(np.max(np.abs(moment_pullback_defect(pair, a, h, integrator))))
    if mode != "polar":
        raise ValueError(f"unknown mode {mode!r}")
    alg = pair.algebra
    n = alg.dim
    integ = _integrator(pair, integrator)
    a = np.asarray(a, float)
    y0, b0 = polar_coordinates(alg, integ(a))
    y0_inv = np.linalg.inv(y0)
    T = np.empty((2 * n, 2 * n))
    for k in range(2 * n):
        ends = []
        for sign in (1, -1):
            if k < n:
                g = scipy.linalg.expm(sign * h * alg.rep_basis[k]) @ integ(a)
            else:
                e = np.zeros(n)
                e[k - n] = sign * h
                g = integ(a + e)
            ends.append(polar_coordinates(alg, g))
        (yp, bp), (ym, bm) = ends
        T[:n, k] = alg.from_matrix(y0_inv @ (yp - ym) / (2 * h))
        T[n:, k] = (bp - bm) / (2 * h)
    pulled = T.T @ symplectic_at(alg, b0, h) @ T
    return float(np.max(np.abs(pulled - symplectic_at(alg, a, h))))


def twisted_gamma(pair: FormPair, z, a, integrator=None) -> np.ndarray:
    """``z gamma(Ad_{z^-1} a) z^-1``."""
    alg = pair.algebra
    integ = _integrator(pair, integrator)
    z = np.asarray(z, dtype=complex)
    z_inv = np.linalg.inv(z)
    return z @ integ(alg.Ad(z_inv, np.asarray(a, float))) @ z_inv


def quasi_equivariance_constant(pair: FormPair, z, a, integrator=None) -> np.ndarray:
    """``gamma(a)^-1 z gamma(Ad_{z^-1} a) z^-1``; independent of ``a`` for biinvariant structures."""
    integ = _integrator(pair, integrator)
    return np.linalg.solve(integ(a), twisted_gamma(pair, z, a, integ))


def quasi_equivariance_residual(pair: FormPair, z, a1, a2, integrator=None) -> float:
    integ = _integrator(pair, integrator)
    q1 = quasi_equivariance_constant(pair, z, a1, integ)
    q2 = quasi_equivariance_constant(pair, z, a2, integ)
    return float(np.max(np.abs(q1 - q2)))
