"""Norm rescalings ``chi(a) = phi(|a|^2) a`` and the Kähler structures they induce.

A :class:`ScalingFunction` stores ``phi`` and ``phi'`` as functions of
``y = x^2``.  Composing the standard pair with ``chi`` gives

    c_chi(a) = c_st(chi(a)) dchi_a,   s_chi(a) = s_st(chi(a)) dchi_a,

whose ``gamma`` is ``exp(i chi(a))``.  Because ``chi(a)`` is parallel to ``a``,
``<mu, c_chi>`` vanishes identically and ``<mu, s_chi> = dF`` with
``F(a) = |a| chi(|a|) - Xi(|a|)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .ad_calculus import COSM1_OVER, SINC, eval_spectral_many
from .jstruct import FormPair
from .lie_core import LieAlgebra

SMALL_Y = 1e-6
QUAD_TOL = 1e-10


class ScalingDomainError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingFunction:
    """``phi(y)`` with ``y = x^2``, its derivative, and optionally ``Xi``.

    ``Xi`` is a primitive of ``chi`` with ``Xi(0) = 0``; when omitted it is
    computed by adaptive quadrature.  ``domain`` bounds ``|a|``.
    """

    name: str
    phi: Callable[[float], float]
    dphi: Callable[[float], float]
    Xi: Optional[Callable[[float], float]] = None
    domain: float = np.inf

    def chi(self, x: float) -> float:
        return x * self.phi(x * x)

    def dchi(self, x: float) -> float:
        y = x * x
        return self.phi(y) + 2 * y * self.dphi(y)

    def primitive(self, x: float) -> float:
        if self.Xi is not None:
            return self.Xi(x)
        val, err = quad(self.chi, 0.0, x, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        if not np.isfinite(val) or err > 10 * QUAD_TOL * max(1.0, abs(val)):
            raise ArithmeticError(f"quadrature of chi on [0, {x}] failed (error estimate {err:.3g})")
        return val

    def check_domain(self, r: float) -> None:
        if not r <= self.domain:
            raise ScalingDomainError(f"|a| = {r:.6g} outside the domain |a| <= {self.domain} of {self.name}")

    def validate(self, radius: float, n: int = 2001) -> None:
        """Check ``phi > 0`` and ``chi' != 0`` on a grid of ``[0, radius]``.

        This is a sampled guarantee; global injectivity of ``chi`` is not certified.
        """
        r = np.linspace(0.0, min(radius, self.domain), n)
        phi = np.array([self.phi(x * x) for x in r])
        if np.any(phi <= 0) or not np.all(np.isfinite(phi)):
            raise ScalingDomainError(f"phi of {self.name} is not positive on [0, {radius}]")
        dchi = np.array([self.dchi(x) for x in r])
        if np.any(dchi <= 0) or not np.all(np.isfinite(dchi)):
            raise ScalingDomainError(f"chi of {self.name} is not a local diffeomorphism on [0, {radius}]")


# -- shipped families -------------------------------------------------------


def identity_scaling() -> ScalingFunction:
    return ScalingFunction("identity", lambda y: 1.0, lambda y: 0.0, lambda x: x * x / 2)


def _arctan_phi(y):
    if y < SMALL_Y:
        return 1 - y / 3 + y * y / 5 - y ** 3 / 7
    r = np.sqrt(y)
    return np.arctan(r) / r


def _arctan_dphi(y):
    if y < SMALL_Y:
        return -1 / 3 + 2 * y / 5 - 3 * y * y / 7
    r = np.sqrt(y)
    return (r / (1 + y) - np.arctan(r)) / (2 * r * y)


def arctan_scaling() -> ScalingFunction:
    """``chi(x) = arctan(x)``; the image of ``chi`` is the open ball of radius pi/2."""
    return ScalingFunction(
        "arctan", _arctan_phi, _arctan_dphi, lambda x: x * np.arctan(x) - 0.5 * np.log1p(x * x)
    )


def _sinh_phi(y):
    if y < SMALL_Y:
        return 1 + y / 6 + y * y / 120 + y ** 3 / 5040
    r = np.sqrt(y)
    return np.sinh(r) / r


def _sinh_dphi(y):
    if y < SMALL_Y:
        return 1 / 6 + y / 60 + y * y / 1680
    r = np.sqrt(y)
    return (r * np.cosh(r) - np.sinh(r)) / (2 * r * y)


def sinh_scaling() -> ScalingFunction:
    """``chi(x) = sinh(x)``, restricted to ``|a| <= 5``."""
    return ScalingFunction("sinh", _sinh_phi, _sinh_dphi, lambda x: np.cosh(x) - 1, domain=5.0)


def polynomial_scaling(coeffs: Sequence[float], name: str = "polynomial", radius: float = 10.0) -> ScalingFunction:
    """``phi(y) = sum_k coeffs[k] y^k``, checked positive on ``|a| <= radius``."""
    c = np.asarray(coeffs, float)
    if c.ndim != 1 or len(c) == 0:
        raise ValueError("polynomial scaling needs a nonempty coefficient list")
    P = np.polynomial.Polynomial(c)
    dP = P.deriv()
    # Xi(x) = sum_k c_k x^(2k+2) / (2k+2)
    Xi_coef = np.zeros(2 * len(c) + 1)
    Xi_coef[2::2] = c / np.arange(2, 2 * len(c) + 1, 2)
    Xi = np.polynomial.Polynomial(Xi_coef)
    sf = ScalingFunction(name, lambda y: float(P(y)), lambda y: float(dP(y)), lambda x: float(Xi(x)))
    sf.validate(radius)
    return sf


FAMILIES = {"identity": identity_scaling, "arctan": arctan_scaling, "sinh": sinh_scaling}


def get_scaling(spec) -> ScalingFunction:
    """A shipped family by name, or a polynomial from ``{"coeffs": [...]}``."""
    if isinstance(spec, ScalingFunction):
        return spec
    if isinstance(spec, dict):
        if "coeffs" not in spec:
            raise ValueError("custom scaling needs a 'coeffs' entry")
        return polynomial_scaling(spec["coeffs"], spec.get("name", "polynomial"), spec.get("radius", 10.0))
    try:
        return FAMILIES[spec]()
    except KeyError:
        raise ValueError(f"unknown scaling family {spec!r}; known: {sorted(FAMILIES)}") from None


# -- chi on the algebra -----------------------------------------------------


def chi_map(sf: ScalingFunction, alg: LieAlgebra, a) -> np.ndarray:
    """``phi(|a|^2) a``."""
    a = np.asarray(a, float)
    y = alg.inner(a, a)
    sf.check_domain(np.sqrt(y))
    return sf.phi(y) * a


def dchi_at(sf: ScalingFunction, alg: LieAlgebra, a) -> np.ndarray:
    """Jacobian ``2 phi'(|a|^2) a (G a)^T + phi(|a|^2) Id``."""
    a = np.asarray(a, float)
    y = alg.inner(a, a)
    sf.check_domain(np.sqrt(y))
    return 2 * sf.dphi(y) * np.outer(a, alg.gram @ a) + sf.phi(y) * np.eye(len(a))


def scaled_pair(sf: ScalingFunction, alg: LieAlgebra) -> FormPair:
    """The pair of the polar map ``a -> exp(i chi(a))``."""

    def both(a):
        D = dchi_at(sf, alg, a)
        c, s = eval_spectral_many(alg, (COSM1_OVER, SINC), chi_map(sf, alg, a))
        return c @ D, s @ D

    def gamma(a):
        return alg.exp_c(np.zeros(alg.dim), chi_map(sf, alg, a)).matrix

    return FormPair(
        alg,
        lambda a: both(a)[0],
        lambda a: both(a)[1],
        provenance=f"rescaled:{sf.name}",
        gamma=gamma,
        meta={"scaling": sf.name},
        both=both,
    )


def f_potential(sf: ScalingFunction, alg: LieAlgebra, a) -> float:
    """``F(a) = |a| chi(|a|) - Xi(|a|)``; ``2F`` is a Kähler potential."""
    r = alg.norm(a)
    sf.check_domain(r)
    return r * sf.chi(r) - sf.primitive(r)


def f_gradient(sf: ScalingFunction, alg: LieAlgebra, a) -> np.ndarray:
    """Covector ``dF_a = chi'(|a|) G a``."""
    a = np.asarray(a, float)
    r = alg.norm(a)
    sf.check_domain(r)
    return sf.dchi(r) * (alg.gram @ a)


# -- rescaling by general invariants -----------------------------------------


def norm_squared_invariant(alg: LieAlgebra, a) -> np.ndarray:
    return np.array([alg.inner(a, a)])


@dataclass(frozen=True)
class InvariantScaling:
    """``chi(a) = phi(a, inv(a)) a`` for a user callback ``phi``.

    ``invariants`` maps a point to an array of Ad-invariant values; only
    ``|a|^2`` ships.  The Jacobian is taken by central differences, so pairs
    built from it are marked non-analytic.
    """

    name: str
    phi: Callable[[np.ndarray, np.ndarray], float]
    invariants: Callable[[LieAlgebra, np.ndarray], np.ndarray] = norm_squared_invariant
    h: float = 1e-6

    def chi(self, alg: LieAlgebra, a) -> np.ndarray:
        a = np.asarray(a, float)
        return float(self.phi(a, self.invariants(alg, a))) * a

    def jacobian(self, alg: LieAlgebra, a) -> np.ndarray:
        a = np.asarray(a, float)
        cols = []
        for j in range(len(a)):
            e = np.zeros(len(a))
            e[j] = self.h
            cols.append((self.chi(alg, a + e) - self.chi(alg, a - e)) / (2 * self.h))
        return np.array(cols).T


def invariant_scaled_pair(isf: InvariantScaling, alg: LieAlgebra) -> FormPair:
    def both(a):
        D = isf.jacobian(alg, a)
        c, s = eval_spectral_many(alg, (COSM1_OVER, SINC), isf.chi(alg, a))
        return c @ D, s @ D

    def gamma(a):
        return alg.exp_c(np.zeros(alg.dim), isf.chi(alg, a)).matrix

    return FormPair(
        alg, lambda a: both(a)[0], lambda a: both(a)[1],
        provenance=f"rescaled:{isf.name}", gamma=gamma, analytic=False, both=both,
    )
