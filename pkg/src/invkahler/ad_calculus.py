"""Analytic functions of ``ad(a)``.

Four named functions enter the standard structure and its Kähler data::

    sinc        sin(x)/x
    cosm1_over  (cos(x) - 1)/x
    cos         cos(x)
    x_cot_x     x cot(x)

Each can be evaluated by its power series in ``ad(a)`` or on the spectrum of
``ad(a)``.  For a compact algebra ``ad(a)`` is skew for the invariant inner
product, so its spectrum is ``{-i mu}`` with ``mu`` real and the spectral
route only ever evaluates ``sinh``, ``cosh`` and ``coth`` at real arguments.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import zeta

KINDS = ("sinc", "cosm1_over", "cos", "x_cot_x", "custom")

SERIES_TOL = 1e-16
SERIES_CAP = 200
SMALL_EIG = 1e-8


class SeriesDivergence(ArithmeticError):
    """The truncated power series did not converge within the term cap."""


@dataclass(frozen=True)
class AdFunction:
    """An even (or ``ad`` times even) analytic function of ``ad(a)``.

    ``custom_series`` holds coefficients ``c_j`` of ``sum_j c_j x^(2j)``.
    """

    kind: str
    custom_series: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown AdFunction kind {self.kind!r}")
        if self.kind == "custom" and not self.custom_series:
            raise ValueError("custom AdFunction needs custom_series coefficients")

    @property
    def odd(self) -> bool:
        return self.kind == "cosm1_over"

    def coefficient(self, j: int) -> float:
        """Coefficient of ``x^(2j)`` in the even factor of the series."""
        if self.kind == "sinc":
            return (-1) ** j / factorial(2 * j + 1)
        if self.kind == "cos":
            return (-1) ** j / factorial(2 * j)
        if self.kind == "cosm1_over":
            # (cos x - 1)/x = x * sum_j (-1)^(j+1) x^(2j) / (2j+2)!
            return (-1) ** (j + 1) / factorial(2 * j + 2)
        if self.kind == "x_cot_x":
            # x cot x = 1 - 2 sum_{k>=1} zeta(2k) (x/pi)^(2k)
            return 1.0 if j == 0 else -2.0 * zeta(2 * j) / np.pi ** (2 * j)
        cs = self.custom_series
        return float(cs[j]) if j < len(cs) else 0.0

    def on_imaginary_axis(self, mu: np.ndarray) -> np.ndarray:
        """Value of the scalar function at ``x = -i mu`` for real ``mu``."""
        mu = np.asarray(mu, dtype=float)
        small = np.abs(mu) < SMALL_EIG
        safe = np.where(small, 1.0, mu)
        m2 = mu * mu
        if self.kind == "sinc":
            val = np.sinh(safe) / safe
            taylor = 1 + m2 / 6 + m2 * m2 / 120
        elif self.kind == "cos":
            return np.cosh(mu).astype(complex)
        elif self.kind == "cosm1_over":
            val = 1j * (np.cosh(safe) - 1) / safe
            taylor = 1j * (mu / 2 + mu * m2 / 24)
        elif self.kind == "x_cot_x":
            val = safe / np.tanh(safe)
            taylor = 1 + m2 / 3 - m2 * m2 / 45
        else:
            x2 = -m2
            return np.polynomial.polynomial.polyval(x2, np.asarray(self.custom_series, float)).astype(complex)
        return np.where(small, taylor, val).astype(complex)


SINC = AdFunction("sinc")
COSM1_OVER = AdFunction("cosm1_over")
COS = AdFunction("cos")
X_COT_X = AdFunction("x_cot_x")
NAMED = {f.kind: f for f in (SINC, COSM1_OVER, COS, X_COT_X)}


def _as_function(f) -> AdFunction:
    return NAMED[f] if isinstance(f, str) else f


def series_of_matrix(f, ad: np.ndarray, *, tol: float = SERIES_TOL, cap: int = SERIES_CAP) -> np.ndarray:
    """Truncated power series of ``f`` at the matrix ``ad``.

    Terms are added until a term's norm drops below ``tol`` relative to the
    partial sum; raises :class:`SeriesDivergence` after ``cap`` terms.
    """
    f = _as_function(f)
    n = ad.shape[0]
    ad2 = ad @ ad
    power = np.eye(n)
    total = np.zeros((n, n))
    for j in range(cap):
        if f.kind == "custom" and j >= len(f.custom_series):
            break
        term = f.coefficient(j) * power
        total = total + term
        if j > 0 and np.max(np.abs(term)) <= tol * max(1.0, np.max(np.abs(total))):
            break
        power = power @ ad2
    else:
        raise SeriesDivergence(f"{f.kind} series did not converge in {cap} terms")
    return ad @ total if f.odd else total


def _skew_eig(ad, L):
    # ad is gram-skew; K = L^T ad L^-T is skew-symmetric with K = U diag(-i mu) U*
    K = L.T @ ad @ np.linalg.inv(L.T)
    K = (K - K.T) / 2
    return np.linalg.eigh(1j * K)


def _spectral_values(fs, ad, L):
    mu, U = _skew_eig(ad, L)
    out = []
    for f in fs:
        fK = (U * f.on_imaginary_axis(mu)) @ U.conj().T
        scale = max(1.0, float(np.max(np.abs(fK.real))))
        if np.max(np.abs(fK.imag)) > 1e-10 * scale:
            raise np.linalg.LinAlgError("spectral evaluation left a non-negligible imaginary part")
        out.append(np.linalg.solve(L.T, fK.real @ L.T))
    return out


def spectral_of_matrix(f, ad: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on the spectrum of a gram-skew matrix ``ad``."""
    return _spectral_values([_as_function(f)], ad, np.linalg.cholesky(gram))[0]


def scalar_of_matrix(fn: Callable[[np.ndarray], np.ndarray], ad: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Apply an arbitrary complex scalar function to a gram-skew matrix.

    ``fn`` receives the eigenvalues ``-i mu`` and must handle ``mu = 0``.
    The result may be complex.
    """
    L = np.linalg.cholesky(gram)
    mu, U = _skew_eig(ad, L)
    fK = (U * fn(-1j * mu)) @ U.conj().T
    return np.linalg.solve(L.T, fK @ L.T)


def eval_series(alg, f, a) -> np.ndarray:
    """Power-series value of ``f(ad(a))``."""
    return series_of_matrix(f, alg.ad_matrix(a))


def eval_spectral(alg, f, a) -> np.ndarray:
    """Spectral value of ``f(ad(a))``."""
    return _spectral_values([_as_function(f)], alg.ad_matrix(a), alg._cholesky)[0]


def eval_spectral_many(alg, fs, a) -> list:
    """Several functions of ``ad(a)`` from a single eigendecomposition."""
    return _spectral_values([_as_function(f) for f in fs], alg.ad_matrix(a), alg._cholesky)


def eval_ad(alg, f, a, method: str = "spectral") -> np.ndarray:
    if method == "spectral":
        return eval_spectral(alg, f, a)
    if method == "series":
        return eval_series(alg, f, a)
    raise ValueError(f"unknown evaluation method {method!r}")


def sinc_invertibility(alg, a, tol: float = 1e-12) -> tuple[bool, float]:
    """Whether ``sin(ad a)/ad a`` is invertible, with its condition number."""
    S = eval_spectral(alg, SINC, a)
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[-1] <= tol * sv[0]:
        return False, float("inf")
    return True, float(sv[0] / sv[-1])


def dexp_right(alg, X) -> np.ndarray:
    """Matrix of ``Y -> (d/dt exp(X + tY)) exp(-X)`` at ``t = 0``, i.e. ``(e^ad - 1)/ad``."""

    def fn(x):
        small = np.abs(x) < SMALL_EIG
        safe = np.where(small, 1.0, x)
        return np.where(small, 1 + x / 2 + x * x / 6, np.expm1(safe) / safe)

    return scalar_of_matrix(fn, alg.ad_matrix(X), alg.gram).real


def dexp_left(alg, X) -> np.ndarray:
    """Matrix of ``Y -> exp(-X) (d/dt exp(X + tY))`` at ``t = 0``, i.e. ``(1 - e^-ad)/ad``."""

    def fn(x):
        small = np.abs(x) < SMALL_EIG
        safe = np.where(small, 1.0, x)
        return np.where(small, 1 - x / 2 + x * x / 6, -np.expm1(-safe) / safe)

    return scalar_of_matrix(fn, alg.ad_matrix(X), alg.gram).real
