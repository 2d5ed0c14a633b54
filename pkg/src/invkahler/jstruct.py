"""Admissible almost complex structures on G x A_g from a pair (c, s).

All computations happen at points ``(e, a)`` in the left trivialization; a
tangent vector there is a pair ``(u, v)`` of a group direction ``u`` and a
fiber direction ``v``, stacked as a single ``2n`` vector.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .ad_calculus import COSM1_OVER, SINC, eval_ad, eval_spectral_many
from .lie_core import LieAlgebra

DEFAULT_STEP = 1e-4
INTEGRABILITY_TOL = 1e-4
MAX_CONDITION = 1e8


class RegularityError(ValueError):
    """``s(a)`` is singular (or too badly conditioned) at the queried point."""


class StepTooSmall(ArithmeticError):
    """Finite-difference residual blew up when halving the step."""


@dataclass(frozen=True, eq=False)
class FormPair:
    """End(g)-valued fields ``c`` and ``s`` on A_g, with ``phi = c + i s``.

    ``gamma`` is an optional closed-form map with ``(d gamma) gamma^-1 = phi``,
    used as an oracle and to fix the integration constant.
    """

    algebra: LieAlgebra
    c: Callable[[np.ndarray], np.ndarray]
    s: Callable[[np.ndarray], np.ndarray]
    provenance: str = "custom"
    gamma: Optional[Callable[[np.ndarray], np.ndarray]] = None
    analytic: bool = True
    meta: dict = field(default_factory=dict)
    both: Optional[Callable[[np.ndarray], tuple]] = None

    def phi(self, a) -> np.ndarray:
        c, s = self.c_and_s(a)
        return c + 1j * s

    def c_and_s(self, a) -> tuple[np.ndarray, np.ndarray]:
        if self.both is not None:
            return self.both(a)
        return self.c(a), self.s(a)


def standard_pair(alg: LieAlgebra, method: str = "spectral") -> FormPair:
    """The pair of the ordinary polar map ``a -> exp(i a)``."""

    def gamma(a):
        return alg.exp_c(np.zeros(alg.dim), a).matrix

    def both(a):
        return tuple(eval_spectral_many(alg, (COSM1_OVER, SINC), a))

    return FormPair(
        alg,
        lambda a: eval_ad(alg, COSM1_OVER, a, method),
        lambda a: eval_ad(alg, SINC, a, method),
        provenance="standard",
        gamma=gamma,
        both=both if method == "spectral" else None,
    )


def constant_pair(alg: LieAlgebra, c=None, s=None) -> FormPair:
    n = alg.dim
    c = np.zeros((n, n)) if c is None else np.asarray(c, float)
    s = np.eye(n) if s is None else np.asarray(s, float)
    return FormPair(alg, lambda a: c, lambda a: s, provenance="custom", meta={"constant": True})


def load_table_pair(source, alg: LieAlgebra) -> FormPair:
    """FormPair sampled on a tensor grid, multilinearly interpolated.

    The document holds ``points`` (one list of grid coordinates per algebra
    axis) and ``c_matrices`` / ``s_matrices`` of shape ``grid + (n, n)``.
    """
    doc = json.loads(Path(source).read_text()) if isinstance(source, (str, Path)) else source
    axes = [np.asarray(ax, float) for ax in doc["points"]]
    if len(axes) != alg.dim:
        raise ValueError(f"table needs {alg.dim} grid axes, got {len(axes)}")
    cm = np.asarray(doc["c_matrices"], float)
    sm = np.asarray(doc["s_matrices"], float)
    shape = tuple(len(ax) for ax in axes) + (alg.dim, alg.dim)
    if cm.shape != shape or sm.shape != shape:
        raise ValueError(f"table matrices must have shape {shape}")
    ci = RegularGridInterpolator(axes, cm, method="linear")
    si = RegularGridInterpolator(axes, sm, method="linear")
    return FormPair(
        alg, lambda a: ci(np.asarray(a)[None])[0], lambda a: si(np.asarray(a)[None])[0],
        provenance="custom", analytic=False, meta={"table": True},
    )


@dataclass(frozen=True)
class JOperator:
    """``J`` at ``(e, a)`` as a ``2n x 2n`` matrix on stacked ``(u, v)``."""

    base: np.ndarray
    block_matrix: np.ndarray

    def __call__(self, u, v) -> tuple[np.ndarray, np.ndarray]:
        n = len(u)
        out = self.block_matrix @ np.concatenate([u, v])
        return out[:n], out[n:]

    def square_residual(self) -> float:
        M = self.block_matrix
        return float(np.max(np.abs(M @ M + np.eye(len(M)))))


def _regular_inverse(s: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(s)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise RegularityError(f"s(a) is singular (condition number {cond:.3g})")
    return np.linalg.inv(s)


def j_matrix(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Block matrix of ``J(u, v) = (-s v - c w, w)`` with ``w = s^-1 (u + c v)``."""
    si = _regular_inverse(s)
    csi = c @ si
    return np.block([[-csi, -s - csi @ c], [si, si @ c]])


def j_at(pair: FormPair, a) -> JOperator:
    a = np.asarray(a, float)
    return JOperator(a.copy(), j_matrix(*pair.c_and_s(a)))


# -- integrability ---------------------------------------------------------


def _directional_derivatives(field_fn, a, h):
    """Central differences of a matrix field along each basis direction.

    Returns an array ``D`` with ``D[j] = d/da_j field(a)``.
    """
    n = len(a)
    out = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        out.append((field_fn(a + e) - field_fn(a - e)) / (2 * h))
    return np.array(out)


def _exterior(D):
    """``d beta(e_j, e_k) = D_j beta(e_k) - D_k beta(e_j)`` as array ``[j, k, :]``."""
    # D[j][:, k] is D_j beta(e_k)
    t = D.transpose(0, 2, 1)
    return t - t.transpose(1, 0, 2)


def _pair_brackets(alg, X, Y):
    """``[X e_j, Y e_k]`` for all basis pairs, as ``[j, k, :]``."""
    return np.einsum("aj,bk,abl->jkl", X, Y, alg.structure_constants)


def _gram_norms(alg, vals):
    vals = np.asarray(vals)
    return np.sqrt(np.abs(np.einsum("...i,ij,...j->...", vals, alg.gram, vals)))


def _mc_components(pair: FormPair, a, h):
    alg = pair.algebra
    a = np.asarray(a, float)
    Phi = pair.phi(a)
    D = _directional_derivatives(pair.phi, a, h)
    # d phi + phi ^- phi, with [.,.]^- the negated bracket
    R = _exterior(D) - _pair_brackets(alg, Phi, Phi)
    return np.max(_gram_norms(alg, R.real)), np.max(_gram_norms(alg, R.imag))


def maurer_cartan_residual(pair: FormPair, a, h: float = DEFAULT_STEP, guard: bool = True) -> tuple[float, float]:
    """Norms of the real and imaginary parts of ``d phi + phi ^- phi``.

    With ``guard`` the residual is recomputed at ``h/2``; a blow-up by more
    than a factor 10 raises :class:`StepTooSmall`.
    """
    re, im = _mc_components(pair, a, h)
    if guard:
        re2, im2 = _mc_components(pair, a, h / 2)
        for r1, r2 in ((re, re2), (im, im2)):
            if r2 > 10 * r1 and r2 > 1e-12:
                raise StepTooSmall(f"residual grew from {r1:.3g} to {r2:.3g} when halving h={h:g}")
    return float(re), float(im)


def split_integrability_residuals(pair: FormPair, a, h: float = DEFAULT_STEP) -> tuple[float, float]:
    """Curvature residual ``dc + c^-c - s^-s`` and covariant residual of ``s``."""
    alg = pair.algebra
    a = np.asarray(a, float)
    c, s = pair.c_and_s(a)
    Dc = _directional_derivatives(pair.c, a, h)
    Ds = _directional_derivatives(pair.s, a, h)
    curv = _exterior(Dc) - _pair_brackets(alg, c, c) + _pair_brackets(alg, s, s)
    cs = _pair_brackets(alg, c, s)  # [c e_j, s e_k]
    cov = _exterior(Ds) - cs + cs.transpose(1, 0, 2)
    return float(np.max(_gram_norms(alg, curv))), float(np.max(_gram_norms(alg, cov)))


def nijenhuis_residual(pair: FormPair, a, h: float = DEFAULT_STEP) -> float:
    """Max norm of the Nijenhuis tensor of ``J`` on the frame pairs.

    The frame is the left-invariant fields ``X_i`` and the constant fiber
    fields ``d_j``; ``[X_i, X_j] = [e_i, e_j]`` and every other frame bracket
    vanishes.  ``J`` has constant coefficients along G, so only fiber
    derivatives of its coefficients enter.
    """
    alg = pair.algebra
    n = alg.dim
    a = np.asarray(a, float)
    M = j_at(pair, a).block_matrix
    dM = _directional_derivatives(lambda b: j_at(pair, b).block_matrix, a, h)  # dM[j] = d/da_j M
    C = alg.structure_constants
    I = np.eye(2 * n)

    def bracket(Y, Z, dY, dZ):
        # columns of Y, Z are vector fields; dY[j] their fiber derivatives
        out = np.zeros((2 * n, Y.shape[1], Z.shape[1]))
        out[:n] = np.einsum("ip,jq,ijk->kpq", Y[:n], Z[:n], C)
        out += np.einsum("jp,jaq->apq", Y[n:], dZ) - np.einsum("jq,jap->apq", Z[n:], dY)
        return out

    zero = np.zeros_like(dM)
    N = (
        bracket(M, M, dM, dM)
        - np.einsum("ab,bpq->apq", M, bracket(M, I, dM, zero))
        - np.einsum("ab,bpq->apq", M, bracket(I, M, zero, dM))
        - bracket(I, I, zero, zero)
    )
    G = np.kron(np.eye(2), alg.gram)
    norms = np.sqrt(np.abs(np.einsum("apq,ab,bpq->pq", N, G, N)))
    return float(np.max(norms))


@dataclass
class AdmissibilityReport:
    passed: bool
    determinants: list
    failures: list  # indices of sample points where s is singular


def admissibility_check(pair: FormPair, sample) -> AdmissibilityReport:
    """Regularity of ``s`` (totally real orbits) at every sample point."""
    sample = list(sample)
    if not sample:
        raise ValueError("admissibility check needs a nonempty sample")
    n = pair.algebra.dim
    dets, failures = [], []
    for i, a in enumerate(sample):
        s = pair.s(np.asarray(a, float))
        det = float(np.linalg.det(s))
        scale = float(np.linalg.norm(s, 2)) ** n
        dets.append(det)
        if not abs(det) > 1e-10 * scale or scale == 0:
            failures.append(i)
    return AdmissibilityReport(not failures, dets, failures)


def is_integrable(pair: FormPair, a, h: float = DEFAULT_STEP, tol: float = INTEGRABILITY_TOL) -> bool:
    re, im = maurer_cartan_residual(pair, a, h, guard=False)
    return max(re, im) <= tol
