"""Labeled pairs for negative controls and invariant tests.

``perturbed_pair`` adds a bracket-coupled term to ``c`` and breaks the
Maurer-Cartan equation.  ``gauge_pair`` is the pair of
``gamma(a) = exp([b0, a]) exp(i a)``: integrable, but ``<mu, c>`` and
``<mu, s>`` are no longer closed, so it is not Kähler for ``omega``.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .ad_calculus import COSM1_OVER, SINC, dexp_right, eval_spectral_many
from .jstruct import FormPair, standard_pair
from .lie_core import LieAlgebra
from .scalings import arctan_scaling, identity_scaling, scaled_pair, sinh_scaling


def perturbed_pair(alg: LieAlgebra, eps: float = 0.1) -> FormPair:
    """Standard pair with ``c -> c + eps ad(a)^2``; not integrable for ``eps != 0``."""
    st = standard_pair(alg)

    def both(a):
        c, s = st.c_and_s(a)
        ad = alg.ad_matrix(a)
        return c + eps * ad @ ad, s

    return FormPair(
        alg, lambda a: both(a)[0], lambda a: both(a)[1],
        provenance="custom", meta={"fixture": "perturbed", "eps": eps}, both=both,
    )


def gauge_pair(alg: LieAlgebra, b0) -> FormPair:
    """Pair of ``gamma(a) = exp([b0, a]) exp(i a)``.

    With ``X = [b0, a]``: ``c = dexp_right(X) ad(b0) + Ad_exp(X) c_st`` and
    ``s = Ad_exp(X) s_st``.  Near ``a = 0``, ``d<mu, c>(V, W) ~ 2 V.[b0, W]``.
    """
    b0 = np.asarray(b0, float)
    ad_b0 = alg.ad_matrix(b0)

    def both(a):
        X = alg.bracket(b0, a)
        Ad = scipy.linalg.expm(alg.ad_matrix(X))
        c_st, s_st = eval_spectral_many(alg, (COSM1_OVER, SINC), a)
        return dexp_right(alg, X) @ ad_b0 + Ad @ c_st, Ad @ s_st

    def gamma(a):
        X = alg.bracket(b0, a)
        return scipy.linalg.expm(alg.to_matrix(X)) @ alg.exp_c(np.zeros(alg.dim), a).matrix

    return FormPair(
        alg, lambda a: both(a)[0], lambda a: both(a)[1],
        provenance="custom", gamma=gamma, meta={"fixture": "gauge", "b0": b0.tolist()}, both=both,
    )


def gauge_closedness_oracle(alg: LieAlgebra, b0) -> np.ndarray:
    """Leading-order ``d<mu, c>`` of :func:`gauge_pair` at ``a = 0`` as a matrix in ``(V, W)``."""
    # d<mu,c>(e_j, e_k) = 2 e_j . [b0, e_k]
    return 2 * alg.gram @ alg.ad_matrix(np.asarray(b0, float))


def integrable_suite(alg: LieAlgebra, rng) -> list[tuple[str, FormPair]]:
    """Eight integrable pairs: shipped scalings and gauge pairs for random ``b0``."""
    out = [
        ("standard", standard_pair(alg)),
        ("standard-series", standard_pair(alg, method="series")),
        ("identity", scaled_pair(identity_scaling(), alg)),
        ("arctan", scaled_pair(arctan_scaling(), alg)),
        ("sinh", scaled_pair(sinh_scaling(), alg)),
    ]
    for k in range(3):
        out.append((f"gauge-{k}", gauge_pair(alg, alg.random_point(rng, 1.0))))
    return out


def non_integrable_suite(alg: LieAlgebra, rng) -> list[tuple[str, FormPair]]:
    """Eight pairs failing the Maurer-Cartan equation."""
    out = [(f"perturbed-{eps:g}", perturbed_pair(alg, eps)) for eps in (0.05, 0.1, 0.2, 0.5)]
    st = standard_pair(alg)
    for k in range(4):
        M = rng.standard_normal((alg.dim, alg.dim)) * 0.2

        def both(a, M=M):
            c, s = st.c_and_s(a)
            return c + M @ alg.ad_matrix(a), s

        out.append((f"random-{k}", FormPair(
            alg, lambda a, b=both: b(a)[0], lambda a, b=both: b(a)[1],
            provenance="custom", meta={"fixture": "random"}, both=both,
        )))
    return out
