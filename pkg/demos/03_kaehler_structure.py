"""
Symplectic form, metric and the Kähler verdict
==============================================

omega is the canonical form of the cotangent bundle.  With J from the
standard pair, g = omega(., J .) is positive and Psi is x cot x of ad(a).
"""
import numpy as np

from invkahler.ad_calculus import X_COT_X, eval_spectral
from invkahler.fixtures import gauge_pair
from invkahler.jstruct import standard_pair
from invkahler.kaehler import kaehler_verdict, metric_at, potential_residual, psi_at
from invkahler.lie_core import get_algebra

alg = get_algebra("su2")
pair = standard_pair(alg)
a = np.array([0.0, 0.0, 1.0])

print("Psi at e3:\n", psi_at(pair, a).matrix.round(6))
print("x cot x(ad e3):\n", eval_spectral(alg, X_COT_X, a).round(6))

rng = np.random.default_rng(2)
sample = [alg.random_point(rng, 2.0) for _ in range(16)]
rep = kaehler_verdict(pair, sample)
print("\nverdict:", rep.verdict)
for k, v in rep.residuals.items():
    print(f"  {k:24s} {v:.3g}")

# the metric is positive but its smallest eigenvalue decays with |a|
print("\n|a|   min eigenvalue of g")
for r in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0):
    print(f"{r:4.1f}  {metric_at(pair, r * a).min_eigenvalue():.4f}")

# F = |a|^2/2 is a primitive of <mu, s>, so 2F is a Kähler potential
print("\npotential residual:", potential_residual(pair, lambda b: 0.5 * b @ b, sample))

# a gauge-twisted pair is still integrable but <mu, c> is not closed
print("gauge pair verdict:", kaehler_verdict(gauge_pair(alg, np.array([0.3, -0.5, 0.4])), sample).verdict)
