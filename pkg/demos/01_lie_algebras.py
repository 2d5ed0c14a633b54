"""
Compact Lie algebras and functions of ad
========================================

Points of an algebra are coordinate vectors; brackets come from the
structure constants and the representation gives matrices.
"""
import numpy as np

from invkahler.ad_calculus import COSM1_OVER, SINC, X_COT_X, eval_series, eval_spectral
from invkahler.lie_core import get_algebra

su2 = get_algebra("su2")
e1, e2, e3 = np.eye(3)
print("[e1, e2] =", su2.bracket(e1, e2))
print("ad(e3) =\n", su2.ad_matrix(e3))

# exp of a purely imaginary point leaves the compact group
g = su2.exp_c(np.zeros(3), np.pi * e3)
print("exp(i pi e3) eigenvalues:", np.linalg.eigvals(g.matrix).real, "in G:", g.real_form)

# ad(e3) has eigenvalues +-i, so the three functions reduce to sinh, cosh - 1, coth at 1
print("sinc(ad e3) e1       =", eval_spectral(su2, SINC, e3) @ e1)
print("cosm1_over(ad e3) e1 =", eval_spectral(su2, COSM1_OVER, e3) @ e1)
print("x cot x(ad e3) e1    =", eval_spectral(su2, X_COT_X, e3) @ e1)

# series and spectral routes agree well inside the radius of convergence
su3 = get_algebra("su3")
a = su3.random_point(np.random.default_rng(0), 2.0)
gap = np.max(np.abs(eval_series(su3, SINC, a) - eval_spectral(su3, SINC, a)))
print(f"su3 series/spectral gap: {gap:.1e}")
