"""
Integrating phi to gamma and the polar map
==========================================

gamma solves (d gamma) gamma^-1 = phi and is integrated with RK4 along the
ray from 0.  For the standard pair gamma(a) = exp(i a).
"""
import numpy as np

from invkahler.jstruct import standard_pair
from invkahler.lie_core import get_algebra
from invkahler.polar import GammaIntegrator, holomorphy_residual, symplecto_residual

alg = get_algebra("su2")
pair = standard_pair(alg)
a = np.array([1.2, -1.0, 1.1])

# fourth order: doubling the steps divides the error by about 16
print("steps  error")
prev = None
for n in (10, 20, 40, 80, 160):
    err = np.max(np.abs(GammaIntegrator(pair, n)(a) - pair.gamma(a)))
    print(f"{n:5d}  {err:.3e}" + (f"  ratio {prev / err:.2f}" if prev else ""))
    prev = err

integ = GammaIntegrator(pair)
x = alg.exp_c(np.array([0.4, 0.1, -0.9])).matrix
print(f"\nholomorphy residual {holomorphy_residual(pair, x, a, integrator=integ):.1e}")
print(f"symplecto residual  {symplecto_residual(pair, a, integrator=integ):.1e}")
