"""
Rescaled polar maps
===================

chi(a) = phi(|a|^2) a turns the standard structure into other biinvariant
Kähler structures.  With chi = arctan the polar map exp(i chi(a)) lands in
a bounded region.
"""
import numpy as np

from invkahler.kaehler import kaehler_verdict, potential_residual
from invkahler.lie_core import get_algebra
from invkahler.polar import GammaIntegrator, quasi_equivariance_residual
from invkahler.scalings import arctan_scaling, chi_map, f_potential, scaled_pair, sinh_scaling

alg = get_algebra("su3")
rng = np.random.default_rng(3)
sample = [alg.random_point(rng, 2.0) for _ in range(8)]

sf = arctan_scaling()
u = sample[0] / alg.norm(sample[0])
for r in (1.0, 10.0, 100.0):
    print(f"|chi(a)| at |a| = {r:5.0f}: {alg.norm(chi_map(sf, alg, r * u)):.6f}  (pi/2 = {np.pi / 2:.6f})")

for sf in (arctan_scaling(), sinh_scaling()):
    pair = scaled_pair(sf, alg)
    rep = kaehler_verdict(pair, sample)
    pot = potential_residual(pair, lambda a: f_potential(sf, alg, a), sample)
    z = alg.random_group_element(rng).matrix
    qe = quasi_equivariance_residual(pair, z, sample[0], sample[1], GammaIntegrator(pair, 400))
    print(f"{sf.name:7s} verdict {rep.verdict}, potential {pot:.1e}, quasi-equivariance {qe:.1e}")
