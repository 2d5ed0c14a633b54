"""
Admissible complex structures from a pair (c, s)
================================================

J is built from c and s at each point of the fiber; it is integrable when
phi = c + i s satisfies the Maurer-Cartan equation.
"""
import numpy as np

from invkahler.fixtures import perturbed_pair
from invkahler.jstruct import j_at, maurer_cartan_residual, nijenhuis_residual, standard_pair
from invkahler.lie_core import get_algebra

alg = get_algebra("su3")
a = alg.random_point(np.random.default_rng(1), 2.0)

pair = standard_pair(alg)
J = j_at(pair, a)
print(f"|J^2 + 1|              {J.square_residual():.1e}")
print("Maurer-Cartan (re, im) ", ["%.1e" % r for r in maurer_cartan_residual(pair, a)])
print(f"Nijenhuis              {nijenhuis_residual(pair, a):.1e}")

# coupling c to ad(a)^2 destroys integrability, and every test sees it
bad = perturbed_pair(alg, 0.1)
print("\nperturbed pair")
print("Maurer-Cartan (re, im) ", ["%.2f" % r for r in maurer_cartan_residual(bad, a)])
print(f"Nijenhuis              {nijenhuis_residual(bad, a):.2f}")
