"""Invariant Kähler structures on complexified compact Lie groups."""

__version__ = "0.1.0"

from .lie_core import GroupElement, LieAlgebra, abelian, get_algebra, load_algebra, so3, su2, su3
from .ad_calculus import COS, COSM1_OVER, SINC, X_COT_X, AdFunction, eval_ad, eval_series, eval_spectral
from .jstruct import (
    FormPair,
    admissibility_check,
    j_at,
    maurer_cartan_residual,
    nijenhuis_residual,
    split_integrability_residuals,
    standard_pair,
)
from .kaehler import (
    KAHLER,
    NOT_KAHLER,
    PSEUDO_KAHLER,
    closedness_residual,
    kaehler_verdict,
    metric_at,
    one_form_mu,
    potential_residual,
    psi_at,
    symplectic_at,
)
from .polar import holomorphy_residual, integrate_gamma, polar_map, quasi_equivariance_residual, symplecto_residual
from .scalings import ScalingFunction, chi_map, dchi_at, f_potential, get_scaling, scaled_pair

__all__ = [name for name in dir() if not name.startswith("_")]
