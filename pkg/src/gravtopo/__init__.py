"""Numerical topology of the graviton polarization bundle over the forward lightcone."""
from .bundles import BundleKind, decompose, helicity_basis, helicity_of, helicity_section
from .clutching import GLOBAL_FRAME, global_frame, homotopy_T, transition
from .errors import (ConventionError, DomainError, GaugeError, GravtopoError,
                     NonConvergentError, NonGaugeConsistentError, RefinementError)
from .poincare import Translation, act_lorentz, act_orthogonal, act_translation, gauge_restore
from .spacetime import SphereMesh, Wavevector, sphere_mesh
from .tensors import hs_inner, pol_tensor, tt_project, validate_fiber
from .topology import analytic_berry, berry_data, chern_integral, chern_lattice, euler_pfaffian_integral

__version__ = "0.1.0"

__all__ = [
    "BundleKind", "decompose", "helicity_basis", "helicity_of", "helicity_section",
    "GLOBAL_FRAME", "global_frame", "homotopy_T", "transition",
    "ConventionError", "DomainError", "GaugeError", "GravtopoError", "NonConvergentError",
    "NonGaugeConsistentError", "RefinementError",
    "Translation", "act_lorentz", "act_orthogonal", "act_translation", "gauge_restore",
    "SphereMesh", "Wavevector", "sphere_mesh",
    "hs_inner", "pol_tensor", "tt_project", "validate_fiber",
    "analytic_berry", "berry_data", "chern_integral", "chern_lattice", "euler_pfaffian_integral",
]
