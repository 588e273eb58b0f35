"""Numerical toolkit for separately holomorphic extension across boundary crosses."""

from .carleman import (
    BoundaryTrace,
    CarlemanSweep,
    ConvergenceTrace,
    PoleGuardError,
    carleman1d,
    carleman1d_sweep,
    cauchy_eval,
    moment_residuals,
    radial_maximal,
)
from .catalog import CATALOG, CatalogFunction, get_function
from .cross import (
    CrossSpec,
    ExtensionReport,
    GoncharCarleman,
    WedgeSample,
    angular_probe,
    gc_apply,
    gc_extend,
    joint_probe,
    power_identity_check,
    sup_norms,
    wedge_grid,
    wedge_omega,
)
from .dob import CondenserSpec, DOBasis, condenser_omega, dob_basis, dob_coeffs, dob_extend, gram_pair
from .geometry import (
    AngularJordanDomain,
    BoundaryArcSet,
    ContourPolyline,
    StolzRegion,
    ajd_contour,
    angular_jordan_domain,
    arc_set_normalize,
    regular_interior,
    stolz_contains,
)
from .harmonic import (
    AnalyticCompletion,
    HarmonicMeasureField,
    LevelSet,
    exhaustion_omega,
    level_membership,
    poisson_omega,
    schwarz_g,
    two_constant_bound,
)
from .montecarlo import WalkDomain, mc_omega

__version__ = "0.1.0"
