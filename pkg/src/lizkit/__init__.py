"""Sparse variational fitting with fractional and ridge kernels.

The library covers four layers:

* ``fourier`` — periodic spectral calculus: truncated series, fractional
  derivatives and antiderivatives, the mean-removing projector, periodic
  Green's functions, and atomic measures with their total-variation norm.
* ``kernels`` — free-space kernels: the inverse fractional-Laplacian
  kernel with its closed-form derivative table and growth checks, the
  growth-corrected kernel, and truncated-power ridge profiles.
* ``radon`` — quadrature line-integral transform on sampled planar
  fields, the |omega| filter, backprojection, and spectral slice checks.
* ``solver`` — the exchange-loop fitter producing few-atom models for
  the periodic, free-space, and ridge families, with JSON persistence,
  evaluation, and a sinogram-domain seminorm cross-check.

The ``lizkit`` console script exposes fitting, evaluation, and the
verification suites; see ``lizkit --help``.
"""

from .config import DEFAULT_N_TERMS, DEFAULT_TOL, Tolerances, default_seed
from .errors import (
    AlphaTooSmall,
    BoundaryMass,
    DirectionNotOnGrid,
    DistributionalCase,
    DuplicateAtoms,
    InfeasibleInterpolation,
    InputNotFound,
    InvalidKernelRegime,
    LizkitError,
    MultiIndexTooLarge,
    NonUnitDirection,
    NonZeroMeanForIntegral,
    NotConverged,
    OriginSingularity,
    SchemaMismatch,
    UnsupportedDimension,
)
from .fourier import (
    AtomicMeasure1D,
    FourierSeries,
    dirac_pairing,
    frac_derivative,
    green_periodic,
    mnorm_atomic,
    periodic_bump,
    project_P0,
)
from .kernels import (
    CutoffFunction,
    FracLaplaceKernel,
    GrowthReport,
    RidgeKernel,
    corrected_kernel_frac,
    corrected_ridge,
    k_frac_laplace,
    kernel_from_json,
    norm_power_derivative,
    ridge_profile,
    rho_1d,
    validate_gamma,
    verify_growth_bound,
)
from .polynomials import MultiPoly, monomial_exponents
from .radon import (
    SampledField,
    SinogramGrid,
    SliceReport,
    backproject,
    default_angles,
    default_t_grid,
    filter_Krad,
    filter_Krad_inverse,
    radon,
    radon_of_ridge,
    slice_check,
)
from .solver import (
    FitDiagnostics,
    FitProblem,
    FitResult,
    LizSplineModel,
    RidgeModel,
    SeminormReport,
    SplineModel,
    evaluate_model,
    fit,
    mnorm_of_model,
    model_from_json,
    verify_seminorm_ridge,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaTooSmall",
    "AtomicMeasure1D",
    "BoundaryMass",
    "CutoffFunction",
    "DEFAULT_N_TERMS",
    "DEFAULT_TOL",
    "DirectionNotOnGrid",
    "DistributionalCase",
    "DuplicateAtoms",
    "FitDiagnostics",
    "FitProblem",
    "FitResult",
    "FourierSeries",
    "FracLaplaceKernel",
    "GrowthReport",
    "InfeasibleInterpolation",
    "InputNotFound",
    "InvalidKernelRegime",
    "LizSplineModel",
    "LizkitError",
    "MultiIndexTooLarge",
    "MultiPoly",
    "NonUnitDirection",
    "NonZeroMeanForIntegral",
    "NotConverged",
    "OriginSingularity",
    "RidgeKernel",
    "RidgeModel",
    "SampledField",
    "SchemaMismatch",
    "SeminormReport",
    "SinogramGrid",
    "SliceReport",
    "SplineModel",
    "Tolerances",
    "UnsupportedDimension",
    "backproject",
    "corrected_kernel_frac",
    "corrected_ridge",
    "default_angles",
    "default_seed",
    "default_t_grid",
    "dirac_pairing",
    "evaluate_model",
    "filter_Krad",
    "filter_Krad_inverse",
    "fit",
    "frac_derivative",
    "green_periodic",
    "k_frac_laplace",
    "kernel_from_json",
    "mnorm_atomic",
    "mnorm_of_model",
    "model_from_json",
    "monomial_exponents",
    "norm_power_derivative",
    "periodic_bump",
    "project_P0",
    "radon",
    "radon_of_ridge",
    "ridge_profile",
    "rho_1d",
    "slice_check",
    "validate_gamma",
    "verify_growth_bound",
    "verify_seminorm_ridge",
]
