"""First Dirichlet eigenvalues, shape derivatives and stability of extremal
domains on rotationally symmetric surfaces."""

from .errors import (
    ArityError,
    ConvergenceError,
    ExtremalError,
    FredholmViolationError,
    InvalidDomainError,
    PreconditionError,
    ResonanceError,
    TruncationInconclusiveError,
)
from .geometry import (
    FLAT_TORUS,
    SPHERE_BAND,
    SPHERE_POLAR,
    RadialDomain,
    WarpedSurface,
    area,
    band,
    boundary_integral_zero_mean,
    disk,
    gauss_bonnet_defect,
    get_surface,
    symmetric_band,
)
from .radial_eig import (
    EigenSolution,
    Mesh1D,
    fk_profile_point,
    lambda1_lower_bound,
    liouville_lambda1,
    solve_lambda1,
)
from .stability import (
    ModeExtension,
    ModeForm,
    StabilityAnalyzer,
    StabilityReport,
    jacobi_kernel,
    mode_form,
    morse_index,
    solve_extension,
    stability_form_S,
)
from .variation import BandFamily, VariationCheck, hadamard_check, second_variation_check
from .solver2d import Eigen2D, FourierCurve, PerturbedBand, hadamard_check_2d, lambda1_2d

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "ConvergenceError",
    "ExtremalError",
    "FredholmViolationError",
    "InvalidDomainError",
    "PreconditionError",
    "ResonanceError",
    "TruncationInconclusiveError",
    "FLAT_TORUS",
    "SPHERE_BAND",
    "SPHERE_POLAR",
    "RadialDomain",
    "WarpedSurface",
    "area",
    "band",
    "boundary_integral_zero_mean",
    "disk",
    "gauss_bonnet_defect",
    "get_surface",
    "symmetric_band",
    "EigenSolution",
    "Mesh1D",
    "fk_profile_point",
    "lambda1_lower_bound",
    "liouville_lambda1",
    "solve_lambda1",
    "ModeExtension",
    "ModeForm",
    "StabilityAnalyzer",
    "StabilityReport",
    "jacobi_kernel",
    "mode_form",
    "morse_index",
    "solve_extension",
    "stability_form_S",
    "BandFamily",
    "VariationCheck",
    "hadamard_check",
    "second_variation_check",
    "Eigen2D",
    "FourierCurve",
    "PerturbedBand",
    "hadamard_check_2d",
    "lambda1_2d",
]

