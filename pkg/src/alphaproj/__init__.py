"""alpha-relative entropy: divergences, projections and their geometry."""

from .divergences import (
    Path,
    alpha_relative_entropy,
    alpha_relative_entropy_direct,
    f_divergence,
    ialpha,
    kl_limit_probe,
)
from .errors import AlphaProjError
from .geometry import (
    minkowski_scale,
    parallelogram_gap,
    pythagorean_report,
    r_combine,
    segment_divergence_derivative,
    segment_min_check,
)
from .maxent import (
    GeneralizedGaussianSpec,
    b_alpha,
    clipping_correction,
    covariance,
    generalized_gaussian,
    matched_density,
    maxent_grid,
    moment_entropy_gap,
)
from .measures import (
    AlphaParam,
    Density,
    WeightedSpace,
    alpha_norm,
    kl_divergence,
    normalize,
    renyi_entropy,
    shannon_entropy,
    tilt,
    total_variation,
    uniform,
)
from .projection import (
    ConstraintSet,
    ProjectionResult,
    SolverOptions,
    brute_force_project,
    moment_set,
    project,
    uniqueness_probe,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaParam",
    "AlphaProjError",
    "ConstraintSet",
    "Density",
    "GeneralizedGaussianSpec",
    "Path",
    "ProjectionResult",
    "SolverOptions",
    "WeightedSpace",
    "alpha_norm",
    "alpha_relative_entropy",
    "alpha_relative_entropy_direct",
    "b_alpha",
    "brute_force_project",
    "clipping_correction",
    "covariance",
    "f_divergence",
    "generalized_gaussian",
    "ialpha",
    "kl_divergence",
    "kl_limit_probe",
    "matched_density",
    "maxent_grid",
    "minkowski_scale",
    "moment_entropy_gap",
    "moment_set",
    "normalize",
    "parallelogram_gap",
    "project",
    "pythagorean_report",
    "r_combine",
    "renyi_entropy",
    "segment_divergence_derivative",
    "segment_min_check",
    "shannon_entropy",
    "tilt",
    "total_variation",
    "uniform",
    "uniqueness_probe",
]
