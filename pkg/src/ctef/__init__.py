"""Ellipsoid fitting in any dimension via a Cayley-parametrized rotation."""
from .clustering import adjusted_rand_index, cluster, matched_accuracy
from .datasim import SimSpec, sample_rosenbrock, sample_vmf, simulate
from .exceptions import ContractError, DegenerateDataError, DimensionError, SolverError
from .fitting import FitResult, fit, fit_reduced, select_subspace
from .geometry import Ellipsoid, EllipsoidParams, cayley, skew_embed, to_quadratic_form
from .loss import jacobian, loss, residuals
from .metrics import lpq_error, offset_error, shape_error
from .trf import Bounds, SolveReport, SolverOptions, minimize

__version__ = "0.1.0"

__all__ = [
    "Bounds", "ContractError", "DegenerateDataError", "DimensionError", "Ellipsoid",
    "EllipsoidParams", "FitResult", "SimSpec", "SolveReport", "SolverError", "SolverOptions",
    "adjusted_rand_index", "cayley", "cluster", "fit", "fit_reduced", "jacobian", "loss",
    "lpq_error", "matched_accuracy", "minimize", "offset_error", "residuals",
    "sample_rosenbrock", "sample_vmf", "select_subspace", "shape_error", "simulate",
    "skew_embed", "to_quadratic_form",
]
