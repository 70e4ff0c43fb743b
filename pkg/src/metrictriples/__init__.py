"""Curvature of metric triples via the Steiner problem on constant-curvature surfaces.

For three points of a metric space with distances (a, b, c) and least total
distance g from a single point to them, the triple curvature is the
curvature k of the model surface M_k on which a triangle with the same
sides has the same Steiner minimum S(a, b, c, k) = g.
"""

from .catk_lab import (CatExperimentSpec, ComparisonConfiguration, check_ratio_convexity,
                       comparison_config, derive_h_constant, f_sigma, h_k, verify_cat_bound)
from .config import DEFAULT_CONFIG, SolverConfig
from .estimator import TripleCurvature
from .exceptions import (AmbiguityError, DomainError, InvalidInputError, MetricTriplesError,
                         SolverError)
from .metric_data import (FiniteMetricSpace, enumerate_triples, load_distance_matrix,
                          load_point_cloud, read_report, write_report)
from .model_surface import (AmbientDescriptor, SurfacePoint, geodesic_point, realize_triangle,
                            surface_distance, triangle_angles)
from .records import CurvatureReport, MetricTriple
from .sides import TripleSides
from .steiner import (SteinerEvaluation, fermat_oracle, lambda_critical, s_euclidean, s_unit_hyperbolic,
                      s_unit_sphere, s_value)
from .triple_curvature import continuum_g, curvature_report, g_of_triple, invert_curvature

__version__ = "0.1.0"

__all__ = [
    "AmbientDescriptor", "AmbiguityError", "CatExperimentSpec", "ComparisonConfiguration",
    "CurvatureReport", "DEFAULT_CONFIG", "DomainError", "FiniteMetricSpace", "InvalidInputError",
    "MetricTriple", "MetricTriplesError", "SolverConfig", "SolverError", "SteinerEvaluation",
    "SurfacePoint", "TripleCurvature", "TripleSides", "check_ratio_convexity", "comparison_config",
    "continuum_g", "curvature_report", "derive_h_constant", "enumerate_triples", "f_sigma",
    "fermat_oracle", "g_of_triple", "geodesic_point", "h_k", "invert_curvature", "lambda_critical",
    "load_distance_matrix", "load_point_cloud", "read_report", "realize_triangle", "s_euclidean",
    "s_unit_hyperbolic", "s_unit_sphere", "s_value", "surface_distance", "triangle_angles",
    "verify_cat_bound", "write_report",
]
