"""Linear affine functions, transported fields and sub-level convexity on constant-curvature spaces."""
from . import errors
from .affine import (
    AffineProbe,
    CheckReport,
    Verdict,
    check_affine_formula,
    check_gradient_field,
    check_transport_commutation,
    counterexample_suite,
    f0_closed_form_hp,
    f0_value,
    gradient_fd,
    hessian_probe,
    transport_field,
)
from .convexity import (
    ComboCoefficients,
    ConvexityReport,
    ScanVerdict,
    TriangleData,
    combination_coefficients,
    comparison_triangle,
    convexity_scan,
    law_of_cosines_check,
    sublevel_membership,
    threshold_experiment,
    triangle,
    triangle_suite,
)
from .manifold import (
    GeodesicSegment,
    Kind,
    Point,
    SpaceSpec,
    TangentVec,
    covariant_derivative_fd,
    distance,
    exp_map,
    geodesic,
    inner,
    log_map,
    norm,
    parallel_transport,
    tangent_basis,
    transport_between,
)

__all__ = [
    "AffineProbe",
    "CheckReport",
    "Verdict",
    "check_affine_formula",
    "check_gradient_field",
    "check_transport_commutation",
    "counterexample_suite",
    "f0_closed_form_hp",
    "f0_value",
    "gradient_fd",
    "hessian_probe",
    "transport_field",
    "ComboCoefficients",
    "ConvexityReport",
    "ScanVerdict",
    "TriangleData",
    "combination_coefficients",
    "comparison_triangle",
    "convexity_scan",
    "law_of_cosines_check",
    "sublevel_membership",
    "threshold_experiment",
    "triangle",
    "triangle_suite",
    "GeodesicSegment",
    "Kind",
    "Point",
    "SpaceSpec",
    "TangentVec",
    "covariant_derivative_fd",
    "distance",
    "exp_map",
    "geodesic",
    "inner",
    "log_map",
    "norm",
    "parallel_transport",
    "tangent_basis",
    "transport_between",
    "errors",
]

__version__ = "0.1.0"
