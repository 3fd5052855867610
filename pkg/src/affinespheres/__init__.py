"""Indefinite improper affine spheres from Bjorling/Cauchy data.

Solutions of the hyperbolic Monge-Ampere equation f_xx f_yy - f_xy^2 = -1,
constructed, evaluated, classified and verified through the split-complex
conformal representation.
"""

from .curve_lang import AnalyticCurve3, parse
from .split_algebra import Jet, SplitScalar, SplitVec3, extend_analytic
from .bjorling_core import (
    AdmissiblePair,
    AffineSurface,
    build_affine_map,
    build_surface,
    check_admissible,
    conormal_family,
    conormal_from_metric,
    singular_scan,
)
from .equiaffine import EquiaffineFrame, cross, det3, dot, normalize_frame
from .hessian_cauchy import CauchyData, GraphSolution, hessian_residual, solve_cauchy
from .surface_catalog import (
    Classification,
    HelicoidalSpec,
    classify,
    helicoidal,
    revolution,
    ruled_graph,
)
from .diagnostics import (
    DiagnosticsReport,
    SymmetrySpec,
    full_residual_report,
    geodesic_check,
    pregeodesic_residual,
    symmetry_check,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticCurve3",
    "AdmissiblePair",
    "AffineSurface",
    "CauchyData",
    "Classification",
    "DiagnosticsReport",
    "EquiaffineFrame",
    "GraphSolution",
    "HelicoidalSpec",
    "Jet",
    "SplitScalar",
    "SplitVec3",
    "SymmetrySpec",
    "build_affine_map",
    "build_surface",
    "check_admissible",
    "classify",
    "conormal_family",
    "conormal_from_metric",
    "cross",
    "det3",
    "dot",
    "extend_analytic",
    "full_residual_report",
    "geodesic_check",
    "helicoidal",
    "hessian_residual",
    "normalize_frame",
    "parse",
    "pregeodesic_residual",
    "revolution",
    "ruled_graph",
    "singular_scan",
    "solve_cauchy",
    "symmetry_check",
]
