"""Capacities, equilibrium measures, Szegő quantities and Widom factors on smooth Jordan arcs."""

from .conformal import ExteriorMap, MapError, UnsupportedGeometry, capacity, map_arc, phi_eval, phi_prime_boundary
from .extremal import chebyshev_minimax, orthonormal_polys, sup_bounds, widom_qn, widom_report
from .geometry import ArcError, ArcSpec, NormalizedArc, build_lifted_curve, normalize_endpoints, parse_arc_spec
from .potential import (
    WeightSpec,
    equilibrium_data,
    green_eval,
    nu,
    parse_weight,
    symmetry_defect,
    szego_data,
    szego_integral,
)
from .symm import symm_oracle

__version__ = "0.1.0"

__all__ = [
    "ArcError",
    "ArcSpec",
    "ExteriorMap",
    "MapError",
    "NormalizedArc",
    "UnsupportedGeometry",
    "WeightSpec",
    "build_lifted_curve",
    "capacity",
    "chebyshev_minimax",
    "equilibrium_data",
    "green_eval",
    "map_arc",
    "normalize_endpoints",
    "nu",
    "orthonormal_polys",
    "parse_arc_spec",
    "parse_weight",
    "phi_eval",
    "phi_prime_boundary",
    "sup_bounds",
    "symm_oracle",
    "symmetry_defect",
    "szego_data",
    "szego_integral",
    "widom_qn",
    "widom_report",
]
