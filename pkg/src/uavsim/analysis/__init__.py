"""Wrench-set geometry and response metrics."""

from .export import read_off, write_off, write_polygon_csv
from .polytope import ConvexPolytope, plane_basis
from .section import Polygon, cross_section
from .step_response import DidNotRise, StepMetrics, step_metrics
from .wrench_sets import MAX_ROTORS, acceleration_set, force_set, moment_set, omni_acceleration_radius

__all__ = [
    "ConvexPolytope", "DidNotRise", "MAX_ROTORS", "Polygon", "StepMetrics", "acceleration_set",
    "cross_section", "force_set", "moment_set", "omni_acceleration_radius", "plane_basis",
    "read_off", "step_metrics", "write_off", "write_polygon_csv",
]
