"""Pivot rules on LP-oriented simple 3-polytopes, analyzed in exact arithmetic."""

from .model import (
    CombinatorialInstance,
    GeometricInstance,
    MKReport,
    Orientation,
    ParseError,
    ValidationReport,
    VertexProfile,
    check_mk,
    orientation_of,
    parse_instance,
    serialize_instance,
    tetrahedron,
    validate,
    vertex_profile,
)

__version__ = "0.1.0"
