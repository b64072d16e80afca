"""Triangulated 3-manifolds, normal surfaces and finite covers."""

from .cover import Cover, build_cover, corollary_count, lift_surface, psi_from_surface
from .normal import Coorientation, NormalSurface, is_separating, normal_check
from .triangulation import (
    DualPresentation,
    ParseError,
    Triangulation,
    TriangulationError,
    fundamental_group,
    homology_h1,
    validate,
)

__all__ = [
    "Coorientation",
    "Cover",
    "DualPresentation",
    "NormalSurface",
    "ParseError",
    "Triangulation",
    "TriangulationError",
    "build_cover",
    "corollary_count",
    "fundamental_group",
    "homology_h1",
    "is_separating",
    "lift_surface",
    "normal_check",
    "psi_from_surface",
    "validate",
]
