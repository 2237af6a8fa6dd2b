"""Finite element solvers for Euclidean and quadratic-seminorm spectral
quantities on planar polygons."""

from .meshing import TriMesh, mesh_polygon
from .solver import (
    SolverConfig,
    SpectralResult,
    lambda_euclid_fem,
    solve_quadratic,
    torsion_euclid_fem,
)

__all__ = [
    "SolverConfig",
    "SpectralResult",
    "TriMesh",
    "lambda_euclid_fem",
    "mesh_polygon",
    "solve_quadratic",
    "torsion_euclid_fem",
]
