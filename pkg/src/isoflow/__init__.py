"""Integrated scalar/vector field visualization engine.

Scalar fields become semitransparent marching-cubes isosurfaces; vector
fields become streamlines selected per camera by projected-length
information entropy with critical-point coverage and isosurface-occlusion
penalties.
"""
from .volume import VolumeGrid, Field, load_svf, save_svf, generate_synthetic
from .topology import (CriticalPoint, extract_scalar_extrema,
                       extract_vector_critical_points)
from .isosurface import IsosurfaceMesh, polygonize, suggest_isovalues, mesh_stats
from .tracing import TraceConfig, Streamline, build_candidates
from .scoring import Camera, EntropyScore, score_all, entropy_coarse
from .selection import SelectionConfig, SelectionResult, select_streamlines
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "VolumeGrid", "Field", "load_svf", "save_svf", "generate_synthetic",
    "CriticalPoint", "extract_scalar_extrema", "extract_vector_critical_points",
    "IsosurfaceMesh", "polygonize", "suggest_isovalues", "mesh_stats",
    "TraceConfig", "Streamline", "build_candidates",
    "Camera", "EntropyScore", "score_all", "entropy_coarse",
    "SelectionConfig", "SelectionResult", "select_streamlines",
    "KERNEL_BACKEND",
]
