"""Conductivity and equipotential geometry of random disk deposits.

Random overlapping disks are dropped into a square box, rasterized to a
binary conductivity lattice, and driven by a unit potential difference.
The package measures how the total conductivity rises past the
connectivity threshold, fits the threshold power law, and quantifies the
geometry of equipotential curves through their box-counting dimension.
"""
from ._kernels import EXTENSION_ACTIVE
from .contour import (ContourMask, ContourSet, QuasiClusterLabeling,
                      extract_levels, rasterize_contours,
                      segment_quasi_clusters)
from .fitting import DegenerateData, FitResult, fit, model
from .fractal import (BoxCountSeries, DimensionCurve, EmptyMask,
                      FractalResult, InsufficientScales, box_count,
                      dimension, dimension_curve, dimension_of_field,
                      dimension_of_mask, koch_mask, sierpinski_mask)
from .geometry import (BoxSpec, Configuration, Disk, DiskDepositor,
                       SaturationError, deposit_until, load_configuration,
                       save_configuration, union_fraction)
from .pipeline import RunReport, RunSpec, default_p_grid, run
from .raster import ConductivityGrid, rasterize
from .solver import (NonConvergence, PotentialGrid, SolverSettings,
                     face_conductance, solve)
from .transport import (ConductivityCurve, CurvePoint, InconsistentFlux,
                        sweep_curve, total_conductivity)

__version__ = "0.1.0"

__all__ = [
    "BoxCountSeries", "BoxSpec", "Configuration", "ConductivityCurve",
    "ConductivityGrid", "ContourMask", "ContourSet", "CurvePoint",
    "DegenerateData", "DimensionCurve", "Disk", "DiskDepositor",
    "EmptyMask", "EXTENSION_ACTIVE", "FitResult", "FractalResult",
    "InconsistentFlux", "InsufficientScales", "NonConvergence",
    "PotentialGrid", "QuasiClusterLabeling", "RunReport", "RunSpec",
    "SaturationError", "SolverSettings", "box_count", "default_p_grid",
    "deposit_until", "dimension", "dimension_curve", "dimension_of_field",
    "dimension_of_mask", "extract_levels", "face_conductance", "fit",
    "koch_mask", "load_configuration", "model", "rasterize",
    "rasterize_contours", "run", "save_configuration",
    "segment_quasi_clusters", "sierpinski_mask", "solve", "sweep_curve",
    "total_conductivity", "union_fraction",
]
