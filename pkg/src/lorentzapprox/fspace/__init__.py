"""Function-space experiments on finite grids."""

from .continuity import (BumpFamily, ContinuityReport, continuity_experiment,
                         kadec_klee_probe, property_s_probe, property_s_residual, two_point)
from .grid import GridFunction, GridSpace
from .norms import Density, FNormSpec, fnorm, maximal_function, rearrangement
from .projection import (ConstraintClass, Interval, ProbeResult, ProjectionSet,
                         hausdorff_distance, level_grid, metric_projection_set,
                         minimizing_sequence_probe, one_sided, truncation, vee, wedge)

__all__ = [
    "GridSpace", "GridFunction", "Density", "FNormSpec", "fnorm", "maximal_function",
    "rearrangement", "ConstraintClass", "Interval", "ProbeResult", "ProjectionSet",
    "hausdorff_distance", "level_grid", "metric_projection_set", "minimizing_sequence_probe",
    "one_sided", "truncation", "vee", "wedge", "BumpFamily", "ContinuityReport",
    "continuity_experiment", "kadec_klee_probe", "property_s_probe", "property_s_residual",
    "two_point",
]
