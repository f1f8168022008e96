"""Numerical construction of analytic discs attached to a codimension-two
real submanifold near an elliptic complex-tangency point.

Pipeline: exact truncated-series arithmetic with polynomial parameter
dependence (series), per-slice normal form reduction (normal_form), level
curve tracing and normalized conformal maps (curve, conformal), boundary
Hilbert transforms (hilbert), the fixed-point slice solver (solver), and
disc assembly plus family verification sweeps (discs). The cli module
exposes batch commands over a declarative manifold file format (specio).
"""

__version__ = "0.1.0"

from .config import DEFAULT_CONFIG, PipelineConfig
from .curve import BoundaryCurve, SliceData, SliceParams, quadric_slice, trace_level_curve
from .conformal import ConformalMap, riemann_map
from .discs import AttachedDisc, FamilyReport, build_disc, cauchy_extend, sweep
from .hilbert import HilbertOperator, conjugate_on_circle, hilbert_on_curve, norm_probe
from .normal_form import (
    CoordinateChange, ManifoldSpec, RawDefiningSeries, detect_cr_singularity,
    kill_imaginary_part, normalize_full, normalize_quadric, recenter_cr_singularity,
)
from .series import BidegreeSeries, ComplexParam, ParamPoly, quadric_series
from .solver import DiscSolution, SliceOperators, build_slice_operators, omega, solve_slice, solve_u
