"""Exact solutions for the quantum field in a vibrating one-dimensional cavity.

Closed-form phase functions, energy densities and stability charts for
cavities whose wall motion makes the field equations exactly solvable.
"""
from ._kernels import BACKEND
from .catalog import (
    CavityModel,
    Family,
    ValidationReport,
    make_homographic,
    make_inversion,
    make_linear_finite,
    make_linear_odd,
    make_static,
    model_from_dict,
    model_from_json,
    model_to_dict,
    model_to_json,
    validate,
)
from .mobius import Homography, MapClass, MapKind, classify, compose, power
from .moore import MooreEvaluator
from .observables import (
    Observables,
    QuadratureError,
    ResolutionError,
    coefficient_table,
)
from .oracle import TrajectoryHandle, VerificationReport, verify_model
from .stability import (
    PhasePoint,
    StabilityReport,
    Verdict,
    amplitude_frequency_curve,
    classify_model,
    instability_threshold,
    max_amplitude,
    phase_diagram_scan,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CavityModel",
    "Family",
    "Homography",
    "MapClass",
    "MapKind",
    "MooreEvaluator",
    "Observables",
    "PhasePoint",
    "QuadratureError",
    "ResolutionError",
    "StabilityReport",
    "TrajectoryHandle",
    "ValidationReport",
    "Verdict",
    "VerificationReport",
    "amplitude_frequency_curve",
    "classify",
    "classify_model",
    "coefficient_table",
    "compose",
    "instability_threshold",
    "make_homographic",
    "make_inversion",
    "make_linear_finite",
    "make_linear_odd",
    "make_static",
    "max_amplitude",
    "model_from_dict",
    "model_from_json",
    "model_to_dict",
    "model_to_json",
    "phase_diagram_scan",
    "power",
    "validate",
    "verify_model",
    "__version__",
]
