"""Proof-side machinery: Faa di Bruno polynomials, majorants, Leibniz checks, diagnostics."""

from .diagnostics import (
    CONTAINED,
    AnalyticityReport,
    DecayFit,
    IntersectionResult,
    Plane,
    Sphere,
    analyticity_diagnostics,
    intersection_count,
    synthetic_decay_curve,
)
from .faadibruno import UniversalPolyInput, faa_di_bruno, faa_di_bruno_symmetric, majorant_bound_check
from .leibniz import LeibnizResult, fractional_leibniz_check
from .majorant import (
    GrowthFit,
    MajorantConfig,
    factorial_growth_fit,
    majorant_ode,
    majorant_sequence,
    phi,
    recursion_rhs,
    search_constants,
)

__all__ = [
    "CONTAINED",
    "AnalyticityReport",
    "DecayFit",
    "GrowthFit",
    "IntersectionResult",
    "LeibnizResult",
    "MajorantConfig",
    "Plane",
    "Sphere",
    "UniversalPolyInput",
    "analyticity_diagnostics",
    "factorial_growth_fit",
    "faa_di_bruno",
    "faa_di_bruno_symmetric",
    "fractional_leibniz_check",
    "intersection_count",
    "majorant_bound_check",
    "majorant_ode",
    "majorant_sequence",
    "phi",
    "recursion_rhs",
    "search_constants",
    "synthetic_decay_curve",
]
