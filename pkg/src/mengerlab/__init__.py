"""Numerical laboratory for generalized integral Menger curvature of closed curves."""

from .curve import FourierCurve, circle, load_curve, make_fixture, quality_report, save_curve
from .energy import EnergyParams, MengerEnergy, energy, energy_report, menger_curvature
from .errors import AccuracyError, MengerError, PreconditionError
from .flow import FlowConfig, find_critical_point
from .kernels import BACKEND
from .quadrature import QuadratureConfig

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AccuracyError",
    "EnergyParams",
    "FlowConfig",
    "FourierCurve",
    "MengerEnergy",
    "MengerError",
    "PreconditionError",
    "QuadratureConfig",
    "circle",
    "energy",
    "energy_report",
    "find_critical_point",
    "load_curve",
    "make_fixture",
    "menger_curvature",
    "quality_report",
    "save_curve",
]
