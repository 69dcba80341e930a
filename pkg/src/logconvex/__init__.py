"""Weighted-norm log-convexity checks for the free Schrodinger flow."""

from . import convexity, errors, frequency, gaussian_calculus, runner, spectral, weighted_norms
from .gaussian_calculus import ChirpedGaussian, fourier, gaussian, propagate
from .spectral import GridField, GridSpec
from .weighting import ScheduleScale, WeightSpec

__version__ = "0.1.0"

__all__ = [
    "ChirpedGaussian",
    "GridField",
    "GridSpec",
    "ScheduleScale",
    "WeightSpec",
    "convexity",
    "errors",
    "fourier",
    "frequency",
    "gaussian",
    "gaussian_calculus",
    "propagate",
    "runner",
    "spectral",
    "weighted_norms",
]
