"""Numerical laboratory for the discrete Schrödinger equation on the hexagonal triangulation."""

__version__ = "0.1.0"

from .symbols import HEX, SQUARE, DispersionSymbol, LatticeKind, PhaseFunction  # noqa: E402
from .propagator import WaveField, kernel_fft, min_box_size, propagate_linear  # noqa: E402
from .oscillatory import decay_series, kernel_quadrature, nyquist_points  # noqa: E402
from .decay_fit import DecaySeries, PowerLawFit, fit_power_law, is_admissible, strichartz_norm  # noqa: E402

__all__ = [
    "HEX",
    "SQUARE",
    "DispersionSymbol",
    "LatticeKind",
    "PhaseFunction",
    "WaveField",
    "kernel_fft",
    "min_box_size",
    "propagate_linear",
    "decay_series",
    "kernel_quadrature",
    "nyquist_points",
    "DecaySeries",
    "PowerLawFit",
    "fit_power_law",
    "is_admissible",
    "strichartz_norm",
]
