"""Time-focused short-time Fourier transform with entropy-driven focus functions."""
from .core import DomainError, Grid, GridError, NonFiniteError, Signal
from .entropy import EntropyConfig, ReferenceDensity, entropy_focus, r_min
from .inversion import InversionTrace, iterative_invert
from .transform import (FocusError, FocusFunction, TFPlane, adaptive_analyze, analyze,
                        bump_focus, constant_focus, left_inverse)
from .windows import Window, gaussian_window, hann_window, make_window

__all__ = [
    "DomainError", "EntropyConfig", "FocusError", "FocusFunction", "Grid", "GridError",
    "InversionTrace", "NonFiniteError", "ReferenceDensity", "Signal", "TFPlane", "Window",
    "adaptive_analyze", "analyze", "bump_focus", "constant_focus", "entropy_focus",
    "gaussian_window", "hann_window", "iterative_invert", "left_inverse", "make_window", "r_min",
]
__version__ = "0.1.0"
