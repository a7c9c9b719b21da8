"""Approximate inversion of the adaptive transform by focus re-estimation.

Starting from the focus estimated on ``M f`` itself, alternate between the
fixed-focus left inverse and re-computing the entropy focus of the current
signal estimate. Convergence is not guaranteed; the trace records every
step and divergence is reported.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import c1_prime
from .core import Grid, Signal, lp_norm
from .entropy import EntropyConfig, DensityError, entropy_focus, focus_from_plane
from .transform import FocusFunction, TFPlane, left_inverse
from .windows import Window

log = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 10.0


@dataclass
class Iterate:
    signal: Signal
    focus: FocusFunction
    residual: float


@dataclass
class InversionTrace:
    iterates: list = field(default_factory=list)
    converged: bool = False
    iterations_used: int = 0

    def residuals(self) -> list:
        return [it.residual for it in self.iterates]

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations_used": self.iterations_used,
            "iterations": [
                {"iteration": i + 1,
                 "residual": it.residual if np.isfinite(it.residual) else None,
                 "focus_min": float(it.focus.values.min()),
                 "focus_max": float(it.focus.values.max())}
                for i, it in enumerate(self.iterates)
            ],
        }


class InversionDiverged(RuntimeError):
    def __init__(self, message: str, trace: InversionTrace):
        super().__init__(message)
        self.trace = trace


def estimate_focus_from_plane(plane: TFPlane, f_norm_estimate: float, config: EntropyConfig,
                              window: Window) -> FocusFunction:
    """Entropy focus with ``plane`` standing in for the reference-focus transform."""
    if not f_norm_estimate > 0:
        raise DensityError("signal norm estimate must be positive")
    return focus_from_plane(plane, f_norm_estimate, config, window)


def iterative_invert(Mf: TFPlane, window: Window, config: EntropyConfig, x_grid: Grid,
                     max_iters: int = 20, tol: float = 1e-10
                     ) -> tuple[Signal, FocusFunction, InversionTrace]:
    """Recover ``f`` from ``M f`` without knowing its focus function.

    The residual of iteration k is ``||f_k - f_{k-1}|| / ||f_k||``; the first
    iteration has no predecessor and records ``inf``. When a focus update
    leaves the focus unchanged the next iterate would repeat the current
    one, so the iteration stops as converged.
    """
    trace = InversionTrace()
    f_norm = Mf.norm() / window.norm_2
    sigma = estimate_focus_from_plane(Mf, f_norm, config, window)
    prev: Optional[Signal] = None
    best = np.inf
    for k in range(1, max_iters + 1):
        f_k = left_inverse(Mf, window, sigma, x_grid)
        nk = f_k.norm()
        residual = np.inf if prev is None else lp_norm(f_k.samples - prev.samples, x_grid.step) / nk
        trace.iterates.append(Iterate(f_k, sigma, residual))
        trace.iterations_used = k
        log.debug("iteration %d residual %.3e", k, residual)
        if residual <= tol:
            trace.converged = True
            return f_k, sigma, trace
        best = min(best, residual)
        if np.isfinite(residual) and residual > DIVERGENCE_FACTOR * best:
            raise InversionDiverged(
                f"residual {residual:.3e} grew more than {DIVERGENCE_FACTOR}x above its minimum {best:.3e}",
                trace)
        new_sigma = entropy_focus(f_k, window, config, Mf.t_grid, Mf.w_grid)
        if np.array_equal(new_sigma.values, sigma.values):
            trace.converged = True
            return f_k, sigma, trace
        sigma = new_sigma
        prev = f_k
    return f_k, sigma, trace


def inversion_error_bound(sigma_est: FocusFunction, sigma_true: FocusFunction,
                          window: Window, f_norm: float) -> float:
    """A-priori bound on ``||L_{sigma_est} f - M f||`` from the focus error."""
    return sigma_true.sup_distance(sigma_est) * c1_prime(window, sigma_true) * f_norm
