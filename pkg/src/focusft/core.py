"""Uniform grids, trapezoidal quadrature and norms.

Every integral over the real line is realized on a finite uniform grid with
the trapezoidal rule; integrands are expected to be negligible at the grid
edges.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class NonFiniteError(ValueError):
    """Input data contains NaN or infinite values."""


class GridError(ValueError):
    """Grids are inconsistent with each other or with the data."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``start + i * step`` for ``i`` in ``range(count)``."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if not np.isfinite(self.start) or not np.isfinite(self.step):
            raise GridError("grid start and step must be finite")
        if self.step <= 0:
            raise GridError(f"grid step must be positive, got {self.step}")
        if int(self.count) != self.count or self.count < 2:
            raise GridError(f"grid count must be an integer >= 2, got {self.count}")
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def from_bounds(cls, start: float, stop: float, step: float) -> "Grid":
        """Grid from ``start`` to ``stop`` inclusive; ``stop - start`` must be a multiple of ``step``."""
        n = (stop - start) / step
        count = int(round(n))
        if abs(n - count) > 1e-9 * max(1.0, abs(n)):
            raise GridError(f"[{start}, {stop}] is not a whole number of steps {step}")
        return cls(start, step, count + 1)

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    def refine(self, factor: int) -> "Grid":
        """Same span with ``factor`` times smaller step."""
        return Grid(self.start, self.step / factor, (self.count - 1) * factor + 1)

    def to_dict(self) -> dict:
        return {"start": self.start, "step": self.step, "count": self.count}


@dataclass(frozen=True, eq=False)
class Signal:
    """Samples of a function of time on a uniform grid."""

    samples: np.ndarray
    grid: Grid
    name: str = field(default="signal")

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise GridError("signal samples must be one-dimensional")
        if samples.shape[0] != self.grid.count:
            raise GridError(
                f"signal has {samples.shape[0]} samples but grid has {self.grid.count} points"
            )
        if not np.all(np.isfinite(samples)):
            raise NonFiniteError("signal contains non-finite samples")
        if not np.iscomplexobj(samples):
            samples = samples.astype(np.float64, copy=False)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __mul__(self, c):
        return Signal(c * self.samples, self.grid, self.name)

    __rmul__ = __mul__

    def __add__(self, other: "Signal") -> "Signal":
        _check_same_grid(self.grid, other.grid)
        return Signal(self.samples + other.samples, self.grid, self.name)

    def __sub__(self, other: "Signal") -> "Signal":
        _check_same_grid(self.grid, other.grid)
        return Signal(self.samples - other.samples, self.grid, self.name)

    def norm(self) -> float:
        return lp_norm(self.samples, self.grid.step, 2)


def _check_same_grid(a: Grid, b: Grid):
    if a != b:
        raise GridError(f"grid mismatch: {a} vs {b}")


def trapezoid_weights(count: int) -> np.ndarray:
    """Trapezoidal weights for unit step: ones with halves at both ends."""
    w = np.ones(count)
    w[0] = w[-1] = 0.5
    return w


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("non-finite values in quadrature input")


def trapezoid_integrate(values, step: float, axis: int = -1):
    """Trapezoidal rule along ``axis`` with uniform ``step``."""
    values = np.asarray(values)
    if values.shape[axis] < 2:
        raise ValueError("trapezoid_integrate needs at least two samples")
    _check_finite(values)
    return np.trapezoid(values, dx=step, axis=axis)


def lp_norm(values, step: float, p: float = 2) -> float:
    """``(integral |v|^p)^(1/p)``, or ``max |v|`` for ``p = inf``."""
    if not p >= 1:
        raise DomainError(f"L^p norm needs p >= 1 or inf, got {p}")
    a = np.abs(np.asarray(values))
    _check_finite(a)
    if np.isinf(p):
        return float(a.max())
    if p == 2:
        return float(np.sqrt(trapezoid_integrate(a * a, step)))
    return float(trapezoid_integrate(a**p, step) ** (1.0 / p))


def l2_norm_2d(matrix, step_t: float, step_w: float) -> float:
    """L2 norm of a plane sampled on a product grid (2-D trapezoid)."""
    m = np.asarray(matrix)
    if m.size == 0:
        raise ValueError("l2_norm_2d of an empty matrix")
    if m.ndim != 2:
        raise ValueError("l2_norm_2d expects a 2-D array")
    a2 = np.abs(m) ** 2
    _check_finite(a2)
    inner = trapezoid_integrate(a2, step_w, axis=1)
    return float(np.sqrt(trapezoid_integrate(inner, step_t)))


def inner_product(a, b, step: float) -> complex:
    """``integral a * conj(b)`` on a 1-D grid."""
    return complex(trapezoid_integrate(np.asarray(a) * np.conj(b), step))


def inner_product_2d(a, b, step_t: float, step_w: float) -> complex:
    prod = np.asarray(a) * np.conj(b)
    return complex(trapezoid_integrate(trapezoid_integrate(prod, step_w, axis=1), step_t))
