"""Deterministic test corpus and the reference grids it is designed for.

All signals are smooth, effectively time-limited to ``[-7, 7]`` seconds and
band-limited well inside the reference frequency grid, with unit L2 norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Grid, Signal

SEED = 20240917


@dataclass(frozen=True)
class Grids:
    x: Grid
    t: Grid
    w: Grid


def reference_grids(half_span: float = 16.0, dx: float = 1 / 32, dt: float = 1 / 8,
                    dw: float = 1 / 32) -> Grids:
    """Symmetric x, t and w grids; ``1 / (dw dx)`` must be an integer."""
    x = Grid.from_bounds(-half_span, half_span, dx)
    t = Grid.from_bounds(-half_span, half_span, dt)
    w_half = 0.5 / dx
    w = Grid.from_bounds(-w_half, w_half, dw)
    return Grids(x, t, w)


def _env(x, c, s):
    return np.exp(-0.5 * ((x - c) / s) ** 2)


def _band_limited_noise(x, rng, f_max):
    n = x.size
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=x[1] - x[0])
    spec *= np.exp(-0.5 * (freqs / (f_max / 3)) ** 2)
    return np.fft.irfft(spec, n)


def _normalized(values, grid, name):
    s = Signal(values, grid, name)
    return Signal(values / s.norm(), grid, name)


def make_corpus(x_grid: Grid) -> list[Signal]:
    """Twelve unit-norm test signals on ``x_grid``."""
    x = x_grid.points
    rng = np.random.default_rng(SEED)
    raw = [
        ("bump_narrow", _env(x, 0.0, 0.35)),
        ("bump_wide", _env(x, -1.0, 1.2)),
        ("bump_tone", _env(x, 1.5, 0.7) * np.cos(2 * np.pi * 3.0 * x)),
        ("linear_chirp_up", _env(x, 0.0, 1.8) * np.cos(2 * np.pi * (1.0 * x + 0.35 * x**2))),
        ("linear_chirp_down", _env(x, 0.5, 1.5) * np.cos(2 * np.pi * (-0.4 * x**2 + 2.5 * x))),
        ("quadratic_chirp", _env(x, 0.0, 1.6) * np.cos(2 * np.pi * (1.5 * x + 0.06 * x**3))),
        ("quadratic_chirp_complex", _env(x, -0.5, 1.4)
         * np.exp(2j * np.pi * (-2.0 * x + 0.08 * x**3))),
        ("two_chirps", _env(x, 0.0, 1.8) * (np.cos(2 * np.pi * (1.0 * x + 0.3 * x**2))
                                            + 0.8 * np.cos(2 * np.pi * (4.0 * x - 0.25 * x**2)))),
        ("two_transients", _env(x, -2.0, 0.25) * np.cos(2 * np.pi * 4.0 * x)
         + 0.7 * _env(x, 2.0, 0.4) * np.cos(2 * np.pi * 1.5 * x)),
        ("transient_on_tone", _env(x, 0.0, 2.0) * np.cos(2 * np.pi * 2.0 * x)
         + 1.5 * _env(x, 1.0, 0.15)),
        ("noise_burst", _env(x, 0.0, 1.0) * _band_limited_noise(x, rng, 6.0)),
        ("noise_burst_pair", (_env(x, -2.5, 0.6) + _env(x, 2.5, 0.6))
         * _band_limited_noise(x, rng, 4.0)),
    ]
    return [_normalized(v, x_grid, name) for name, v in raw]


def two_chirp_signal(x_grid: Grid) -> Signal:
    return next(s for s in make_corpus(x_grid) if s.name == "two_chirps")


def gaussian_bump_signal(x_grid: Grid) -> Signal:
    return next(s for s in make_corpus(x_grid) if s.name == "bump_wide")
