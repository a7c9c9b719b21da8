"""Time-focused short-time Fourier transform.

For a focus function ``sigma`` the atoms are

    h_{t,w,sigma}(x) = sqrt(sigma(t)) * exp(2i pi w x) * h(sigma(t) (x - t))

and the fixed-focus transform is ``L_sigma f(t, w) = <f, h_{t,w,sigma}>``.
Each t-row is one discrete Fourier transform of the windowed signal, so rows
are computed with an FFT of length ``N = 1 / (dw * dx)``; the x-grid and the
w-grid must be commensurate in that sense.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .core import (DomainError, Grid, GridError, NonFiniteError, Signal,
                   l2_norm_2d, trapezoid_weights)
from .windows import Window

TAIL_TOLERANCE = 1e-6
LIPSCHITZ_CAP = 50.0
_CHUNK = 128


class FocusError(ValueError):
    """A focus function violates the class constraints."""


class WeightUnderflowError(ArithmeticError):
    """The left-inverse weight is not bounded away from zero on the grid."""


@dataclass(frozen=True, eq=False)
class FocusFunction:
    """Sampled focus function with floor ``sigma_min`` and unit tails.

    ``func``, when given, is the exact evaluator used between samples;
    otherwise a cubic spline through the samples is used, clamped to the end
    values outside the grid.
    """

    values: np.ndarray
    grid: Grid
    sigma_min: float
    tail_tolerance: float = TAIL_TOLERANCE
    lipschitz_cap: float = LIPSCHITZ_CAP
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "focus"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.count,):
            raise GridError(f"focus has {v.shape} values for a grid of {self.grid.count}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("focus function has non-finite values")
        if not 0 < self.sigma_min < 1:
            raise FocusError(f"sigma_min must lie in (0, 1), got {self.sigma_min}")
        if v.min() < self.sigma_min:
            raise FocusError(f"focus value {v.min():.6g} below sigma_min={self.sigma_min}")
        if abs(v[0] - 1) > self.tail_tolerance or abs(v[-1] - 1) > self.tail_tolerance:
            raise FocusError(
                f"focus tails {v[0]:.9g}, {v[-1]:.9g} do not reach 1 within {self.tail_tolerance}"
            )
        jump = np.max(np.abs(np.diff(v)))
        if jump > self.lipschitz_cap * self.grid.step:
            raise FocusError(f"focus jump {jump:.3g} exceeds Lipschitz cap x step")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_spline", None)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(t), dtype=float)
        if self._spline is None:
            object.__setattr__(self, "_spline", CubicSpline(self.grid.points, self.values))
        clamped = np.clip(t, self.grid.start, self.grid.stop)
        return self._spline(clamped)

    @property
    def sup(self) -> float:
        return float(self.values.max())

    def sup_distance(self, other: "FocusFunction") -> float:
        """``||self - other||_inf`` over the samples."""
        if self.grid != other.grid:
            return float(np.max(np.abs(self.values - other(self.grid.points))))
        return float(np.max(np.abs(self.values - other.values)))

    def with_values(self, values, name=None) -> "FocusFunction":
        return FocusFunction(values, self.grid, self.sigma_min, self.tail_tolerance,
                             self.lipschitz_cap, None, name or self.name)


def constant_focus(grid: Grid, value: float = 1.0, sigma_min: float = 0.5,
                   tail_tolerance: float = TAIL_TOLERANCE) -> FocusFunction:
    """``sigma = value`` everywhere.

    A constant other than 1 does not tend to 1, so the tail tolerance is
    widened to admit it; such functions are analysis tools, not members of
    the focus class.
    """
    tol = max(tail_tolerance, abs(value - 1.0))
    return FocusFunction(np.full(grid.count, float(value)), grid, sigma_min, tol,
                         func=lambda t: np.full(np.shape(t), float(value)),
                         name=f"constant({value:g})")


def bump(t, center: float = 0.0, width: float = 1.0):
    """Gaussian bump with unit height."""
    return np.exp(-0.5 * ((np.asarray(t, dtype=float) - center) / width) ** 2)


def bump_focus(grid: Grid, height: float, center: float = 0.0, width: float = 1.0,
               sigma_min: float = 0.5, base: Optional[FocusFunction] = None) -> FocusFunction:
    """``base + height * bump`` (``base`` defaults to the constant 1)."""
    if base is None:
        def f(t):
            return 1.0 + height * bump(t, center, width)
    else:
        def f(t):
            return base(t) + height * bump(t, center, width)
    return FocusFunction(f(grid.points), grid, sigma_min, func=f,
                         name=f"bump(h={height:g},c={center:g},w={width:g})")


@dataclass(frozen=True, eq=False)
class TFPlane:
    """Transform values indexed ``[t_index, w_index]``."""

    values: np.ndarray
    t_grid: Grid
    w_grid: Grid
    window_id: str = ""
    focus_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.t_grid.count, self.w_grid.count):
            raise GridError(
                f"plane shape {v.shape} does not match grids "
                f"({self.t_grid.count}, {self.w_grid.count})"
            )
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("plane has non-finite entries")
        object.__setattr__(self, "values", v.astype(np.complex128, copy=False))

    def norm(self) -> float:
        """``||F||_{L^2(R^2)}``."""
        return l2_norm_2d(self.values, self.t_grid.step, self.w_grid.step)

    def __sub__(self, other: "TFPlane") -> "TFPlane":
        if self.t_grid != other.t_grid or self.w_grid != other.w_grid:
            raise GridError("plane grids differ")
        return TFPlane(self.values - other.values, self.t_grid, self.w_grid)


def _threads(workers: Optional[int]) -> int:
    if workers is None:
        workers = int(os.environ.get("FOCUSFT_THREADS", "1") or 1)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def fft_length(x_grid: Grid, w_grid: Grid) -> int:
    """FFT length ``1 / (dw dx)``; raises when it is not an integer."""
    n = 1.0 / (w_grid.step * x_grid.step)
    m = int(round(n))
    if m < 1 or abs(n - m) > 1e-9 * n:
        raise GridError(
            f"frequency step {w_grid.step} and time step {x_grid.step} are not "
            f"commensurate: 1/(dw dx) = {n} is not an integer"
        )
    return m


def _phase(a):
    """``exp(-2i pi a)`` with ``a`` reduced modulo 1 first."""
    return np.exp(-2j * np.pi * np.mod(a, 1.0))


def focused_atom(window: Window, t: float, w: float, sigma_t: float, x_grid: Grid) -> np.ndarray:
    """Samples of ``sqrt(s) exp(2i pi w x) h(s (x - t))`` on ``x_grid``."""
    if not sigma_t > 0:
        raise DomainError(f"focus value must be positive, got {sigma_t}")
    x = x_grid.points
    return np.sqrt(sigma_t) * np.conj(_phase(w * x)) * window(sigma_t * (x - t))


def _frame_windows(window, sig_t, t, x):
    """``sqrt(s_j) h(s_j (x - t_j))`` as a (frames, samples) array."""
    s = sig_t[:, None]
    return np.sqrt(s) * window(s * (x[None, :] - t[:, None]))


def _rows_fft(gw, x_grid, w_grid, n_fft):
    """``sum_n gw[:, n] exp(-2i pi w_k x_n)`` for every row, via folded FFTs."""
    frames, nx = gw.shape
    n_idx = np.arange(nx)
    pre = gw * _phase(w_grid.start * x_grid.step * n_idx)[None, :]
    reps = -(-nx // n_fft)
    if reps * n_fft != nx:
        pre = np.concatenate([pre, np.zeros((frames, reps * n_fft - nx), complex)], axis=1)
    folded = pre.reshape(frames, reps, n_fft).sum(axis=1)
    spec = np.fft.fft(folded, axis=1)
    k = np.arange(w_grid.count)
    post = _phase(w_grid.points * x_grid.start)
    return spec[:, k % n_fft] * post[None, :]


def _rows_direct(gw, x_grid, w_grid):
    kernel = _phase(np.outer(x_grid.points, w_grid.points))
    return gw @ kernel


def _check_signal_grid(f: Signal, x_grid: Optional[Grid]):
    if x_grid is not None and x_grid != f.grid:
        raise GridError("signal grid differs from the requested x grid")


def analyze(f: Signal, window: Window, sigma: FocusFunction, w_grid: Grid,
            t_grid: Optional[Grid] = None, method: str = "fft",
            workers: Optional[int] = None) -> TFPlane:
    """Fixed-focus transform ``L_sigma f`` on ``t_grid x w_grid``.

    ``method="direct"`` evaluates every inner product as an explicit
    quadrature sum and is kept as a cross-check of the FFT path.
    ``t_grid`` defaults to the focus grid.
    """
    t_grid = sigma.grid if t_grid is None else t_grid
    sig_t = sigma.values if t_grid == sigma.grid else sigma(t_grid.points)
    x = f.grid.points
    t = t_grid.points
    dx = f.grid.step
    weighted = f.samples * trapezoid_weights(f.grid.count) * dx
    if method == "fft":
        n_fft = fft_length(f.grid, w_grid)

        def rows(sl):
            return _rows_fft(weighted[None, :] * _frame_windows(window, sig_t[sl], t[sl], x),
                             f.grid, w_grid, n_fft)
    elif method == "direct":
        def rows(sl):
            return _rows_direct(weighted[None, :] * _frame_windows(window, sig_t[sl], t[sl], x),
                                f.grid, w_grid)
    else:
        raise ValueError(f"unknown method {method!r}")

    slices = [slice(i, min(i + _CHUNK, t.size)) for i in range(0, t.size, _CHUNK)]
    n_threads = min(_threads(workers), len(slices))
    if n_threads > 1:
        with ThreadPoolExecutor(n_threads) as pool:
            parts = list(pool.map(rows, slices))
    else:
        parts = [rows(sl) for sl in slices]
    values = np.concatenate(parts, axis=0)
    return TFPlane(values, t_grid, w_grid, window.window_id, sigma.name)


def adaptive_analyze(f: Signal, window: Window, focus_builder: Callable[[Signal], FocusFunction],
                     w_grid: Grid, **kwargs) -> tuple[TFPlane, FocusFunction]:
    """``M f = L_{sigma_f} f`` with ``sigma_f = focus_builder(f)``."""
    sigma_f = focus_builder(f)
    return analyze(f, window, sigma_f, w_grid, **kwargs), sigma_f


def k_sigma(window: Window, sigma: FocusFunction, x_grid: Grid, oversample: int = 4,
            t_grid: Optional[Grid] = None) -> np.ndarray:
    """Left-inverse weight ``k(x) = integral sigma(t) h(sigma(t)(x - t))**2 dt``.

    The t-integral runs over the focus grid (or ``t_grid``) refined
    ``oversample`` times; ``oversample=1`` gives the weight that makes the
    discrete left inverse exact on that grid.
    """
    base = sigma.grid if t_grid is None else t_grid
    fine = base.refine(oversample) if oversample > 1 else base
    s_all = sigma.values if fine == sigma.grid else sigma(fine.points)
    tw = trapezoid_weights(fine.count) * fine.step
    x = x_grid.points
    t_all = fine.points
    k = np.zeros(x.size)
    for i in range(0, t_all.size, _CHUNK):
        s = s_all[i:i + _CHUNK, None]
        hv = window(s * (x[None, :] - t_all[i:i + _CHUNK, None]))
        k += (tw[i:i + _CHUNK, None] * s * hv * hv).sum(axis=0)
    floor = 1e-12 * window.norm_2**2
    if not np.all(np.isfinite(k)) or k.min() <= floor:
        raise WeightUnderflowError(
            f"left-inverse weight min {k.min():.3g} is not positive; the t grid "
            "must cover the x grid and resolve the dilated window"
        )
    return k


def adjoint(F: TFPlane, window: Window, sigma: FocusFunction, x_grid: Grid,
            workers: Optional[int] = None) -> Signal:
    """``(L_sigma^* F)(x) = double integral F(t, w) h_{t,w,sigma}(x) dt dw``."""
    t_grid, w_grid = F.t_grid, F.w_grid
    sig_t = sigma.values if t_grid == sigma.grid else sigma(t_grid.points)
    n_fft = fft_length(x_grid, w_grid)
    x = x_grid.points
    t = t_grid.points
    nx = x.size
    coef = (F.values * (trapezoid_weights(w_grid.count) * w_grid.step)[None, :]
            * np.conj(_phase(w_grid.points * x_grid.start))[None, :])
    k = np.arange(w_grid.count) % n_fft
    n_idx = np.arange(nx)
    post = np.conj(_phase(w_grid.start * x_grid.step * n_idx))
    tw = trapezoid_weights(t_grid.count) * t_grid.step

    def part(sl):
        folded = np.zeros((coef[sl].shape[0], n_fft), complex)
        np.add.at(folded, (slice(None), k), coef[sl])
        inner = np.fft.ifft(folded, axis=1) * n_fft
        inner = inner[:, n_idx % n_fft] * post[None, :]
        frames = _frame_windows(window, sig_t[sl], t[sl], x)
        return (tw[sl, None] * frames * inner).sum(axis=0)

    slices = [slice(i, min(i + _CHUNK, t.size)) for i in range(0, t.size, _CHUNK)]
    n_threads = min(_threads(workers), len(slices))
    if n_threads > 1:
        with ThreadPoolExecutor(n_threads) as pool:
            parts = list(pool.map(part, slices))
    else:
        parts = [part(sl) for sl in slices]
    out = np.zeros(nx, complex)
    for p in parts:
        out += p
    return Signal(out, x_grid, "adjoint")


def left_inverse(F: TFPlane, window: Window, sigma: FocusFunction, x_grid: Grid,
                 oversample: int = 4, workers: Optional[int] = None) -> Signal:
    """``(1 / k_sigma) L_sigma^* F``."""
    k = k_sigma(window, sigma, x_grid, oversample, t_grid=F.t_grid)
    adj = adjoint(F, window, sigma, x_grid, workers)
    return Signal(adj.samples / k, x_grid, "reconstruction")
