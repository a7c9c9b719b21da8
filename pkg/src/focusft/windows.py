"""Analysis windows carrying decay envelopes.

A window ``h`` is admissible when there are bounded envelopes with
``|h(t)| <= psi(t) / (1 + |t|)`` and ``|h'(t)| <= phi(t) / (1 + t**2)``.
The suprema of ``psi`` and ``phi`` enter every stability constant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .core import DomainError, Grid, lp_norm

_SUP_SAMPLES = 65537


@dataclass(frozen=True, eq=False)
class Window:
    """Real C^1 window with derivative, envelopes and cached norms."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    psi: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray], np.ndarray]
    norm_2: float
    norm_inf: float
    psi_inf: float
    phi_inf: float
    effective_support: float
    kind: str = "custom"
    param: float = float("nan")

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))

    @property
    def window_id(self) -> str:
        return self.name

    def to_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param}


def envelope_sup(envelope: Callable, half_width: float) -> float:
    """Supremum of a bounded envelope over ``[-half_width, half_width]``.

    Dense sampling locates the maximum, then a bounded scalar search polishes
    it so the returned value is not below a sample taken elsewhere.
    """
    t = np.linspace(-half_width, half_width, _SUP_SAMPLES)
    vals = envelope(t)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda s: -float(envelope(np.array([s]))[0]),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        best = max(best, -float(res.fun))
    return best


def gaussian_window(a: float) -> Window:
    """``h(t) = exp(-t**2 / a**2)``."""
    if not a > 0:
        raise DomainError(f"Gaussian window scale must be positive, got {a}")
    a = float(a)

    def h(t):
        return np.exp(-(t / a) ** 2)

    def dh(t):
        return -2.0 * t / a**2 * np.exp(-(t / a) ** 2)

    def psi(t):
        return (1.0 + np.abs(t)) * np.exp(-(t / a) ** 2)

    def phi(t):
        return (1.0 + t * t) * (2.0 * np.abs(t) / a**2) * np.exp(-(t / a) ** 2)

    support = a * np.sqrt(-np.log(1e-12))
    return Window(
        name=f"gaussian(a={a:g})",
        func=h, derivative=dh, psi=psi, phi=phi,
        norm_2=(a * a * np.pi / 2.0) ** 0.25,
        norm_inf=1.0,
        psi_inf=envelope_sup(psi, 4 * support),
        phi_inf=envelope_sup(phi, 4 * support),
        effective_support=support,
        kind="gaussian", param=a,
    )


def hann_window(w: float) -> Window:
    """``h(t) = cos(pi t / (2 w))**2`` on ``[-w, w]``, zero outside."""
    if not w > 0:
        raise DomainError(f"Hann half-width must be positive, got {w}")
    w = float(w)

    def h(t):
        inside = np.abs(t) <= w
        return np.where(inside, np.cos(np.pi * t / (2 * w)) ** 2, 0.0)

    def dh(t):
        inside = np.abs(t) <= w
        return np.where(inside, -np.pi / (2 * w) * np.sin(np.pi * t / w), 0.0)

    def psi(t):
        return (1.0 + np.abs(t)) * np.abs(h(t))

    def phi(t):
        return (1.0 + t * t) * np.abs(dh(t))

    return Window(
        name=f"hann(w={w:g})",
        func=h, derivative=dh, psi=psi, phi=phi,
        norm_2=np.sqrt(0.75 * w),
        norm_inf=1.0,
        psi_inf=envelope_sup(psi, 4 * w),
        phi_inf=envelope_sup(phi, 4 * w),
        effective_support=w,
        kind="hann", param=w,
    )


WINDOW_KINDS = {"gaussian": gaussian_window, "hann": hann_window}


def make_window(kind: str, param: float) -> Window:
    try:
        factory = WINDOW_KINDS[kind]
    except KeyError:
        raise DomainError(f"unknown window kind {kind!r}; expected one of {sorted(WINDOW_KINDS)}")
    return factory(param)


@dataclass(frozen=True)
class DecayReport:
    max_ratio_psi: float
    max_ratio_phi: float
    passed: bool


def verify_decay(window: Window, test_grid: Grid) -> DecayReport:
    """Check both decay inequalities against the cached envelope suprema."""
    reach = 4 * window.effective_support
    if test_grid.start > -reach or test_grid.stop < reach:
        raise ValueError(
            f"test grid [{test_grid.start}, {test_grid.stop}] must cover [-{reach}, {reach}]"
        )
    t = test_grid.points
    r_psi = float(np.max(np.abs(window(t)) * (1 + np.abs(t))) / window.psi_inf)
    r_phi = float(np.max(np.abs(window.derivative(t)) * (1 + t * t)) / window.phi_inf)
    tol = 1 + 1e-9
    return DecayReport(r_psi, r_phi, bool(r_psi <= tol and r_phi <= tol))


def quadrature_norms(window: Window, step: float = 1e-3) -> tuple[float, float]:
    """``(||h||_2, ||h||_inf)`` recomputed on a dense grid."""
    g = Grid.from_bounds(-8 * window.effective_support, 8 * window.effective_support,
                         window.effective_support * step)
    vals = window(g.points)
    return lp_norm(vals, g.step, 2), lp_norm(vals, g.step, np.inf)
