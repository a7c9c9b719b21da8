"""Explicit stability constants and empirical checks of the inequalities they enter.

Each ``verify_*`` function measures the left-hand side of an inequality on
sampled data and compares it with the permitted right-hand side; a relative
slack covers discretization only.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .core import DomainError, Grid, Signal, lp_norm, trapezoid_integrate
from .transform import (FocusFunction, TFPlane, analyze, k_sigma, left_inverse)
from .windows import Window

QUAD_SLACK = 0.01


class BoundsError(ArithmeticError):
    """A constant came out non-positive or non-finite."""


@dataclass
class Check:
    """One measured inequality ``lhs <= rhs``."""

    name: str
    lhs: float
    rhs: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _leq(lhs, rhs, slack=QUAD_SLACK, atol=1e-12):
    return bool(lhs <= rhs * (1 + slack) + atol)


def _shifted_energies(window: Window, sigma: FocusFunction):
    """``integral h(x sigma(x + t))**2 dx`` for t on the focus grid and its midpoints."""
    reach = window.effective_support / sigma.sigma_min
    xg = Grid.from_bounds(-reach, reach, reach / 2048)
    x = xg.points
    shifts = sigma.grid.refine(2).points
    vals = np.empty(shifts.size)
    for i in range(0, shifts.size, 64):
        hv = window(x[None, :] * sigma(x[None, :] + shifts[i:i + 64, None]))
        vals[i:i + 64] = trapezoid_integrate(hv * hv, xg.step, axis=1)
    return shifts, vals


def frame_bounds(window: Window, sigma: FocusFunction) -> tuple[float, float]:
    """Lower and upper constants of the frame-like energy inequality."""
    _, vals = _shifted_energies(window, sigma)
    c_f = sigma.sigma_min * float(vals.min())
    tg = sigma.grid.refine(4)
    t = tg.points
    s = sigma(t)
    C_f = float(trapezoid_integrate(window(s * t) ** 2 * s, tg.step))
    if not c_f > 0 or not np.isfinite(C_f):
        raise BoundsError(f"frame constants c_f={c_f}, C_f={C_f}; grid or truncation misconfigured")
    return c_f, C_f


def frame_bound_minimizer(window: Window, sigma: FocusFunction) -> float:
    """Shift at which the grid minimum of the lower constant is reached (not claimed attained)."""
    shifts, vals = _shifted_energies(window, sigma)
    return float(shifts[int(np.argmin(vals))])


def verify_frame_sandwich(f: Signal, window: Window, sigma: FocusFunction, w_grid: Grid,
                          plane: Optional[TFPlane] = None) -> Check:
    """``c_f ||f||**2 <= ||L_sigma f||**2 <= C_f ||f||**2``.

    The quadrature error is estimated by comparing the plane energy with
    ``integral |f|**2 k_sigma``, the same quantity computed in the x domain.
    """
    plane = analyze(f, window, sigma, w_grid) if plane is None else plane
    c_f, C_f = frame_bounds(window, sigma)
    nf2 = f.norm() ** 2
    energy = plane.norm() ** 2
    if nf2 == 0:
        return Check("frame_sandwich", energy, 0.0, energy == 0.0,
                     {"c_f": c_f, "C_f": C_f, "lower": 0.0, "energy": energy})
    k = k_sigma(window, sigma, f.grid, oversample=1, t_grid=plane.t_grid)
    alt = float(trapezoid_integrate(np.abs(f.samples) ** 2 * k, f.grid.step))
    quad_err = abs(energy - alt) / max(alt, 1e-300)
    slack = max(QUAD_SLACK, 10 * quad_err)
    ok_hi = energy <= C_f * nf2 * (1 + slack)
    ok_lo = energy >= c_f * nf2 * (1 - slack)
    return Check("frame_sandwich", energy, C_f * nf2, bool(ok_hi and ok_lo),
                 {"c_f": c_f, "C_f": C_f, "lower": c_f * nf2, "energy": energy,
                  "f_norm2": nf2, "quad_err": quad_err, "slack": slack})


def c1_constant(window: Window, sigma: FocusFunction, kappa: FocusFunction) -> float:
    sm = sigma.sigma_min
    return (np.sqrt(2) / 2 * window.psi_inf / sm
            + np.sqrt(np.pi / 2) * min(np.sqrt(kappa.sup), np.sqrt(sigma.sup))
            * window.phi_inf / sm**1.5)


def c1_prime(window: Window, sigma_f: FocusFunction) -> float:
    sm = sigma_f.sigma_min
    return (np.sqrt(2) / 2 * window.psi_inf / sm
            + np.sqrt(np.pi / 2) * window.phi_inf / sm**1.5 * np.sqrt(sigma_f.sup))


def kp_constant(window: Window, sigma: FocusFunction, kappa: FocusFunction, p: float) -> float:
    if not p >= 2 or np.isinf(p):
        raise DomainError(f"K_p is defined for p in [2, inf), got {p}")
    sm = sigma.sigma_min
    first = (1 / (2 * sm) * sigma.sup ** ((p - 2) / (2 * p)) * window.norm_inf ** (2 / p)
             * window.norm_2 ** ((p - 2) / p))
    second = (np.sqrt(np.pi) / (2 ** ((p + 4) / (2 * p)) * sm ** ((3 * p + 4) / (2 * p)))
              * np.sqrt(kappa.sup) * window.phi_inf)
    return float(first + second)


def verify_prop1(f: Signal, window: Window, sigma: FocusFunction, kappa: FocusFunction,
                 w_grid: Grid, planes=None) -> Check:
    """``||L_sigma f - L_kappa f|| <= C1 ||sigma - kappa||_inf ||f||``."""
    ps, pk = planes if planes is not None else (analyze(f, window, sigma, w_grid),
                                                 analyze(f, window, kappa, w_grid))
    lhs = (ps - pk).norm()
    c1 = c1_constant(window, sigma, kappa)
    dist = sigma.sup_distance(kappa)
    rhs = c1 * dist * f.norm()
    return Check("focus_perturbation_l2", lhs, rhs, _leq(lhs, rhs),
                 {"C1": c1, "focus_distance": dist})


def verify_prop3(f: Signal, window: Window, sigma: FocusFunction, kappa: FocusFunction,
                 w_grid: Grid, p: float, planes=None) -> Check:
    """Per-frame ``||L_sigma f(t,.) - L_kappa f(t,.)||_p <= K_p ||sigma - kappa|| ||f||``."""
    ps, pk = planes if planes is not None else (analyze(f, window, sigma, w_grid),
                                                 analyze(f, window, kappa, w_grid))
    diff = np.abs(ps.values - pk.values)
    per_t = trapezoid_integrate(diff**p, ps.w_grid.step, axis=1) ** (1 / p)
    lhs = float(per_t.max())
    kp = kp_constant(window, sigma, kappa, p)
    dist = sigma.sup_distance(kappa)
    rhs = kp * dist * f.norm()
    return Check(f"focus_perturbation_slice_p{p:g}", lhs, rhs, _leq(lhs, rhs), {"Kp": kp, "p": p})


def lemma1_bound(window: Window, sigma: FocusFunction, f_norm: float, p: float) -> float:
    """``||sigma||**((p-2)/2) ||h||_inf**2 ||h||_2**(p-2) ||f||**p``."""
    return float(sigma.sup ** ((p - 2) / 2) * window.norm_inf**2
                 * window.norm_2 ** (p - 2) * f_norm**p)


def slice_norms(plane: TFPlane, p: float) -> np.ndarray:
    """``||F(t, .)||_p**p`` for every frame."""
    return trapezoid_integrate(np.abs(plane.values) ** p, plane.w_grid.step, axis=1)


def verify_lemma1(f: Signal, window: Window, sigma: FocusFunction, w_grid: Grid, p: float,
                  plane: Optional[TFPlane] = None) -> Check:
    plane = analyze(f, window, sigma, w_grid) if plane is None else plane
    lhs = float(slice_norms(plane, p).max())
    rhs = lemma1_bound(window, sigma, f.norm(), p)
    return Check(f"slice_bound_p{p:g}", lhs, rhs, _leq(lhs, rhs, slack=1e-9), {"p": p})


def verify_prop2_stability(F: TFPlane, window: Window, sigma: FocusFunction,
                           kappa: FocusFunction, x_grid: Grid) -> float:
    """``||L^+_sigma F - L^+_kappa F|| / (||sigma - kappa||_inf ||F||)``.

    No explicit constant is available for this inequality, so only the
    ratio is returned; callers check that it stays bounded as the two focus
    functions approach each other.
    """
    a = left_inverse(F, window, sigma, x_grid)
    b = left_inverse(F, window, kappa, x_grid)
    dist = sigma.sup_distance(kappa)
    if dist == 0:
        return 0.0
    num = lp_norm(a.samples - b.samples, x_grid.step)
    return float(num / (dist * F.norm()))


@dataclass
class BoundsReport:
    """Constants and checks for one (signal, window, focus) configuration or a sweep."""

    constants: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check):
        self.checks.append(check)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "constants": self.constants,
                "n_checks": len(self.checks),
                "failures": [c.to_dict() for c in self.failures()],
                "checks": [c.to_dict() for c in self.checks]}
