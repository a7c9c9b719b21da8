"""Regularized Renyi entropies and entropy-driven focus functions.

For every frame ``t`` the transform row is turned into a probability density
over frequency,

    rho(t, w) = (|L_k f(t, w)|**2 + r ||f||**2 u(w)) / (||L_k f(t, .)||**2 + r ||f||**2),

whose Renyi entropy ``g(t)`` drives the focus

    sigma(t) = 1 + A (g(t) - p / (1 - p) ln ||u||_p).

``g`` tends to ``p / (1 - p) ln ||u||_p`` where the signal has no energy, so
``sigma`` tends to 1 there.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .core import DomainError, Grid, Signal, lp_norm, trapezoid_integrate
from .transform import FocusFunction, TFPlane, analyze, constant_focus
from .windows import Window


class DensityError(ValueError):
    """A density is not normalized or cannot be formed."""


class RegularizationError(ValueError):
    """The regularization parameter is too small for a valid focus function."""


@dataclass(frozen=True)
class ReferenceDensity:
    """Gaussian ``u(w) = exp(-w**2 / a**2) / (a sqrt(pi))``."""

    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"reference density scale must be positive, got {self.a}")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return np.exp(-(w / self.a) ** 2) / (self.a * np.sqrt(np.pi))

    def norm_p(self, p: float) -> float:
        """Closed form ``(a sqrt(pi))**((1 - p) / p) * p**(-1 / (2 p))``."""
        return float((self.a * np.sqrt(np.pi)) ** ((1 - p) / p) * p ** (-1 / (2 * p)))

    def tail_entropy(self, p: float) -> float:
        """Limit ``p / (1 - p) ln ||u||_p`` of the entropy profile."""
        return p / (1 - p) * np.log(self.norm_p(p))


def gaussian_reference(a: float = 1.0) -> ReferenceDensity:
    return ReferenceDensity(a)


def renyi_entropy(rho, step: float, p: float) -> float:
    """``ln(integral rho**p) / (1 - p)`` for a normalized density."""
    if not p > 0 or p == 1:
        raise DomainError(f"Renyi order must be positive and != 1, got {p}")
    rho = np.asarray(rho, dtype=float)
    _check_density(rho, step)
    return float(np.log(trapezoid_integrate(rho**p, step)) / (1 - p))


def shannon_entropy(rho, step: float) -> float:
    """``-integral rho ln rho`` with ``0 ln 0 = 0``."""
    rho = np.asarray(rho, dtype=float)
    _check_density(rho, step)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(rho > 0, -rho * np.log(rho), 0.0)
    return float(trapezoid_integrate(integrand, step))


def _check_density(rho, step, tol=1e-6):
    if np.any(rho < 0):
        raise DensityError("density has negative values")
    mass = trapezoid_integrate(rho, step)
    if abs(mass - 1) > tol:
        raise DensityError(f"density integrates to {mass:.9g}, not 1")


def regularized_density(rows, f_norm: float, r: float, u: ReferenceDensity,
                        w_grid: Grid) -> np.ndarray:
    """Regularized density of one row (1-D) or of every row of a plane (2-D).

    ``f_norm`` is ``||f||_2`` (not squared).
    """
    if not f_norm > 0:
        raise DensityError("signal norm must be positive to form the density")
    if not r > 0:
        raise DomainError(f"regularization must be positive, got {r}")
    power = np.abs(np.asarray(rows)) ** 2
    reg = r * f_norm**2
    row_energy = trapezoid_integrate(power, w_grid.step, axis=-1)
    num = power + reg * u(w_grid.points)
    return num / (np.expand_dims(row_energy, -1) + reg)


@dataclass(frozen=True)
class EntropyConfig:
    """Parameters of the entropy focus.

    ``r=None`` means the minimal admissible value for the window and the
    reference focus. ``reference_focus=None`` means the constant 1.
    ``inverted`` flips the sign of the entropy deviation; it is an extension
    outside the bracket guarantees.
    """

    p: float = 3.0
    A: float = 0.5
    sigma_min: float = 0.5
    r: Optional[float] = None
    u: ReferenceDensity = field(default_factory=ReferenceDensity)
    reference_focus: Optional[FocusFunction] = None
    inverted: bool = False

    def __post_init__(self):
        if not self.p > 2:
            raise DomainError(f"Renyi order p must exceed 2, got {self.p}")
        if not self.A >= 0:
            raise DomainError(f"amplitude A must be non-negative, got {self.A}")
        if not 0 < self.sigma_min < 1:
            raise DomainError(f"sigma_min must lie in (0, 1), got {self.sigma_min}")
        if self.r is not None and not self.r > 0:
            raise DomainError(f"r must be positive, got {self.r}")

    def kappa(self, t_grid: Grid) -> FocusFunction:
        if self.reference_focus is not None:
            return self.reference_focus
        return constant_focus(t_grid, 1.0, self.sigma_min)

    def kappa_sup(self) -> float:
        return 1.0 if self.reference_focus is None else self.reference_focus.sup

    def r_min(self, window: Window) -> float:
        return r_min(self.kappa_sup(), self.A, self.p, self.sigma_min, window, self.u)

    def resolve_r(self, window: Window) -> float:
        return self.r_min(window) if self.r is None else self.r

    @property
    def slope(self) -> float:
        """``A p / (p - 1)``."""
        return self.A * self.p / (self.p - 1)


def _sup(kappa: Union[FocusFunction, float]) -> float:
    return kappa.sup if isinstance(kappa, FocusFunction) else float(kappa)


def window_mix(kappa_sup: float, window: Window, p: float) -> float:
    """``||k||_inf**(1-1/p) ||h||_inf**(2/p) ||h||_2**(2-2/p)``."""
    return (kappa_sup ** (1 - 1 / p) * window.norm_inf ** (2 / p)
            * window.norm_2 ** (2 - 2 / p))


def r_min(kappa, A: float, p: float, sigma_min: float, window: Window,
          u: ReferenceDensity) -> float:
    """Smallest regularization keeping the entropy focus above ``sigma_min``."""
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    if not 0 < sigma_min < 1:
        raise DomainError(f"sigma_min must lie in (0, 1), got {sigma_min}")
    return (A * p / ((p - 1) * (1 - sigma_min))
            * window_mix(_sup(kappa), window, p) / u.norm_p(p))


@dataclass(frozen=True, eq=False)
class EntropyProfile:
    values: np.ndarray
    grid: Grid
    p: float
    r: float
    limit: float


def entropy_profile(plane: TFPlane, f_norm: float, config: EntropyConfig,
                    window: Window, r: Optional[float] = None) -> EntropyProfile:
    """``g(t)`` for every frame of ``plane`` (computed with the reference focus)."""
    r = config.resolve_r(window) if r is None else r
    rho = regularized_density(plane.values, f_norm, r, config.u, plane.w_grid)
    p = config.p
    g = np.log(trapezoid_integrate(rho**p, plane.w_grid.step, axis=1)) / (1 - p)
    return EntropyProfile(g, plane.t_grid, p, r, config.u.tail_entropy(p))


@dataclass(frozen=True)
class PerFrameBounds:
    upper: np.ndarray
    lower: np.ndarray
    inside: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.inside))


def lemma2_bounds(plane: TFPlane, f_norm: float, config: EntropyConfig, window: Window,
                  profile: Optional[EntropyProfile] = None, rtol: float = 1e-9) -> PerFrameBounds:
    """Per-frame entropy bounds from the row energy and the row ``L^{2p}`` norm.

    ``inside`` tests membership in the hull of the two expressions.
    """
    p = config.p
    r = config.resolve_r(window) if profile is None else profile.r
    if profile is None:
        profile = entropy_profile(plane, f_norm, config, window, r)
    reg = r * f_norm**2
    un = config.u.norm_p(p)
    power = np.abs(plane.values) ** 2
    row_energy = trapezoid_integrate(power, plane.w_grid.step, axis=1)
    row_2p = trapezoid_integrate(power**p, plane.w_grid.step, axis=1) ** (1 / p)
    c = p / (1 - p)
    upper = c * np.log(reg * un / (row_energy + reg))
    lower = c * np.log((row_2p + reg * un) / reg)
    lo, hi = np.minimum(upper, lower), np.maximum(upper, lower)
    slack = rtol * np.maximum(1.0, np.abs(profile.values))
    inside = (profile.values >= lo - slack) & (profile.values <= hi + slack)
    return PerFrameBounds(upper, lower, inside)


def corollary2_uniform_bounds(config: EntropyConfig, window: Window,
                              r: Optional[float] = None) -> tuple[float, float]:
    """Frame-independent ``(upper, lower)`` entropy bounds."""
    p = config.p
    r = config.resolve_r(window) if r is None else r
    un = config.u.norm_p(p)
    ks = config.kappa_sup()
    c = p / (1 - p)
    ub = c * np.log(un / (1 + ks * window.norm_2**2 / r))
    lb = c * np.log(un + window_mix(ks, window, p) / r)
    return float(ub), float(lb)


def focus_upper_bound(config: EntropyConfig, window: Window, r: Optional[float] = None) -> float:
    """Upper end of the bracket ``[sigma_min, 1 + A p/(p-1) ln(1 + ||k|| ||h||_2**2 / r)]``."""
    if config.A == 0:
        return 1.0
    r = config.resolve_r(window) if r is None else r
    return float(1 + config.slope * np.log1p(config.kappa_sup() * window.norm_2**2 / r))


def focus_from_entropy(profile: EntropyProfile, config: EntropyConfig, window: Window,
                       tail_tolerance: float = 1e-6) -> FocusFunction:
    """``sigma = 1 + A (g - limit)`` as a focus function."""
    rmin = config.r_min(window)
    if profile.r < rmin * (1 - 1e-12):
        raise RegularizationError(
            f"r={profile.r:.6g} is below r_min={rmin:.6g}; the focus could fall under sigma_min"
        )
    dev = profile.values - profile.limit
    if config.inverted:
        dev = -dev
    values = 1.0 + config.A * dev
    return FocusFunction(values, profile.grid, config.sigma_min, tail_tolerance,
                         name=f"entropy(p={config.p:g},A={config.A:g})")


def focus_from_plane(plane: TFPlane, f_norm: float, config: EntropyConfig,
                     window: Window, r: Optional[float] = None) -> FocusFunction:
    """Entropy focus computed from an already available plane."""
    if config.A == 0:
        return constant_focus(plane.t_grid, 1.0, config.sigma_min)
    profile = entropy_profile(plane, f_norm, config, window, r)
    return focus_from_entropy(profile, config, window)


def entropy_focus(f: Signal, window: Window, config: EntropyConfig, t_grid: Grid,
                  w_grid: Grid, r: Optional[float] = None) -> FocusFunction:
    """``sigma_{f, kappa, p}``: analyze with the reference focus, then map entropy to focus."""
    if config.A == 0:
        return constant_focus(t_grid, 1.0, config.sigma_min)
    kappa = config.kappa(t_grid)
    plane = analyze(f, window, kappa, w_grid, t_grid=t_grid)
    return focus_from_plane(plane, f.norm(), config, window, r)


def focus_builder(window: Window, config: EntropyConfig, t_grid: Grid, w_grid: Grid):
    """Signal -> focus map for :func:`focusft.transform.adaptive_analyze`."""
    def build(f: Signal) -> FocusFunction:
        return entropy_focus(f, window, config, t_grid, w_grid)
    return build


@dataclass(frozen=True)
class KappaLipschitz:
    lhs: float
    kappa_distance: float
    ratio: float


def focus_kappa_lipschitz_check(f: Signal, kappa1: FocusFunction, kappa2: FocusFunction,
                                window: Window, config: EntropyConfig,
                                w_grid: Grid) -> KappaLipschitz:
    """Sensitivity of the entropy focus to the reference focus, each with its own minimal r."""
    sig = []
    for kappa in (kappa1, kappa2):
        cfg = replace(config, reference_focus=kappa, r=None)
        sig.append(entropy_focus(f, window, cfg, kappa.grid, w_grid))
    lhs = sig[1].sup_distance(sig[0])
    dk = kappa2.sup_distance(kappa1)
    ratio = lhs / (dk * config.slope) if dk > 0 else 0.0
    return KappaLipschitz(lhs, dk, ratio)


def c4_constant(f_norm: float, g_norm: float, config: EntropyConfig, window: Window,
                r: Optional[float] = None) -> float:
    p = config.p
    r = config.resolve_r(window) if r is None else r
    mix = (config.kappa_sup() ** ((p - 1) / p) * window.norm_inf ** (2 / p)
           * window.norm_2 ** (2 * (p - 1) / p))
    return ((f_norm + g_norm) / (r * max(f_norm**2, g_norm**2))
            * (mix + window.norm_inf**2 + r))


@dataclass(frozen=True)
class SignalLipschitz:
    lhs: float
    c4: float
    rhs: float
    passed: bool


def focus_signal_lipschitz_check(f: Signal, g: Signal, window: Window, config: EntropyConfig,
                                 t_grid: Grid, w_grid: Grid,
                                 rel_slack: float = 0.01) -> SignalLipschitz:
    """Compare ``||sigma_f - sigma_g||_inf`` with ``C4 A p/(p-1) ||f - g||_2``."""
    nf, ng = f.norm(), g.norm()
    if nf == 0 or ng == 0:
        raise DensityError("signal Lipschitz check needs nonzero signals")
    sf = entropy_focus(f, window, config, t_grid, w_grid)
    sg = entropy_focus(g, window, config, t_grid, w_grid)
    lhs = sf.sup_distance(sg)
    c4 = c4_constant(nf, ng, config, window)
    rhs = c4 * config.slope * lp_norm(f.samples - g.samples, f.grid.step)
    return SignalLipschitz(lhs, c4, rhs, bool(lhs <= rhs * (1 + rel_slack) + 1e-12))
