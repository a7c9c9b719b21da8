"""The full battery of inequality checks run by ``focusft verify``.

Every check is evaluated as stated, with the published constants. Where a
stated bound can be beaten by valid inputs, a corrected companion bound is
reported under ``supplementary``; it never affects the pass/fail verdict.
"""
from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bounds import (BoundsReport, Check, lemma1_bound, slice_norms,
                     verify_frame_sandwich, verify_lemma1, verify_prop1, verify_prop2_stability,
                     verify_prop3)
from .core import Signal, trapezoid_integrate
from .corpus import Grids
from .entropy import (EntropyConfig, corollary2_uniform_bounds, entropy_profile,
                      focus_from_entropy, focus_kappa_lipschitz_check,
                      focus_signal_lipschitz_check, focus_upper_bound, lemma2_bounds,
                      regularized_density)
from .transform import (_threads, analyze, bump_focus, constant_focus, k_sigma)
from .windows import Window

log = logging.getLogger(__name__)

PERTURBATION_EPS = (0.2, 0.1, 0.05)
KAPPA_EPS = (0.1, 0.05, 0.025)
SLICE_P = (2, 4, 8)
SLICE_DIFF_P = (2, 3, 4, 8)
RATIO_SPREAD = 2.0


def standard_foci(grids: Grids, signal: Signal, window: Window, config: EntropyConfig) -> dict:
    """Constant, bump and entropy-derived focus functions for one signal."""
    plane1 = analyze(signal, window, config.kappa(grids.t), grids.w, t_grid=grids.t)
    foci = {"constant": constant_focus(grids.t, 1.0, config.sigma_min),
            "bump": bump_focus(grids.t, 0.5, 0.0, 1.5, config.sigma_min)}
    if signal.norm() > 0:
        profile = entropy_profile(plane1, signal.norm(), config, window)
        foci["entropy"] = focus_from_entropy(profile, config, window)
    else:
        foci["entropy"] = constant_focus(grids.t, 1.0, config.sigma_min)
    return foci


def _entropy_checks(f, window, config, grids, sigma, tag):
    """Density normalization, per-frame and uniform entropy hulls, tails and the focus bracket."""
    out = []
    nf = f.norm()
    kappa = config.kappa(grids.t)
    plane = analyze(f, window, kappa, grids.w, t_grid=grids.t)
    r = config.resolve_r(window)
    rho = regularized_density(plane.values, nf, r, config.u, grids.w)
    mass = trapezoid_integrate(rho, grids.w.step, axis=1)
    dev = float(np.max(np.abs(mass - 1)))
    out.append(Check(f"{tag}/density_mass", dev, 1e-8, dev <= 1e-8))
    profile = entropy_profile(plane, nf, config, window, r)
    hull = lemma2_bounds(plane, nf, config, window, profile)
    out.append(Check(f"{tag}/entropy_frame_hull", float(np.sum(~hull.inside)), 0.0, hull.passed))
    ub, lb = corollary2_uniform_bounds(config, window, r)
    lo, hi = min(ub, lb), max(ub, lb)
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    n_out = int(np.sum((profile.values < lo - tol) | (profile.values > hi + tol)))
    out.append(Check(f"{tag}/entropy_uniform_hull", float(n_out), 0.0, n_out == 0,
                     {"upper": ub, "lower": lb}))
    tail = float(max(abs(profile.values[0] - profile.limit), abs(profile.values[-1] - profile.limit)))
    out.append(Check(f"{tag}/entropy_tail", tail, 1e-4, tail <= 1e-4, {"limit": profile.limit}))
    top = focus_upper_bound(config, window, r)
    vmin, vmax = float(sigma.values.min()), float(sigma.values.max())
    ok = vmin >= config.sigma_min and vmax <= top * (1 + 1e-12)
    out.append(Check(f"{tag}/focus_bracket", vmax, top, ok,
                     {"min": vmin, "sigma_min": config.sigma_min}))
    return out


def check_signal(f: Signal, window: Window, config: EntropyConfig, grids: Grids):
    """All per-signal checks for one window; returns (checks, supplementary, ratios)."""
    checks, extra = [], []
    stem = f"{window.window_id}/{f.name}"
    foci = standard_foci(grids, f, window, config)
    planes = {}
    for fname, sigma in foci.items():
        tag = f"{stem}/{fname}"
        plane = planes[fname] = analyze(f, window, sigma, grids.w)
        c = verify_frame_sandwich(f, window, sigma, grids.w, plane)
        c.name = f"{tag}/{c.name}"
        checks.append(c)
        if f.norm() > 0:
            k = k_sigma(window, sigma, f.grid, oversample=1, t_grid=plane.t_grid)
            c_sup = float(k.max())
            e = plane.norm() ** 2
            extra.append(Check(f"{tag}/frame_upper_sup_weight", e, c_sup * f.norm() ** 2,
                               bool(e <= c_sup * f.norm() ** 2 * (1 + 1e-9)),
                               {"C_sup": c_sup, "C_f": c.detail["C_f"]}))
        for p in SLICE_P:
            c = verify_lemma1(f, window, sigma, grids.w, p, plane)
            c.name = f"{tag}/{c.name}"
            checks.append(c)
            lhs = float(slice_norms(plane, p).max())
            rhs = lemma1_bound(window, sigma, f.norm(), p) * max(1.0, sigma.sup ** (1 - (p - 2) / 2))
            extra.append(Check(f"{tag}/slice_bound_linear_focus_p{p}", lhs, rhs,
                               bool(lhs <= rhs * (1 + 1e-9) + 1e-15)))
    if f.norm() > 0:
        checks.extend(_entropy_checks(f, window, config, grids, foci["entropy"], f"{stem}/entropy"))

    ratios = {}
    for fname, sigma in foci.items():
        tag = f"{stem}/{fname}"
        prev = None
        p2 = []
        for eps in PERTURBATION_EPS:
            kappa = bump_focus(grids.t, eps, 1.0, 1.0, config.sigma_min, base=sigma)
            pk = analyze(f, window, kappa, grids.w)
            pair = (planes[fname], pk)
            c = verify_prop1(f, window, sigma, kappa, grids.w, pair)
            c.name = f"{tag}/eps{eps:g}/{c.name}"
            checks.append(c)
            for p in SLICE_DIFF_P:
                c3 = verify_prop3(f, window, sigma, kappa, grids.w, p, pair)
                c3.name = f"{tag}/eps{eps:g}/{c3.name}"
                checks.append(c3)
            per_eps = c.lhs / eps
            if prev is not None and f.norm() > 0:
                # lhs / eps must stay roughly constant as eps shrinks
                growth = max(per_eps, prev) / max(min(per_eps, prev), 1e-300)
                checks.append(Check(f"{tag}/eps{eps:g}/perturbation_linear_in_eps", growth, RATIO_SPREAD,
                                    growth <= RATIO_SPREAD))
            prev = per_eps
            if f.norm() > 0:
                p2.append(verify_prop2_stability(planes[fname], window, sigma, kappa, grids.x))
        if p2:
            ratios[f"{tag}/left_inverse_stability"] = p2
    if f.norm() > 0:
        k1 = constant_focus(grids.t, 1.0, config.sigma_min)
        th2 = []
        for eps in KAPPA_EPS:
            k2 = bump_focus(grids.t, eps, 0.5, 1.0, config.sigma_min)
            th2.append(focus_kappa_lipschitz_check(f, k1, k2, window, config, grids.w).ratio)
        ratios[f"{stem}/reference_focus_sensitivity"] = th2
    for key, vals in ratios.items():
        vals = np.asarray(vals)
        spread = float(vals.max() / vals.min()) if vals.min() > 0 else (0.0 if vals.max() == 0 else np.inf)
        checks.append(Check(f"{key}_ratio_spread", spread, RATIO_SPREAD,
                            bool(spread <= RATIO_SPREAD), {"ratios": vals.tolist()}))
    return checks, extra


def run_verify(signals, windows, config: EntropyConfig, grids: Grids,
               workers=None, pairs: bool = True) -> BoundsReport:
    """Run every check over ``signals`` x ``windows``; jobs run in a thread pool."""
    t0 = time.perf_counter()
    report = BoundsReport()
    jobs = [(f, w) for w in windows for f in signals]
    n = min(_threads(workers), max(len(jobs), 1))
    run = lambda job: check_signal(job[0], job[1], config, grids)
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    supplementary = []
    for checks, extra in results:
        for c in checks:
            report.add(c)
        supplementary.extend(extra)
    if pairs:
        for w in windows:
            nonzero = [f for f in signals if f.norm() > 0]
            for f, g in itertools.combinations(nonzero, 2):
                res = focus_signal_lipschitz_check(f, g, w, config, grids.t, grids.w)
                report.add(Check(f"{w.window_id}/{f.name}~{g.name}/signal_lipschitz",
                                 res.lhs, res.rhs, res.passed, {"C4": res.c4}))
    for w in windows:
        ub, lb = corollary2_uniform_bounds(config, w)
        report.constants[w.window_id] = {
            "r_min": config.r_min(w), "r": config.resolve_r(w),
            "focus_upper_bound": focus_upper_bound(config, w),
            "entropy_upper": ub, "entropy_lower": lb,
            "psi_inf": w.psi_inf, "phi_inf": w.phi_inf,
            "norm_2": w.norm_2, "norm_inf": w.norm_inf,
        }
    report.constants["supplementary"] = {
        "n_checks": len(supplementary),
        "failures": [c.to_dict() for c in supplementary if not c.passed],
    }
    report.constants["elapsed_s"] = time.perf_counter() - t0
    log.info("verify: %d checks, %d failing, %.1f s", len(report.checks),
             len(report.failures()), report.constants["elapsed_s"])
    return report
