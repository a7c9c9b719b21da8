"""Command-line entry point: ``focusft analyze | reconstruct | verify | constants``.

Exit codes: 0 success, 1 numerical failure or failing checks, 2 invalid
input (configuration, file format, missing file).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bounds import (BoundsError, c1_constant, c1_prime, frame_bounds, kp_constant,
                     verify_frame_sandwich)
from .core import DomainError, GridError, NonFiniteError, Signal
from .corpus import make_corpus, reference_grids
from .entropy import (DensityError, RegularizationError, corollary2_uniform_bounds,
                      entropy_focus, focus_upper_bound)
from .inversion import InversionDiverged, iterative_invert
from .io import (ConfigError, FormatError, RunConfig, default_config, load_config, read_focus,
                 read_plane, read_signal, write_focus, write_plane, write_signal)
from .suite import run_verify
from .transform import (FocusError, WeightUnderflowError, analyze, constant_focus, left_inverse)

log = logging.getLogger("focusft")

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2
CONSTANT_P = (2, 3, 4, 8)
INPUT_ERRORS = (ConfigError, FormatError, FileNotFoundError, IsADirectoryError, DomainError,
                GridError)
NUMERIC_ERRORS = (FocusError, WeightUnderflowError, NonFiniteError, BoundsError, DensityError,
                  RegularizationError, ArithmeticError)


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts_written: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_json(self) -> str:
        body = {"exit_code": self.exit_code,
                "artifacts_written": [str(p) for p in self.artifacts_written], **self.summary}
        return json.dumps(body, indent=2, default=_json_default, allow_nan=False)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _config(path: Optional[str]) -> RunConfig:
    return default_config() if path is None else load_config(path)


def cmd_analyze(config_path, signal_path, out_path, fixed_focus=None, adaptive=True) -> CommandOutcome:
    cfg = _config(config_path)
    f = read_signal(signal_path)
    grids = cfg.grids_for(f.grid)
    window = cfg.window.build()
    out = Path(out_path)
    written = []
    if fixed_focus is not None:
        sigma = read_focus(fixed_focus, cfg.entropy.sigma_min)
        mode = "fixed"
    elif f.norm() == 0:
        sigma = constant_focus(grids.t, 1.0, cfg.entropy.sigma_min)
        mode = "adaptive"
    else:
        sigma = entropy_focus(f, window, cfg.entropy, grids.t, grids.w)
        mode = "adaptive"
    plane = analyze(f, window, sigma, grids.w, t_grid=grids.t)
    written.append(write_plane(plane, out))
    if mode == "adaptive":
        written.append(write_focus(sigma, out.with_suffix(".focus.csv")))
    sandwich = verify_frame_sandwich(f, window, sigma, grids.w, plane)
    summary = {"command": "analyze", "mode": mode, "window": window.window_id,
               "plane_energy": plane.norm() ** 2, "signal_energy": f.norm() ** 2,
               "c_f": sandwich.detail["c_f"], "C_f": sandwich.detail["C_f"],
               "sandwich_passed": sandwich.passed,
               "focus_min": float(sigma.values.min()), "focus_max": float(sigma.values.max())}
    if mode == "adaptive":
        top = focus_upper_bound(cfg.entropy, window)
        summary["focus_bracket"] = [cfg.entropy.sigma_min, top]
    return CommandOutcome(EXIT_OK, written, summary)


def cmd_reconstruct(config_path, plane_path, out_path, iters=20, tol=1e-10,
                    fixed_focus=None) -> CommandOutcome:
    cfg = _config(config_path)
    plane = read_plane(plane_path)
    window = cfg.window.build()
    x_grid = cfg.reconstruction_x_grid(plane)
    out = Path(out_path)
    trace_path = out.with_suffix(".trace.json")
    if fixed_focus is not None or plane.norm() == 0:
        sigma = (read_focus(fixed_focus, cfg.entropy.sigma_min) if fixed_focus is not None
                 else constant_focus(plane.t_grid, 1.0, cfg.entropy.sigma_min))
        f = left_inverse(plane, window, sigma, x_grid)
        trace = {"converged": True, "iterations_used": 1,
                 "iterations": [{"iteration": 1, "residual": None,
                                 "focus_min": float(sigma.values.min()),
                                 "focus_max": float(sigma.values.max())}]}
    else:
        try:
            f, sigma, tr = iterative_invert(plane, window, cfg.entropy, x_grid, iters, tol)
        except InversionDiverged as exc:
            trace_path.write_text(json.dumps(exc.trace.to_dict(), indent=2, default=_json_default))
            return CommandOutcome(EXIT_FAILED, [trace_path],
                                  {"command": "reconstruct", "error": str(exc)})
        trace = tr.to_dict()
    written = [write_signal(Signal(f.samples, f.grid, "reconstruction"), out)]
    trace_path.write_text(json.dumps(trace, indent=2, default=_json_default))
    written.append(trace_path)
    last = trace["iterations"][-1]["residual"]
    return CommandOutcome(EXIT_OK, written,
                          {"command": "reconstruct", "iterations_used": trace["iterations_used"],
                           "converged": trace["converged"], "final_residual": last})


def _load_corpus(cfg: RunConfig, corpus_dir: Optional[str]):
    if corpus_dir is not None:
        d = Path(corpus_dir)
        if not d.is_dir():
            raise ConfigError("--corpus", f"{d} is not a directory")
        paths = sorted(p for p in d.iterdir() if p.suffix.lower() in (".csv", ".wav"))
        if not paths:
            raise ConfigError("--corpus", f"no .csv or .wav signals in {d}")
        return [read_signal(p) for p in paths]
    if cfg.corpus:
        return [read_signal(p) for p in cfg.corpus]
    return make_corpus(cfg.x_grid or reference_grids().x)


def cmd_verify(config_path, corpus_dir=None, out_path=None) -> CommandOutcome:
    cfg = _config(config_path)
    signals = _load_corpus(cfg, corpus_dir)
    steps = {s.grid for s in signals}
    if len(steps) != 1:
        raise FormatError("corpus signals must share one sampling grid")
    grids = cfg.grids_for(signals[0].grid)
    windows = [w.build() for w in cfg.verify_windows]
    report = run_verify(signals, windows, cfg.entropy, grids)
    body = report.to_dict()
    written = []
    if out_path is not None:
        Path(out_path).write_text(json.dumps(body, indent=2, default=_json_default))
        written.append(Path(out_path))
    summary = {"command": "verify", "passed": body["passed"], "n_checks": body["n_checks"],
               "n_signals": len(signals), "windows": [w.window_id for w in windows],
               "failures": [{k: c[k] for k in ("name", "lhs", "rhs")} for c in body["failures"]],
               "constants": body["constants"]}
    return CommandOutcome(EXIT_OK if report.passed else EXIT_FAILED, written, summary)


def cmd_constants(config_path) -> CommandOutcome:
    cfg = _config(config_path)
    window = cfg.window.build()
    ent = cfg.entropy
    grid = cfg.t_grid or reference_grids().t
    sigma = constant_focus(grid, 1.0, ent.sigma_min)
    kappa = ent.kappa(grid)
    ub, lb = corollary2_uniform_bounds(ent, window) if ent.A > 0 or ent.r is not None else (None, None)
    values = {
        "C1": c1_constant(window, sigma, kappa),
        "C1_prime": c1_prime(window, sigma),
        "K_p": {str(p): kp_constant(window, sigma, kappa, p) for p in CONSTANT_P},
        "r_min": ent.r_min(window),
        "r": ent.resolve_r(window),
        "focus_upper_bound": focus_upper_bound(ent, window),
        "entropy_upper": ub, "entropy_lower": lb,
        "frame_bounds_constant_focus": list(frame_bounds(window, sigma)),
        "window": window.to_dict(),
    }
    finite = all(np.isfinite(v) for v in (values["C1"], values["C1_prime"], values["r_min"],
                                          *values["K_p"].values()))
    return CommandOutcome(EXIT_OK if finite else EXIT_FAILED, [],
                          {"command": "constants", "constants": values})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="focusft", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compute the time-focused transform of a signal")
    a.add_argument("--config")
    a.add_argument("signal")
    a.add_argument("out", help="output plane (.tfp binary or .csv)")
    mode = a.add_mutually_exclusive_group()
    mode.add_argument("--fixed-focus", metavar="SIGMA_CSV")
    mode.add_argument("--adaptive", action="store_true", help="entropy focus (default)")

    r = sub.add_parser("reconstruct", help="invert a plane")
    r.add_argument("--config")
    r.add_argument("plane")
    r.add_argument("out", help="output signal CSV; the trace goes next to it")
    r.add_argument("--iters", type=int, default=20)
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--fixed-focus", metavar="SIGMA_CSV",
                   help="known focus; a single left-inverse step")

    v = sub.add_parser("verify", help="run every inequality check on a corpus")
    v.add_argument("--config")
    v.add_argument("--corpus", metavar="DIR")
    v.add_argument("--report", metavar="JSON", help="write the full report here")

    c = sub.add_parser("constants", help="print the explicit constants")
    c.add_argument("--config")
    return ap


def run(argv=None) -> CommandOutcome:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "analyze":
            return cmd_analyze(args.config, args.signal, args.out, args.fixed_focus)
        if args.command == "reconstruct":
            if args.iters < 1 or not args.tol > 0:
                raise ConfigError("--iters/--tol", "need iters >= 1 and tol > 0")
            return cmd_reconstruct(args.config, args.plane, args.out, args.iters, args.tol,
                                   args.fixed_focus)
        if args.command == "verify":
            return cmd_verify(args.config, args.corpus, args.report)
        return cmd_constants(args.config)
    except INPUT_ERRORS as exc:
        return CommandOutcome(EXIT_INVALID, [], {"command": args.command, "error": str(exc)})
    except NUMERIC_ERRORS as exc:
        return CommandOutcome(EXIT_FAILED, [], {"command": args.command,
                                                "error": f"{type(exc).__name__}: {exc}"})


def main(argv=None) -> int:
    outcome = run(argv)
    print(outcome.to_json())
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
