"""Signal ingestion, run configuration and plane serialization.

Binary plane layout (little-endian)::

    offset  size  field
    0       4     magic b"TFPL"
    4       4     uint32 version (1)
    8       4     uint32 number of t samples
    12      4     uint32 number of w samples
    16      32    float64 t_start, t_step, w_start, w_step
    48      16    reserved, zero
    64      ...   row-major (t, w) values as interleaved float64 re, im
"""
from __future__ import annotations

import csv
import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.io import wavfile

from .core import Grid, GridError, Signal
from .corpus import Grids, reference_grids
from .entropy import EntropyConfig, ReferenceDensity
from .transform import FocusError, FocusFunction, TFPlane
from .windows import make_window

log = logging.getLogger(__name__)

MAGIC = b"TFPL"
VERSION = 1
_HEADER = struct.Struct("<4sIII4d16x")
assert _HEADER.size == 64


class FormatError(ValueError):
    """A file does not follow the expected format."""


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# signals

def read_signal(path, fmt: Optional[str] = None) -> Signal:
    """Read a mono WAV file or a two/three column CSV ``t, value[, imag]``."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    if fmt == "wav":
        return _read_wav(path)
    if fmt == "csv":
        return _read_csv_signal(path)
    raise FormatError(f"unsupported signal format {fmt!r} for {path}")


def _read_wav(path: Path) -> Signal:
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if data.ndim > 1:
        log.warning("%s has %d channels; using the first", path, data.shape[1])
        data = data[:, 0]
    if data.dtype == np.int16:
        samples = data / 32768.0
    elif data.dtype == np.int32:
        # 24-bit PCM is returned left-justified in int32
        samples = data / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise FormatError(f"{path}: unsupported WAV sample type {data.dtype}")
    if samples.size < 2:
        raise FormatError(f"{path}: fewer than two samples")
    return Signal(samples, Grid(0.0, 1.0 / rate, samples.size), path.stem)


def _numeric_rows(path: Path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if i == 0:
                    continue  # header line
                raise FormatError(f"{path}:{i + 1}: non-numeric value in {row}")
    if not rows:
        raise FormatError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise FormatError(f"{path}: rows have differing column counts {sorted(widths)}")
    return np.array(rows)


def _uniform_grid(t: np.ndarray, path) -> Grid:
    if t.size < 2:
        raise FormatError(f"{path}: need at least two samples")
    steps = np.diff(t)
    step = (t[-1] - t[0]) / (t.size - 1)
    if step <= 0 or np.max(np.abs(steps - step)) > 1e-9 * abs(step):
        raise FormatError(f"{path}: time column is not uniformly spaced")
    return Grid(float(t[0]), float(step), t.size)


def _read_csv_signal(path: Path) -> Signal:
    data = _numeric_rows(path)
    if data.shape[1] == 2:
        samples = data[:, 1]
    elif data.shape[1] == 3:
        samples = data[:, 1] + 1j * data[:, 2]
    else:
        raise FormatError(f"{path}: expected 2 or 3 columns, got {data.shape[1]}")
    return Signal(samples, _uniform_grid(data[:, 0], path), path.stem)


def write_signal(signal: Signal, path) -> Path:
    """CSV ``t,value`` for real signals, ``t,re,im`` otherwise."""
    path = Path(path)
    t = signal.grid.points
    s = signal.samples
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if np.iscomplexobj(s):
            w.writerow(["t", "re", "im"])
            w.writerows((repr(float(a)), repr(float(b.real)), repr(float(b.imag)))
                        for a, b in zip(t, s))
        else:
            w.writerow(["t", "value"])
            w.writerows((repr(float(a)), repr(float(b))) for a, b in zip(t, s))
    return path


# focus functions

def write_focus(sigma: FocusFunction, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "sigma"])
        w.writerows((repr(float(a)), repr(float(b)))
                    for a, b in zip(sigma.grid.points, sigma.values))
    return path


def read_focus(path, sigma_min: float) -> FocusFunction:
    path = Path(path)
    data = _numeric_rows(path)
    if data.shape[1] != 2:
        raise FormatError(f"{path}: focus CSV must have two columns (t, sigma)")
    try:
        return FocusFunction(data[:, 1], _uniform_grid(data[:, 0], path), sigma_min, name=path.stem)
    except FocusError as exc:
        raise FormatError(f"{path}: not a valid focus function ({exc})") from exc


# planes

def write_plane(plane: TFPlane, path, fmt: Optional[str] = None) -> Path:
    """Write ``plane`` as the binary container or as CSV ``t,omega,re,im``."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "binary")
    if fmt == "binary":
        header = _HEADER.pack(MAGIC, VERSION, plane.t_grid.count, plane.w_grid.count,
                              plane.t_grid.start, plane.t_grid.step,
                              plane.w_grid.start, plane.w_grid.step)
        body = np.ascontiguousarray(plane.values, dtype="<c16").tobytes()
        path.write_bytes(header + body)
    elif fmt == "csv":
        tt, ww = np.meshgrid(plane.t_grid.points, plane.w_grid.points, indexing="ij")
        table = np.column_stack([tt.ravel(), ww.ravel(), plane.values.real.ravel(),
                                 plane.values.imag.ravel()])
        np.savetxt(path, table, delimiter=",", fmt="%.17g", header="t,omega,re,im",
                   comments="")
    else:
        raise FormatError(f"unknown plane format {fmt!r}")
    return path


def read_plane(path) -> TFPlane:
    """Read the binary container written by :func:`write_plane`."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, nt, nw, t0, dt, w0, dw = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 16 * nt * nw
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    try:
        t_grid, w_grid = Grid(t0, dt, nt), Grid(w0, dw, nw)
    except GridError as exc:
        raise FormatError(f"{path}: invalid grid in header ({exc})") from exc
    values = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(nt, nw)
    return TFPlane(values.astype(np.complex128), t_grid, w_grid)


# configuration

@dataclass(frozen=True)
class WindowSpec:
    kind: str = "gaussian"
    param: float = 1.0

    def build(self):
        return make_window(self.kind, self.param)


DEFAULT_VERIFY_WINDOWS = (WindowSpec("gaussian", 1.0), WindowSpec("hann", 2.0))


@dataclass(frozen=True)
class RunConfig:
    window: WindowSpec = field(default_factory=WindowSpec)
    entropy: EntropyConfig = field(default_factory=EntropyConfig)
    x_grid: Optional[Grid] = None
    t_grid: Optional[Grid] = None
    w_grid: Optional[Grid] = None
    verify_windows: tuple = DEFAULT_VERIFY_WINDOWS
    corpus: tuple = ()
    output_dir: Path = Path(".")

    def grids_for(self, x_grid: Grid) -> Grids:
        """t and w grids to use with a signal sampled on ``x_grid``."""
        return Grids(x_grid, self.t_grid or default_t_grid(x_grid),
                     self.w_grid or default_w_grid(x_grid))

    def reconstruction_x_grid(self, plane: TFPlane) -> Grid:
        if self.x_grid is not None:
            return self.x_grid
        n = plane.w_grid.count - 1
        dx = 1.0 / (n * plane.w_grid.step)
        try:
            return Grid.from_bounds(plane.t_grid.start, plane.t_grid.stop, dx)
        except GridError as exc:
            raise ConfigError("grid.x", f"cannot infer the signal grid from the plane ({exc})")


def default_t_grid(x_grid: Grid) -> Grid:
    """Same span as the signal with 256 intervals (the reference grid when the span is 32)."""
    return Grid(x_grid.start, (x_grid.stop - x_grid.start) / 256, 257)


def default_w_grid(x_grid: Grid) -> Grid:
    """One full period ``[-1/(2dx), 1/(2dx)]`` with ``N`` intervals, ``N`` even."""
    n = x_grid.count - 1
    n += n % 2
    dw = 1.0 / (n * x_grid.step)
    return Grid(-0.5 / x_grid.step, dw, n + 1)


def _num(d, key, path, default=None, positive=False):
    v = d.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"must be a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        raise ConfigError(path, "must be finite")
    if positive and not v > 0:
        raise ConfigError(path, f"must be positive, got {v}")
    return v


def _obj(d, key, path):
    v = d.get(key, {})
    if not isinstance(v, dict):
        raise ConfigError(path, f"must be an object, got {type(v).__name__}")
    return v


def _window_spec(d, path) -> WindowSpec:
    kind = d.get("kind", "gaussian")
    if kind not in ("gaussian", "hann"):
        raise ConfigError(f"{path}.kind", f"must be 'gaussian' or 'hann', got {kind!r}")
    return WindowSpec(kind, _num(d, "param", f"{path}.param", 1.0 if kind == "gaussian" else 2.0,
                                 positive=True))


def _grid(d, path) -> Grid:
    for key in ("start", "step", "count"):
        if key not in d:
            raise ConfigError(f"{path}.{key}", "missing")
    step = _num(d, "step", f"{path}.step", positive=True)
    count = d["count"]
    if isinstance(count, bool) or not isinstance(count, int) or count < 2:
        raise ConfigError(f"{path}.count", f"must be an integer >= 2, got {count!r}")
    return Grid(_num(d, "start", f"{path}.start"), step, count)


def _entropy(d, path) -> EntropyConfig:
    p = _num(d, "p", f"{path}.p", 3.0)
    if not p > 2:
        raise ConfigError(f"{path}.p", f"Renyi order must exceed 2 for the density construction, got {p}")
    A = _num(d, "A", f"{path}.A", 0.5)
    if A < 0:
        raise ConfigError(f"{path}.A", f"must be non-negative, got {A}")
    sm = _num(d, "sigma_min", f"{path}.sigma_min", 0.5)
    if not 0 < sm < 1:
        raise ConfigError(f"{path}.sigma_min",
                          f"focus class requires 0 < sigma_min < 1, got {sm}")
    r_raw = d.get("r", "auto")
    if r_raw == "auto":
        r = None
    else:
        r = _num(d, "r", f"{path}.r", positive=True)
    u = _obj(d, "u", f"{path}.u")
    if u.get("kind", "gaussian") != "gaussian":
        raise ConfigError(f"{path}.u.kind", f"only 'gaussian' is supported, got {u.get('kind')!r}")
    a = _num(u, "a", f"{path}.u.a", 1.0, positive=True)
    inverted = d.get("inverted", False)
    if not isinstance(inverted, bool):
        raise ConfigError(f"{path}.inverted", "must be true or false")
    return EntropyConfig(p=p, A=A, sigma_min=sm, r=r, u=ReferenceDensity(a), inverted=inverted)


def parse_config(data: dict, base_dir: Path = Path(".")) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    known = {"window", "focus", "grid", "verify_windows", "corpus", "output_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    window = _window_spec(_obj(data, "window", "window"), "window")
    entropy = _entropy(_obj(data, "focus", "focus"), "focus")
    g = _obj(data, "grid", "grid")
    grids = {}
    for key in ("x", "t", "omega"):
        if key in g:
            grids[key] = _grid(g[key] if isinstance(g[key], dict) else {}, f"grid.{key}")
    vw = data.get("verify_windows")
    if vw is None:
        verify_windows = DEFAULT_VERIFY_WINDOWS
    else:
        if not isinstance(vw, list) or not vw:
            raise ConfigError("verify_windows", "must be a non-empty list")
        verify_windows = tuple(_window_spec(w, f"verify_windows[{i}]") for i, w in enumerate(vw))
    corpus = data.get("corpus", [])
    if not isinstance(corpus, list):
        raise ConfigError("corpus", "must be a list of signal paths")
    paths = []
    for i, p in enumerate(corpus):
        path = (base_dir / p) if not Path(p).is_absolute() else Path(p)
        if not path.exists():
            raise ConfigError(f"corpus[{i}]", f"file {path} does not exist")
        paths.append(path)
    out = Path(data.get("output_dir", "."))
    return RunConfig(window, entropy, grids.get("x"), grids.get("t"), grids.get("omega"),
                     verify_windows, tuple(paths), base_dir / out if not out.is_absolute() else out)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError("<file>", f"{path} does not exist")
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"{path} is not valid JSON ({exc})")
    return parse_config(data, path.parent)


def default_config() -> RunConfig:
    g = reference_grids()
    return RunConfig(x_grid=g.x, t_grid=g.t, w_grid=g.w)
