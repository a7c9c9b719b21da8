import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.io import wavfile

from focusft.core import Grid, Signal
from focusft.io import (ConfigError, FormatError, load_config, parse_config, read_focus,
                        read_plane, read_signal, write_focus, write_plane, write_signal)
from focusft.transform import TFPlane, bump_focus


def test_wav_zeros(tmp_path):
    p = tmp_path / "z.wav"
    wavfile.write(p, 8000, np.zeros(8000, np.int16))
    s = read_signal(p)
    assert s.grid.count == 8000 and s.grid.step == 1 / 8000 and not np.any(s.samples)


@pytest.mark.parametrize("dtype,scale", [(np.int16, 32768.0), (np.int32, 2.0**31),
                                         (np.float32, 1.0), (np.float64, 1.0)])
def test_wav_encodings(tmp_path, dtype, scale):
    p = tmp_path / "x.wav"
    data = (np.array([0.0, 0.25, -0.5, 0.125]) * (scale if scale > 1 else 1)).astype(dtype)
    wavfile.write(p, 100, data)
    np.testing.assert_allclose(read_signal(p).samples, [0.0, 0.25, -0.5, 0.125])


def test_wav_multichannel_takes_first(tmp_path, caplog):
    p = tmp_path / "st.wav"
    wavfile.write(p, 10, np.array([[1, 2], [3, 4], [5, 6]], np.int16))
    s = read_signal(p)
    np.testing.assert_allclose(s.samples * 32768, [1, 3, 5])
    assert "channels" in caplog.text


def test_wav_unsupported(tmp_path):
    p = tmp_path / "u8.wav"
    wavfile.write(p, 10, np.array([1, 2, 3], np.uint8))
    with pytest.raises(FormatError):
        read_signal(p)


def test_csv_signal(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("0,1\n0.5,2\n1.0,3")
    s = read_signal(p)
    assert s.grid == Grid(0.0, 0.5, 3)
    np.testing.assert_array_equal(s.samples, [1, 2, 3])
    p.write_text("t,value\n0,1\n0.5,2\n1.1,3")
    with pytest.raises(FormatError):
        read_signal(p)
    p.write_text("0,1,0\n1,2,5\n")
    assert read_signal(p).samples[1] == 2 + 5j
    p.write_text("0,1\n1,x\n")
    with pytest.raises(FormatError):
        read_signal(p)
    with pytest.raises(FormatError):
        read_signal(tmp_path / "s.flac")


def test_signal_csv_round_trip(tmp_path, corpus):
    for f in (corpus[0], corpus[6]):
        p = write_signal(f, tmp_path / f"{f.name}.csv")
        back = read_signal(p)
        assert back.grid == f.grid
        np.testing.assert_array_equal(back.samples, f.samples)


def test_focus_csv_round_trip(tmp_path, grids):
    s = bump_focus(grids.t, 0.5, 0.0, 1.5)
    back = read_focus(write_focus(s, tmp_path / "s.csv"), 0.5)
    np.testing.assert_array_equal(back.values, s.values)
    (tmp_path / "bad.csv").write_text("t,sigma\n0,0.2\n1,1\n")
    with pytest.raises(FormatError):
        read_focus(tmp_path / "bad.csv", 0.5)


def _random_plane(rng, nt, nw):
    vals = rng.standard_normal((nt, nw)) + 1j * rng.standard_normal((nt, nw))
    return TFPlane(vals, Grid(rng.uniform(-5, 0), rng.uniform(0.01, 1), nt),
                   Grid(rng.uniform(-5, 0), rng.uniform(0.01, 1), nw))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), nt=st.integers(2, 20), nw=st.integers(2, 20))
def test_binary_plane_round_trip(tmp_path_factory, seed, nt, nw):
    plane = _random_plane(np.random.default_rng(seed), nt, nw)
    p = tmp_path_factory.mktemp("planes") / "p.tfp"
    write_plane(plane, p)
    raw = p.read_bytes()
    assert raw[:4] == b"TFPL" and len(raw) == 64 + 16 * nt * nw
    back = read_plane(p)
    assert back.t_grid == plane.t_grid and back.w_grid == plane.w_grid
    assert back.values.tobytes() == plane.values.tobytes()
    q = p.with_name("q.tfp")
    write_plane(back, q)
    assert q.read_bytes() == raw


def test_plane_csv_rows(tmp_path):
    plane = _random_plane(np.random.default_rng(0), 5, 7)
    p = write_plane(plane, tmp_path / "p.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "t,omega,re,im" and len(lines) - 1 == 35


def test_corrupt_planes(tmp_path):
    plane = _random_plane(np.random.default_rng(0), 3, 3)
    raw = write_plane(plane, tmp_path / "p.tfp").read_bytes()
    for name, data in (("short", raw[:40]), ("magic", b"XXXX" + raw[4:]),
                       ("trunc", raw[:-8]), ("version", raw[:4] + b"\x02" + raw[5:])):
        (tmp_path / name).write_bytes(data)
        with pytest.raises(FormatError):
            read_plane(tmp_path / name)


def test_config_defaults(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{}")
    cfg = load_config(p)
    assert cfg.entropy.p == 3 and cfg.entropy.A == 0.5 and cfg.entropy.r is None
    assert cfg.window.kind == "gaussian" and cfg.window.param == 1.0
    assert [w.kind for w in cfg.verify_windows] == ["gaussian", "hann"]


@pytest.mark.parametrize("data,field", [
    ({"focus": {"sigma_min": 1.5}}, "focus.sigma_min"),
    ({"grid": {"t": {"start": 0, "step": -1, "count": 4}}}, "grid.t.step"),
    ({"grid": {"x": {"start": 0, "step": 1}}}, "grid.x.count"),
    ({"focus": {"p": 1.5}}, "focus.p"),
    ({"focus": {"r": "big"}}, "focus.r"),
    ({"window": {"kind": "kaiser"}}, "window.kind"),
    ({"corpus": ["nope.csv"]}, "corpus[0]"),
    ({"colour": 1}, "colour"),
])
def test_config_errors_name_the_field(tmp_path, data, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(data, tmp_path)
    assert exc.value.field == field and field in str(exc.value)


def test_config_full(tmp_path):
    (tmp_path / "a.csv").write_text("0,1\n1,2\n")
    data = {"window": {"kind": "hann", "param": 2}, "focus": {"r": 5.0, "u": {"a": 2}},
            "grid": {"t": {"start": -4, "step": 0.5, "count": 17}}, "corpus": ["a.csv"],
            "output_dir": "out"}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(data))
    cfg = load_config(p)
    assert cfg.window.build().name == "hann(w=2)"
    assert cfg.entropy.r == 5.0 and cfg.entropy.u.a == 2
    assert cfg.t_grid == Grid(-4, 0.5, 17)
    assert cfg.corpus == (tmp_path / "a.csv",) and cfg.output_dir == tmp_path / "out"
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
