import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from focusft.core import DomainError, Grid
from focusft.windows import (Window, gaussian_window, hann_window, make_window,
                             quadrature_norms, verify_decay)


def test_gaussian_basics():
    w = gaussian_window(1.0)
    assert w(0.0) == 1.0 and w.derivative(np.array(0.0)) == 0.0
    assert abs(w.norm_2 - (np.pi / 2) ** 0.25) < 1e-8
    assert w.effective_support == pytest.approx(np.sqrt(-np.log(1e-12)))
    assert w(w.effective_support) == pytest.approx(1e-12)


def test_hann_basics():
    w = hann_window(1.0)
    assert w(0.0) == 1.0
    assert w(1.0) == pytest.approx(0.0, abs=1e-30)
    assert w.derivative(np.array(1.0)) == pytest.approx(0.0, abs=1e-15)
    assert w(2.0) == 0.0
    assert abs(quad(lambda t: w(t) ** 2, -1, 1, epsabs=1e-14)[0] - 0.75) < 1e-10
    assert w.norm_2**2 == pytest.approx(0.75, abs=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_nonpositive_parameters(bad):
    with pytest.raises(DomainError):
        gaussian_window(bad)
    with pytest.raises(DomainError):
        hann_window(bad)
    with pytest.raises(DomainError):
        make_window("kaiser", 1.0)


def _envelope_oracle(f, lo, hi):
    # independent maximization: scan then bounded polish on each side of 0
    best = 0.0
    for a, b in ((lo, 0.0), (0.0, hi)):
        t = np.linspace(a, b, 4001)
        i = np.argmax(f(t))
        res = minimize_scalar(lambda s: -f(s), bounds=(t[max(i - 1, 0)], t[min(i + 1, 4000)]),
                              method="bounded", options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return best


def test_gaussian_envelope_suprema():
    w = gaussian_window(1.0)
    psi = _envelope_oracle(lambda t: (1 + np.abs(t)) * np.exp(-t * t), -6, 6)
    phi = _envelope_oracle(lambda t: (1 + t * t) * 2 * np.abs(t) * np.exp(-t * t), -6, 6)
    assert w.psi_inf == pytest.approx(psi, abs=1e-6)
    assert w.phi_inf == pytest.approx(phi, abs=1e-6)
    assert w.psi_inf == pytest.approx(1.19474, abs=1e-5)
    assert w.phi_inf == pytest.approx(1.47152, abs=1e-5)


@pytest.mark.parametrize("factory,param", [(gaussian_window, 1.0), (gaussian_window, 2.5),
                                           (hann_window, 1.0), (hann_window, 2.0)])
def test_decay_and_norms(factory, param):
    w = factory(param)
    reach = 4 * w.effective_support
    rep = verify_decay(w, Grid.from_bounds(-reach, reach, reach / 40000))
    assert rep.passed and rep.max_ratio_psi <= 1 + 1e-9
    n2, ninf = quadrature_norms(w)
    assert abs(n2 - w.norm_2) < 1e-10
    assert ninf == pytest.approx(w.norm_inf, abs=1e-12)


def test_finite_difference_derivative():
    for w in (gaussian_window(1.0), hann_window(1.0)):
        t = np.linspace(-3, 3, 2001)
        d = 1e-5
        fd = (w(t + d) - w(t - d)) / (2 * d)
        assert np.max(np.abs(fd - w.derivative(t))) < 1e-6


def test_decay_check_catches_constant_window():
    one = Window("one", lambda t: np.ones_like(t), lambda t: np.zeros_like(t),
                 lambda t: np.ones_like(t), lambda t: np.zeros_like(t) + 1.0,
                 norm_2=1.0, norm_inf=1.0, psi_inf=1.0, phi_inf=1.0, effective_support=1.0)
    assert not verify_decay(one, Grid.from_bounds(-5, 5, 0.01)).passed


def test_decay_grid_must_cover():
    with pytest.raises(ValueError):
        verify_decay(gaussian_window(1.0), Grid.from_bounds(-1, 1, 0.01))
