import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qflux.core import (Boundary, Grid1D, PhysConstants, WaveField, integrate, l2_distance,
                        make_grid, norm, probability_in_interval)


def test_grid_spacing_and_endpoints():
    per = make_grid(-1.0, 1.0, 8, "periodic")
    assert per.dx == pytest.approx(0.25)
    assert per.x[0] == -1.0 and per.x[-1] == pytest.approx(0.75)
    dirich = make_grid(-1.0, 1.0, 9, Boundary.DIRICHLET)
    assert dirich.dx == pytest.approx(0.25)
    assert dirich.x[-1] == 1.0


@pytest.mark.parametrize("args", [
    (0.0, 0.0, 16), (1.0, 0.0, 16), (0.0, 1.0, 7), (0.0, math.inf, 16), (math.nan, 1.0, 16),
])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        Grid1D(*args)


def test_grid_x_is_read_only():
    g = make_grid(0.0, 1.0, 16)
    with pytest.raises(ValueError):
        g.x[0] = 5.0


def test_wavenumbers_match_fft_convention():
    g = make_grid(-3.0, 5.0, 64, "periodic")
    np.testing.assert_allclose(g.wavenumbers(), 2 * np.pi * np.fft.fftfreq(64, d=g.dx))


def test_constants_validated():
    with pytest.raises(ValueError):
        PhysConstants(hbar=0.0)
    with pytest.raises(ValueError):
        PhysConstants(mass=-1.0)


def test_trapezoid_exact_for_linear():
    g = make_grid(0.0, 2.0, 11)
    assert integrate(g, 3.0 * g.x + 1.0) == pytest.approx(8.0, rel=1e-14)


def test_periodic_rule_is_spectral_for_trig():
    g = make_grid(0.0, 2 * np.pi, 16, "periodic")
    assert integrate(g, np.cos(3 * g.x) ** 2) == pytest.approx(np.pi, rel=1e-14)


def test_wavefield_is_frozen_and_finite():
    g = make_grid(0.0, 1.0, 16)
    raw = np.ones(16, dtype=complex)
    psi = WaveField(g, raw)
    raw[0] = 7.0
    assert psi.values[0] == 1.0
    with pytest.raises(ValueError):
        psi.values[0] = 2.0
    bad = np.ones(16, dtype=complex)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        WaveField(g, bad)
    with pytest.raises(ValueError):
        WaveField(g, np.ones(15))


def _gauss(grid):
    return WaveField(grid, (2 / np.pi) ** 0.25 * np.exp(-grid.x ** 2))


def test_norm_of_unit_gaussian():
    assert norm(_gauss(make_grid(-10, 10, 512, "periodic"))) == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(-4.0, 4.0), st.floats(-4.0, 4.0), st.floats(-4.0, 4.0))
def test_interval_probability_is_additive(p, q, r):
    a, b, c = sorted((p, q, r))
    if not (b - a > 1e-6 and c - b > 1e-6):
        return
    psi = _gauss(make_grid(-5.0, 5.0, 101))
    whole = probability_in_interval(psi, a, c)
    parts = probability_in_interval(psi, a, b) + probability_in_interval(psi, b, c)
    assert whole == pytest.approx(parts, abs=1e-15)


@pytest.mark.parametrize("boundary", ["periodic", "dirichlet"])
def test_full_interval_equals_quadrature(boundary):
    g = make_grid(-6.0, 6.0, 200, boundary)
    psi = _gauss(g)
    assert probability_in_interval(psi, g.x_min, g.x_max) == pytest.approx(norm(psi), rel=1e-13)


def test_interval_clips_and_rejects():
    psi = _gauss(make_grid(-5.0, 5.0, 101))
    assert probability_in_interval(psi, -50, 50) == pytest.approx(probability_in_interval(psi, -5, 5))
    with pytest.raises(ValueError):
        probability_in_interval(psi, 6, 7)
    with pytest.raises(ValueError):
        probability_in_interval(psi, 1, 1)


def test_interval_probability_of_gaussian_half_line():
    # erf(sqrt(2)) / 2 is the mass of |psi|^2 = sqrt(2/pi) exp(-2x^2) on [0, 1]
    psi = _gauss(make_grid(-6.0, 6.0, 6001))
    assert probability_in_interval(psi, 0.0, 1.0) == pytest.approx(0.5 * math.erf(math.sqrt(2)), rel=1e-6)


def test_l2_distance():
    g = make_grid(0.0, 1.0, 101)
    assert l2_distance(g, g.x, g.x) == 0.0
    assert l2_distance(g, np.zeros(101), np.ones(101)) == pytest.approx(1.0)
