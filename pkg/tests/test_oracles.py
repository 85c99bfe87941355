import cmath
import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from qflux.core import make_grid
from qflux.oracles import (OracleFailure, QuadratureSpec, finite_difference_derivative,
                           fornberg_weights, highprec_faddeeva, propagator_quadrature)
from qflux.packets import BoxSpec


@pytest.mark.parametrize("z", [0.5, 1 + 1j, -2 + 3j, 4 - 4j, 7.5j, -6.0])
def test_highprec_matches_mpmath_erfc(z):
    with mpmath.workdps(50):
        zm = mpmath.mpc(z)
        ref = complex(mpmath.exp(-zm ** 2) * mpmath.erfc(-1j * zm))
    assert abs(highprec_faddeeva(z) - ref) <= 1e-15 * abs(ref)


def test_highprec_domain():
    with pytest.raises(ValueError):
        highprec_faddeeva(8.5)


def _fresnel_box(a, x, t, hbar=1.0, m=1.0):
    # closed form through C(u) + i S(u), u = s sqrt(m / (pi hbar t))
    scale = math.sqrt(m / (math.pi * hbar * t))

    def f(s):
        s_, c = sp.fresnel(s * scale)  # scipy returns (S, C)
        return c + 1j * s_

    return (f(x + a / 2) - f(x - a / 2)) / (cmath.sqrt(2j) * math.sqrt(a))


@pytest.mark.parametrize("x,t", [(0.0, 0.1), (0.3, 0.01), (0.5, 1.0), (2.0, 0.05), (-1.2, 0.5), (10.0, 0.01)])
def test_quadrature_matches_fresnel_integrals(x, t):
    spec = BoxSpec(a=1.0)
    assert abs(propagator_quadrature(spec, x, t) - _fresnel_box(1.0, x, t)) < 1e-10


def test_quadrature_respects_units():
    from qflux.core import PhysConstants

    spec = BoxSpec(a=0.7, constants=PhysConstants(hbar=0.5, mass=2.0))
    ref = _fresnel_box(0.7, 0.4, 0.2, hbar=0.5, m=2.0)
    assert abs(propagator_quadrature(spec, 0.4, 0.2) - ref) < 1e-10


def test_quadrature_budget_and_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(panels=10)
    with pytest.raises(ValueError):
        propagator_quadrature(BoxSpec(), 0.0, 0.0)
    with pytest.raises(OracleFailure):
        propagator_quadrature(BoxSpec(), 0.3, 0.01, QuadratureSpec(tolerance=1e-30, max_panels=200))


def test_fornberg_reproduces_textbook_stencils():
    np.testing.assert_allclose(fornberg_weights(0.0, [-1, 0, 1]), [-0.5, 0, 0.5], atol=1e-15)
    np.testing.assert_allclose(fornberg_weights(0.0, [-2, -1, 0, 1, 2]),
                               [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12], atol=1e-15)
    np.testing.assert_allclose(fornberg_weights(0.0, [-1, 0, 1], m=2), [1, -2, 1], atol=1e-15)
    np.testing.assert_allclose(fornberg_weights(0.0, [0, 1, 2]), [-1.5, 2, -0.5], atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=6, unique=True), st.floats(-2, 2))
def test_fornberg_exact_on_polynomials(nodes, x0):
    nodes = np.array(sorted(nodes))
    if np.min(np.diff(nodes)) < 0.05:
        return
    deg = nodes.size - 1
    coeffs = np.arange(1.0, deg + 2)
    p = np.polynomial.Polynomial(coeffs)
    w = fornberg_weights(x0, nodes)
    assert w @ p(nodes) == pytest.approx(p.deriv()(x0), rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("order", [2, 4])
@pytest.mark.parametrize("boundary", ["periodic", "dirichlet"])
def test_reference_derivative_order(order, boundary):
    errs = []
    for n in (64, 128):
        g = make_grid(0.0, 2 * np.pi, n, boundary)
        d = finite_difference_derivative(g, np.sin(g.x), order)
        errs.append(np.max(np.abs(d - np.cos(g.x))))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(order, abs=0.3)
