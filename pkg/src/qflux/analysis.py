"""Derived measurements used by the scenarios and the acceptance suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid1D, WaveField, integrate, make_grid, probability_in_interval
from .hydro import diffusion_flux
from .oracles import QuadratureSpec, propagator_quadrature
from .packets import BoxSpec, GaussianSpec, box_amplitude, box_evolved, gaussian_state


# ------------------------------------------------------------ Gaussian decay

def gaussian_grid_through(spec: GaussianSpec, t: float, x: float, n: int = 2048,
                          widths: float = 6.0) -> Grid1D:
    """Periodic grid of ``n`` points spanning about ``±widths * eps(t)`` with ``x`` on a node."""
    c = spec.center(t)
    dx0 = 2.0 * widths * spec.width(t) / n
    offset = x - c
    if offset == 0:
        dx = dx0
    else:
        dx = abs(offset) / math.ceil(abs(offset) / dx0)
    half = 0.5 * n * dx
    return make_grid(c - half, c + half, n, "periodic")


def gaussian_diffusion_at(spec: GaussianSpec, x: float, t: float, n: int = 2048) -> float:
    """Numerically extracted D(x, t) of the spreading Gaussian."""
    grid = gaussian_grid_through(spec, t, x, n)
    d = diffusion_flux(gaussian_state(spec, grid, t))
    i = int(round((x - grid.x_min) / grid.dx))
    return float(d[i])


def gaussian_diffusion_ratio(spec: GaussianSpec, x: float, t: float, n: int = 2048) -> float:
    """D(x, 2t) / D(x, t); tends to 1/8 once eps(t) >> |x|."""
    return gaussian_diffusion_at(spec, x, 2.0 * t, n) / gaussian_diffusion_at(spec, x, t, n)


# ------------------------------------------------------------- box norm

@dataclass(frozen=True)
class BoxNorm:
    total: float
    on_grid: float
    tail: float
    tail_bound: float  # bound on the neglected oscillating part of the tail
    half_width: float
    n: int


def box_norm(spec: BoxSpec, t: float, tail_target: float = 1e-7) -> BoxNorm:
    """Norm of the evolved box state: trapezoid on ``[-X, X]`` plus the far tail.

    The density beyond ``X`` follows the two-term far-field series, whose
    non-oscillating part ``|S(z)|^2 = (1 + 1/(4 c^4 y^4)) / (pi c^2 y^2)``
    integrates in closed form (``c^2 = m / 2 hbar t``, ``y = x -+ a/2``). The
    interference term oscillates at ``omega = m a / (hbar t)``; its integral
    is bounded by ``4 hbar^2 t^2 / (pi m^2 a^2 (X^2 - a^2/4))`` and ``X`` is
    chosen to push that below ``tail_target``.
    """
    hbar, m = spec.constants.hbar, spec.constants.mass
    a = spec.a
    omega = m * a / (hbar * t)
    coeff = 4.0 * hbar ** 2 * t ** 2 / (math.pi * m ** 2 * a ** 2)
    x_cut = max(8.0 * a, math.sqrt(coeff / tail_target + 0.25 * a * a))
    spread = math.sqrt(hbar * t / m)
    dx = min(2.0 * math.pi / omega / 32.0, max(spread, a) / 16.0, spread / 4.0)
    n = int(math.ceil(2.0 * x_cut / dx)) + 1
    grid = make_grid(-x_cut, x_cut, n, "dirichlet")
    on_grid = integrate(grid, np.abs(box_amplitude(spec, grid.x, t)) ** 2)

    c2 = m / (2.0 * hbar * t)
    tail = 0.0
    for y in (x_cut - 0.5 * a, x_cut + 0.5 * a):
        tail += 1.0 / y + 1.0 / (20.0 * c2 * c2 * y ** 5)
    tail *= 2.0 / (4.0 * a * math.pi * c2)
    bound = coeff / (x_cut ** 2 - 0.25 * a * a)
    return BoxNorm(on_grid + tail, on_grid, tail, bound, x_cut, n)


# --------------------------------------------------------- far-field mass

def farfield_probability(spec: BoxSpec, t: float, l1: float, l2: float, n: int | None = None) -> float:
    """Prob(x in [l1, l2]) from the closed form, resolved to ~40 points per fringe."""
    if n is None:
        period = 2.0 * math.pi * spec.constants.hbar * t / (spec.constants.mass * spec.a)
        n = int(math.ceil(40.0 * (l2 - l1) / period)) + 1
    grid = make_grid(l1, l2, max(n, 8), "dirichlet")
    return probability_in_interval(box_evolved(spec, grid, t), l1, l2)


def farfield_probability_oracle(spec: BoxSpec, t: float, l1: float, l2: float, n: int = 2001,
                                q: QuadratureSpec | None = None) -> float:
    """Same probability from quadrature-oracle amplitudes and Simpson's rule."""
    from scipy.integrate import simpson

    if n % 2 == 0:
        n += 1
    xs = np.linspace(l1, l2, n)
    rho = np.array([abs(propagator_quadrature(spec, x, t, q)) ** 2 for x in xs])
    return float(simpson(rho, x=xs))


def density_of(psi: WaveField) -> np.ndarray:
    return np.abs(psi.values) ** 2
