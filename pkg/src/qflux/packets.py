"""Closed-form wave packets: spreading Gaussian, sech soliton, free box state."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .core import Grid1D, PhysConstants, WaveField, integrate

# |z|^2 beyond which exp(-z^2) loses its phase to roundoff
_MAX_PHASE = 1e10


class GridTruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GaussianSpec:
    a: float = 1.0
    k0: float = 0.0
    x0: float = 0.0
    constants: PhysConstants = field(default_factory=PhysConstants)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("Gaussian width must be positive")

    @property
    def u0(self) -> float:
        return self.constants.hbar * self.k0 / self.constants.mass

    @property
    def spreading_time(self) -> float:
        """T = m a^2 / (2 hbar)."""
        return self.constants.mass * self.a ** 2 / (2.0 * self.constants.hbar)

    def width(self, t: float) -> float:
        """epsilon(t) = a sqrt(1 + (t/T)^2)."""
        return self.a * math.hypot(1.0, t / self.spreading_time)

    def center(self, t: float) -> float:
        return self.x0 + self.u0 * t

    def density(self, x, t: float):
        eps = self.width(t)
        xi = np.asarray(x) - self.center(t)
        return math.sqrt(2.0 / math.pi) / eps * np.exp(-2.0 * xi ** 2 / eps ** 2)

    def diffusion_flux(self, x, t: float):
        """D = (2 hbar / m) rho xi / eps^2, closed form."""
        eps = self.width(t)
        xi = np.asarray(x) - self.center(t)
        c = self.constants
        return 2.0 * c.hbar / c.mass * self.density(x, t) * xi / eps ** 2


@dataclass(frozen=True)
class SolitonSpec:
    sigma0: float = 1.0
    u0: float = 0.0
    constants: PhysConstants = field(default_factory=PhysConstants)

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError("soliton width must be positive")

    @property
    def coupling(self) -> float:
        """mu = 2 hbar^2 / (m sigma0)."""
        return 2.0 * self.constants.hbar ** 2 / (self.constants.mass * self.sigma0)

    def density(self, x, t: float):
        s = (np.asarray(x) - self.u0 * t) / self.sigma0
        return 1.0 / (2.0 * self.sigma0) / np.cosh(s) ** 2


@dataclass(frozen=True)
class BoxSpec:
    a: float = 1.0
    constants: PhysConstants = field(default_factory=PhysConstants)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("box width must be positive")

    def z_scale(self, t: float) -> complex:
        """sqrt(m / (2 i hbar t)) on the principal branch."""
        c = self.constants
        return cmath.exp(-0.25j * math.pi) * math.sqrt(c.mass / (2.0 * c.hbar * t))


def _flag_truncation(grid: Grid1D, rho: np.ndarray, total: float, label: str) -> bool:
    inside = integrate(grid, rho)
    lost = total - inside
    if lost > 1e-6:
        warnings.warn(f"{label}: grid misses {lost:.2e} of the probability", GridTruncationWarning,
                      stacklevel=3)
        return True
    return False


def gaussian_state(spec: GaussianSpec, grid: Grid1D, t: float) -> WaveField:
    if t < 0:
        raise ValueError("gaussian_state needs t >= 0")
    c = spec.constants
    T = spec.spreading_time
    tau = t / T
    eps = spec.width(t)
    x = grid.x
    xi = x - spec.center(t)
    delta = xi ** 2 / eps ** 2 * tau - 0.5 * math.atan(tau)
    phase = spec.k0 * x - c.hbar * spec.k0 ** 2 / (2.0 * c.mass) * t + delta
    amp = (2.0 / math.pi) ** 0.25 / math.sqrt(eps) * np.exp(-xi ** 2 / eps ** 2)
    psi = amp * np.exp(1j * phase)
    truncated = _flag_truncation(grid, amp ** 2, 1.0, "gaussian_state")
    return WaveField(grid, psi, c, truncated)


def soliton_state(spec: SolitonSpec, grid: Grid1D, t: float) -> WaveField:
    c = spec.constants
    x = grid.x
    rho = spec.density(x, t)
    energy = 0.5 * c.mass * spec.u0 ** 2 - c.hbar ** 2 / (2.0 * c.mass * spec.sigma0 ** 2)
    phase = (c.mass * spec.u0 * x - energy * t) / c.hbar
    return WaveField(grid, np.sqrt(rho) * np.exp(1j * phase), c)


def soliton_potential(spec: SolitonSpec, grid: Grid1D, t: float) -> np.ndarray:
    return -spec.coupling * spec.density(grid.x, t)


def box_initial(spec: BoxSpec, grid: Grid1D) -> WaveField:
    half = 0.5 * spec.a
    dx = grid.dx
    if grid.x_min > -half - dx or grid.x_max < half + dx:
        raise ValueError(f"grid [{grid.x_min}, {grid.x_max}] does not cover the box ±{half}")
    x = grid.x
    level = 1.0 / math.sqrt(spec.a)
    values = np.where(np.abs(x) < half, level, 0.0)
    edge = np.abs(np.abs(x) - half) < 0.5 * dx
    values[edge] = 0.5 * level
    return WaveField(grid, values, spec.constants)


def box_amplitude(spec: BoxSpec, x, t: float):
    """Freely evolved box amplitude at positions ``x``.

    Uses ``psi = (erfc(z1) - erfc(z2)) / (2 sqrt(a))`` with
    ``z1,2 = sqrt(m / (2 i hbar t)) (|x| -+ a/2)``; the state is even in x.
    """
    if not t > 0:
        raise ValueError("box evolution needs t > 0")
    xa = np.abs(np.asarray(x, dtype=float))
    gamma = spec.z_scale(t)
    half = 0.5 * spec.a
    z1 = gamma * (xa - half)
    z2 = gamma * (xa + half)
    if np.max(np.abs(z2)) ** 2 > _MAX_PHASE:
        raise specfun.SpecialFunctionOverflow(
            "t is too small for the closed form at these x; use box_farfield_density")
    return (specfun.erfc(z1) - specfun.erfc(z2)) / (2.0 * math.sqrt(spec.a))


def box_amplitude_erfi_form(spec: BoxSpec, x, t: float, with_pi: bool = False):
    """The evolved box state written with erfi and (-1)^{1/4}, (-1)^{3/4} factors.

    Principal branches throughout. ``with_pi=True`` keeps an extra pi inside
    the square-root scale, a variant that does not solve the free equation;
    it is kept so tests can show the discrepancy against the quadrature.
    """
    c = spec.constants
    scale = math.sqrt(c.mass / ((2.0 * math.pi if with_pi else 2.0) * c.hbar * t))
    r4 = cmath.exp(0.25j * math.pi)
    r34 = cmath.exp(0.75j * math.pi)
    x = np.asarray(x, dtype=float)
    half = 0.5 * spec.a
    pref = r34 / (2.0 * cmath.sqrt(1j * spec.a))
    return pref * (specfun.erfi(r4 * scale * (x - half)) - specfun.erfi(r4 * scale * (x + half)))


def box_evolved(spec: BoxSpec, grid: Grid1D, t: float) -> WaveField:
    return WaveField(grid, box_amplitude(spec, grid.x, t), spec.constants)


def box_farfield_density(spec: BoxSpec, x, t: float, terms: int = 2):
    """Far-field density from the large-|z| series in z1 and z2.

    ``rho ~ |S(z1) - S(z2)|^2 / (4a)`` with ``S`` the truncated series of
    ``specfun.erfc_asymptotic_tail``. Requires ``|x| >= 5a`` and ``|z1| >= 3``.
    """
    if not t > 0:
        raise ValueError("far-field density needs t > 0")
    xa = np.abs(np.asarray(x, dtype=float))
    if np.any(xa < 5.0 * spec.a):
        raise ValueError("far-field series needs |x| >= 5a")
    gamma = spec.z_scale(t)
    half = 0.5 * spec.a
    z1 = gamma * (xa - half)
    z2 = gamma * (xa + half)
    if np.any(np.abs(z1) < 3.0):
        raise ValueError("far-field series needs |z1| >= 3 (t too large for this x)")
    s1 = specfun.erfc_asymptotic_tail(z1, terms)
    s2 = specfun.erfc_asymptotic_tail(z2, terms)
    return np.abs(s1 - s2) ** 2 / (4.0 * spec.a)
