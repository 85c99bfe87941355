"""Grids, sampled wavefunctions and quadrature shared by every other module."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class PhysConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"mass must be positive and finite, got {self.mass}")


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D grid.

    Periodic grids hold ``n`` points on ``[x_min, x_max)``; the point at
    ``x_max`` is the image of ``x_min``. Dirichlet grids include both ends.
    """

    x_min: float
    x_max: float
    n: int
    boundary: Boundary = Boundary.DIRICHLET

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ValueError(f"degenerate interval [{self.x_min}, {self.x_max}]")
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"grid needs at least 8 points, got {self.n}")
        if not isinstance(self.boundary, Boundary):
            object.__setattr__(self, "boundary", Boundary(str(self.boundary).lower()))
        if not self.dx > 0:
            raise ValueError("grid spacing underflows")

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        if self.periodic:
            return self.length / self.n
        return self.length / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        x = self.x_min + self.dx * np.arange(self.n)
        if not self.periodic:
            x[-1] = self.x_max
        x.flags.writeable = False
        return x

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def quadrature_weights(self) -> np.ndarray:
        w = np.full(self.n, self.dx)
        if not self.periodic:
            w[0] = w[-1] = 0.5 * self.dx
        return w


def make_grid(x_min: float, x_max: float, n: int,
              boundary: Boundary | str = Boundary.DIRICHLET) -> Grid1D:
    if isinstance(boundary, str):
        boundary = Boundary(boundary.lower())
    return Grid1D(float(x_min), float(x_max), int(n), boundary)


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex samples of a wavefunction on a grid.

    The array is copied and frozen on construction so instances behave as values.
    """

    grid: Grid1D
    values: np.ndarray
    constants: PhysConstants = field(default_factory=PhysConstants)
    # set by constructors that know the packet leaks past the grid edges
    truncated: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("wavefunction samples must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values: np.ndarray) -> "WaveField":
        return WaveField(self.grid, values, self.constants)


def integrate(grid: Grid1D, f: np.ndarray) -> float:
    """Rectangle rule on periodic grids, trapezoid on Dirichlet grids."""
    f = np.asarray(f)
    return float(np.sum(grid.quadrature_weights() * f))


def norm(psi: WaveField) -> float:
    return integrate(psi.grid, np.abs(psi.values) ** 2)


def _closed_samples(grid: Grid1D, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # periodic grids get their wrapped endpoint so the piecewise-linear
    # interpolant integrates to the rectangle rule over the full period
    x = np.asarray(grid.x, dtype=float)
    if grid.periodic:
        return np.append(x, grid.x_max), np.append(f, f[0])
    return x, np.asarray(f, dtype=float)


def _linear_antiderivative(xs: np.ndarray, fs: np.ndarray, q: float) -> float:
    """Integral of the piecewise-linear interpolant from xs[0] to q."""
    cell = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(xs) * (fs[1:] + fs[:-1]))))
    if q <= xs[0]:
        return 0.0
    if q >= xs[-1]:
        return float(cell[-1])
    i = int(np.searchsorted(xs, q, side="right")) - 1
    h = xs[i + 1] - xs[i]
    s = (q - xs[i]) / h
    fq = fs[i] + s * (fs[i + 1] - fs[i])
    return float(cell[i] + 0.5 * (q - xs[i]) * (fs[i] + fq))


def probability_in_interval(psi: WaveField, l1: float, l2: float) -> float:
    """Probability mass on ``[l1, l2]``.

    Partial cells use linear interpolation of ``|psi|^2``, so the result is
    exactly additive over adjacent intervals. An interval reaching past the
    grid is clipped; one that misses the grid entirely is an error.
    """
    if not l1 < l2:
        raise ValueError(f"need l1 < l2, got [{l1}, {l2}]")
    g = psi.grid
    if l2 <= g.x_min or l1 >= g.x_max:
        raise ValueError(f"interval [{l1}, {l2}] lies outside the grid [{g.x_min}, {g.x_max}]")
    xs, fs = _closed_samples(g, np.abs(psi.values) ** 2)
    return _linear_antiderivative(xs, fs, l2) - _linear_antiderivative(xs, fs, l1)


def l2_distance(grid: Grid1D, a: np.ndarray, b: np.ndarray) -> float:
    return math.sqrt(integrate(grid, np.abs(np.asarray(a) - np.asarray(b)) ** 2))
