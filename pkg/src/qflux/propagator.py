"""Time evolution: Strang split-step Fourier (linear or cubic NLS) and Crank-Nicolson.

Both integrate ``i hbar psi_t = -(hbar^2/2m) psi_xx + V psi - mu |psi|^2 psi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.linalg import solve_banded

from .core import WaveField, integrate, l2_distance, norm
from .hydro import NormalizationError, kinetic_energy_split

PotentialSource = Union[None, np.ndarray, Callable[[float], np.ndarray]]


class Method(enum.Enum):
    SPLIT_STEP = "splitstep"
    CRANK_NICOLSON = "cranknicolson"


class StepTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PropagatorConfig:
    """Run parameters.

    ``dt`` and ``t_final`` may both be negative to run backwards in time.
    The step count is ``ceil(t_final / dt)`` and the step is shrunk so the
    run ends exactly at ``t_final``.
    """

    dt: float
    t_final: float
    method: Method = Method.SPLIT_STEP
    potential: PotentialSource = None
    nonlinearity_mu: float = 0.0
    snapshot_stride: int = 1
    t_start: float = 0.0

    def __post_init__(self):
        if not isinstance(self.method, Method):
            object.__setattr__(self, "method", Method(str(self.method).lower()))
        if self.dt == 0 or not math.isfinite(self.dt):
            raise ValueError("dt must be finite and nonzero")
        if self.t_final * self.dt <= 0 or abs(self.t_final) < abs(self.dt) * (1 - 1e-12):
            raise ValueError("t_final must have the sign of dt and |t_final| >= |dt|")
        if self.nonlinearity_mu < 0:
            raise ValueError("nonlinearity_mu must be >= 0")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_final / self.dt - 1e-9))

    def potential_at(self, t: float, n: int) -> np.ndarray:
        if self.potential is None:
            return np.zeros(n)
        if callable(self.potential):
            return np.asarray(self.potential(t), dtype=float)
        return np.asarray(self.potential, dtype=float)


@dataclass(eq=False)
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    energies: list = field(default_factory=list)

    def record(self, t: float, psi: WaveField) -> None:
        self.times.append(t)
        self.states.append(psi)
        self.norms.append(norm(psi))
        try:
            self.energies.append(kinetic_energy_split(psi, norm_tol=1e-4))
        except NormalizationError:
            self.energies.append(None)

    @property
    def final(self) -> WaveField:
        return self.states[-1]


def check_step(psi: WaveField, dt: float) -> None:
    """Refuse steps whose largest kinetic phase exceeds pi (split-step aliasing)."""
    c = psi.constants
    k_max = math.pi / psi.grid.dx
    phase = abs(dt) * c.hbar * k_max ** 2 / (2.0 * c.mass)
    if phase > math.pi:
        dt_max = 2.0 * math.pi * c.mass / (c.hbar * k_max ** 2)
        raise StepTooLarge(
            f"|dt| * hbar k_max^2 / 2m = {phase:.3g} exceeds pi; "
            f"use |dt| <= {dt_max:.3g} or a coarser grid")


def propagate(psi0: WaveField, config: PropagatorConfig) -> Trajectory:
    n0 = norm(psi0)
    if abs(n0 - 1.0) > 1e-6:
        raise NormalizationError(f"initial state norm {n0:.12g} is not 1 within 1e-6")
    steps = config.n_steps
    dt = config.t_final / steps
    if config.method is Method.SPLIT_STEP:
        check_step(psi0, dt)
        stepper = _SplitStep(psi0, config, dt)
    else:
        stepper = _CrankNicolson(psi0, config, dt)

    traj = Trajectory()
    traj.record(config.t_start, psi0)
    psi = psi0.values.copy()
    for k in range(steps):
        t = config.t_start + k * dt
        psi = stepper.step(psi, t)
        if (k + 1) % config.snapshot_stride == 0 or k + 1 == steps:
            traj.record(config.t_start + (k + 1) * dt, psi0.with_values(psi))
    return traj


class _SplitStep:
    def __init__(self, psi0: WaveField, config: PropagatorConfig, dt: float):
        if not psi0.grid.periodic:
            raise ValueError("split-step propagation needs a periodic grid")
        c = psi0.constants
        self.hbar = c.hbar
        self.dt = dt
        self.mu = config.nonlinearity_mu
        self.config = config
        self.n = psi0.grid.n
        k = psi0.grid.wavenumbers()
        self.kinetic = np.exp(-1j * c.hbar * k ** 2 * dt / (2.0 * c.mass))

    def _half(self, psi, t):
        v = self.config.potential_at(t, self.n)
        if self.mu:
            v = v - self.mu * np.abs(psi) ** 2
        return psi * np.exp(-0.5j * v * self.dt / self.hbar)

    def step(self, psi, t):
        psi = self._half(psi, t)
        psi = np.fft.ifft(self.kinetic * np.fft.fft(psi))
        return self._half(psi, t + self.dt)


class _CrankNicolson:
    """Second-order Laplacian with psi = 0 held at both grid ends."""

    def __init__(self, psi0: WaveField, config: PropagatorConfig, dt: float):
        if psi0.grid.periodic:
            raise ValueError("Crank-Nicolson propagation needs a Dirichlet grid")
        if config.nonlinearity_mu:
            raise ValueError("Crank-Nicolson here handles the linear equation only")
        c = psi0.constants
        self.config = config
        self.n = psi0.grid.n
        self.dt = dt
        self.alpha = 1j * dt / (2.0 * c.hbar)
        self.off = -c.hbar ** 2 / (2.0 * c.mass * psi0.grid.dx ** 2)
        self.diag0 = -2.0 * self.off

    def step(self, psi, t):
        v = self.config.potential_at(t + 0.5 * self.dt, self.n)[1:-1]
        diag = self.diag0 + v
        inner = psi[1:-1]
        h_psi = diag * inner
        h_psi[1:] += self.off * inner[:-1]
        h_psi[:-1] += self.off * inner[1:]
        rhs = inner - self.alpha * h_psi
        m = inner.size
        ab = np.zeros((3, m), dtype=complex)
        ab[0, 1:] = self.alpha * self.off
        ab[1, :] = 1.0 + self.alpha * diag
        ab[2, :-1] = self.alpha * self.off
        out = np.zeros_like(psi)
        out[1:-1] = solve_banded((1, 1), ab, rhs)
        return out


@dataclass(frozen=True, eq=False)
class ShapeErrorSeries:
    times: np.ndarray
    l2_error: np.ndarray
    mean_x: np.ndarray


def shape_error(traj: Trajectory, reference_density: Callable[[np.ndarray, float], np.ndarray]
                ) -> ShapeErrorSeries:
    """L2 distance of each snapshot density from ``reference_density(x, t)``.

    Pass a reference that already moves with the packet (for a soliton, its
    profile translated by ``u0 t``).
    """
    if not traj.states:
        raise ValueError("empty trajectory")
    errs, means = [], []
    for t, psi in zip(traj.times, traj.states):
        rho = np.abs(psi.values) ** 2
        errs.append(l2_distance(psi.grid, rho, reference_density(psi.grid.x, t)))
        means.append(integrate(psi.grid, psi.grid.x * rho) / integrate(psi.grid, rho))
    return ShapeErrorSeries(np.array(traj.times), np.array(errs), np.array(means))


