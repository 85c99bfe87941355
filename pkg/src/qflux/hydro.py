"""Hydrodynamic fields of a 1-D wavefunction and the kinetic-energy split.

Flux ``J = (hbar/M) Im(psi* dpsi/dx)``, diffusion flux ``D = -(hbar/2M) drho/dx``
and osmotic velocity ``u = -D / rho``. ``J^2/rho`` and ``D^2/rho`` integrate to
the flow and diffusion parts of the kinetic energy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Grid1D, WaveField, integrate, norm


@dataclass(frozen=True, eq=False)
class HydroFields:
    rho: np.ndarray
    flux_j: np.ndarray
    diff_d: np.ndarray
    osmotic_u: np.ndarray  # NaN where rho < rho_floor
    phase_s: np.ndarray  # NaN where rho < rho_floor


@dataclass(frozen=True)
class EnergySplit:
    e_flow: float
    e_diff: float

    @property
    def e_total(self) -> float:
        return self.e_flow + self.e_diff


class NormalizationError(ValueError):
    pass


# central first-derivative weights for offsets 1..k (antisymmetric)
_CENTRAL = {
    2: (1.0 / 2.0,),
    4: (2.0 / 3.0, -1.0 / 12.0),
    6: (3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0),
    8: (4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0),
}
STENCIL_ORDER = 8


def derivative(grid: Grid1D, f: np.ndarray) -> np.ndarray:
    """First derivative: 8th-order central stencil in the interior.

    Periodic grids wrap around. On Dirichlet grids the order drops to 6, 4
    and 2 (central) as the stencil nears an end; the end points use the
    2nd-order one-sided stencil.
    """
    f = np.asarray(f)
    h = grid.dx
    if grid.periodic:
        out = np.zeros(f.shape, dtype=np.result_type(f, float))
        for k, w in enumerate(_CENTRAL[STENCIL_ORDER], start=1):
            out += w * (np.roll(f, -k) - np.roll(f, k))
        return out / h
    n = f.size
    out = np.empty(f.shape, dtype=np.result_type(f, float))
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    i = np.arange(1, n - 1)
    half_width = np.minimum(np.minimum(i, n - 1 - i), STENCIL_ORDER // 2)
    for k in range(1, STENCIL_ORDER // 2 + 1):
        idx = i[half_width == k]
        acc = np.zeros(idx.size, dtype=out.dtype)
        for j, w in enumerate(_CENTRAL[2 * k], start=1):
            acc += w * (f[idx + j] - f[idx - j])
        out[idx] = acc / h
    return out


def default_floor(rho: np.ndarray) -> float:
    return 1e-12 * float(np.max(rho)) if rho.size else 0.0


def probability_density(psi: WaveField) -> np.ndarray:
    return np.abs(psi.values) ** 2


def probability_flux(psi: WaveField) -> np.ndarray:
    c = psi.constants
    return c.hbar / c.mass * np.imag(np.conj(psi.values) * derivative(psi.grid, psi.values))


def diffusion_flux(psi: WaveField) -> np.ndarray:
    c = psi.constants
    return -0.5 * c.hbar / c.mass * derivative(psi.grid, probability_density(psi))


def momentum_density(psi: WaveField) -> np.ndarray:
    """psi* (-i hbar d/dx) psi; its real part is M J."""
    return -1j * psi.constants.hbar * np.conj(psi.values) * derivative(psi.grid, psi.values)


def osmotic_velocity(psi: WaveField, rho_floor: float | None = None) -> np.ndarray:
    rho = probability_density(psi)
    floor = default_floor(rho) if rho_floor is None else rho_floor
    if not floor > 0:
        raise ValueError("rho_floor must be positive")
    d = diffusion_flux(psi)
    u = np.full_like(rho, np.nan)
    ok = rho >= floor
    u[ok] = -d[ok] / rho[ok]
    return u


def hydro_fields(psi: WaveField, rho_floor: float | None = None) -> HydroFields:
    rho = probability_density(psi)
    floor = default_floor(rho) if rho_floor is None else rho_floor
    phase = np.where(rho >= floor, np.angle(psi.values), np.nan)
    return HydroFields(
        rho=rho,
        flux_j=probability_flux(psi),
        diff_d=diffusion_flux(psi),
        osmotic_u=osmotic_velocity(psi, floor),
        phase_s=phase,
    )


def _energy_densities(psi: WaveField, floor: float):
    rho = probability_density(psi)
    j = probability_flux(psi)
    d = diffusion_flux(psi)
    ok = rho >= floor
    flow = np.zeros_like(rho)
    diff = np.zeros_like(rho)
    flow[ok] = j[ok] ** 2 / rho[ok]
    diff[ok] = d[ok] ** 2 / rho[ok]
    # at a simple zero psi ~ c (x - x0): J^2/rho -> 0 while D^2/rho -> (hbar/M)^2 |c|^2
    c = psi.constants
    dpsi = derivative(psi.grid, psi.values)
    diff[~ok] = (c.hbar / c.mass) ** 2 * np.abs(dpsi[~ok]) ** 2
    return flow, diff, ok


def kinetic_energy_split(psi: WaveField, rho_floor: float | None = None,
                         norm_tol: float = 1e-6) -> EnergySplit:
    """Flow and diffusion kinetic energies ``M/2 int J^2/rho`` and ``M/2 int D^2/rho``.

    Points with ``rho < rho_floor`` are wavefunction nodes or empty tails; there
    the integrands take their limits at a simple zero (flow 0, diffusion
    ``(hbar/M)^2 |dpsi/dx|^2``) instead of the 0/0 ratio.
    """
    total = norm(psi)
    if abs(total - 1.0) > norm_tol:
        raise NormalizationError(f"state norm {total:.12g} is not 1 within {norm_tol:g}")
    rho = probability_density(psi)
    floor = default_floor(rho) if rho_floor is None else rho_floor
    flow, diff, _ = _energy_densities(psi, floor)
    m = psi.constants.mass
    e_flow = 0.5 * m * integrate(psi.grid, flow)
    e_diff = 0.5 * m * integrate(psi.grid, diff)
    return EnergySplit(e_flow, e_diff)


def osmotic_energy(psi: WaveField, rho_floor: float | None = None) -> float:
    """``M/2 int rho u^2``, built from the osmotic velocity field.

    Masked points use the same node limit as ``kinetic_energy_split``.
    """
    rho = probability_density(psi)
    floor = default_floor(rho) if rho_floor is None else rho_floor
    u = osmotic_velocity(psi, floor)
    ok = np.isfinite(u)
    integrand = np.zeros_like(rho)
    integrand[ok] = rho[ok] * u[ok] ** 2
    c = psi.constants
    dpsi = derivative(psi.grid, psi.values)
    integrand[~ok] = (c.hbar / c.mass) ** 2 * np.abs(dpsi[~ok]) ** 2
    return 0.5 * c.mass * integrate(psi.grid, integrand)


@dataclass(frozen=True)
class EdgeFluxResult:
    dx: np.ndarray
    max_abs_d: np.ndarray
    slope: float
    outward: bool


def edge_flux_divergence(spec, grids: Sequence[Grid1D]) -> EdgeFluxResult:
    """Growth of max|D| of the sharp box state under grid refinement.

    Fits ``log max|D|`` against ``log(1/dx)``; a discrete delta function gives
    slope 1. Also checks D points outward at both edges: positive just inside
    ``+a/2`` and negative just inside ``-a/2``.
    """
    from .packets import box_initial

    if len(grids) < 3:
        raise ValueError("need at least three grids")
    dxs = np.array([g.dx for g in grids])
    if np.any(np.diff(dxs) >= 0):
        raise ValueError("grids must have strictly decreasing spacing")
    peaks = []
    outward = True
    half = 0.5 * spec.a
    for g in grids:
        psi = box_initial(spec, g)
        d = diffusion_flux(psi)
        peaks.append(float(np.max(np.abs(d))))
        x = g.x
        right = np.argmin(np.abs(x - (half - g.dx)))
        left = np.argmin(np.abs(x - (-half + g.dx)))
        outward &= bool(d[right] > 0 and d[left] < 0)
    peaks = np.array(peaks)
    slope = float(np.polyfit(np.log(1.0 / dxs), np.log(peaks), 1)[0])
    return EdgeFluxResult(dxs, peaks, slope, outward)


def smooth_flux_slope(psi_factory, grids: Sequence[Grid1D]) -> float:
    """Same log-log fit for a smooth state, the negative control."""
    dxs = np.array([g.dx for g in grids])
    peaks = [float(np.max(np.abs(diffusion_flux(psi_factory(g))))) for g in grids]
    return float(np.polyfit(np.log(1.0 / dxs), np.log(peaks), 1)[0])


def force_field(grid: Grid1D, potential: np.ndarray) -> np.ndarray:
    return -derivative(grid, potential)
