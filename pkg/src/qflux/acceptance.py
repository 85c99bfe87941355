"""Acceptance criteria: each returns a measured value checked against a pinned tolerance.

``run`` executes them in order; ``qflux acceptance`` and ``tests/test_acceptance.py``
both go through here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import specfun
from .analysis import (box_norm, farfield_probability, farfield_probability_oracle,
                       gaussian_diffusion_ratio)
from .core import WaveField, l2_distance, make_grid
from .hydro import (diffusion_flux, edge_flux_divergence, force_field, kinetic_energy_split,
                    osmotic_energy, probability_density, probability_flux)
from .oracles import highprec_faddeeva, propagator_quadrature
from .packets import (BoxSpec, GaussianSpec, SolitonSpec, box_amplitude, box_farfield_density,
                      gaussian_state, soliton_potential, soliton_state)
from .propagator import Method, PropagatorConfig, propagate, shape_error


@dataclass(frozen=True)
class Result:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name:<32} measured={self.measured:.6g}  tolerance={self.tolerance:.6g}"
        if self.detail:
            text += f"  [{self.detail}]"
        return text + f"  ({self.seconds:.1f}s)"


# One tolerance per criterion; meaning of "measured" is in each function.
TOLERANCES: dict[str, float] = {
    "gaussian_flux_identity": 1e-8,
    "gaussian_longtime_diffusivity": 0.0013,
    "stationary_energy": 1e-6,
    "osmotic_identity": 1e-10,
    "soliton_preservation": 1e-3,
    "force_diffusion_opposition": 0.0,
    "box_evolution_crosscheck": 1e-8,
    "farfield_leakage": 0.05,
    "asymptotic_density": 0.10,
    "edge_flux_divergence": 0.1,
    "specfun_accuracy": 1e-11,
    "propagator_health": 1e-6,
}


def gaussian_flux_identity(tol: float) -> Result:
    """max_t max_x |J - rho u0 - (t/T) D| / (max rho * velocity scale)."""
    spec = GaussianSpec(a=1.0, k0=2.0)
    T = spec.spreading_time
    c = spec.constants
    vscale = max(abs(spec.u0), c.hbar / (c.mass * spec.a))
    worst = 0.0
    for t in (0.0, 0.5 * T, T, 3.0 * T):
        half = 6.0 * spec.width(t)
        grid = make_grid(spec.center(t) - half, spec.center(t) + half, 2048, "periodic")
        psi = gaussian_state(spec, grid, t)
        rho = probability_density(psi)
        resid = probability_flux(psi) - rho * spec.u0 - (t / T) * diffusion_flux(psi)
        worst = max(worst, float(np.max(np.abs(resid)) / (rho.max() * vscale)))
    return Result("gaussian_flux_identity", worst, tol, worst <= tol)


def gaussian_longtime_diffusivity(tol: float) -> Result:
    """|D(a/2, 2t)/D(a/2, t) - 1/8| at t = 100 T; must lie within [0.1237, 0.1263]."""
    spec = GaussianSpec(a=1.0)
    ratio = gaussian_diffusion_ratio(spec, 0.5 * spec.a, 100.0 * spec.spreading_time)
    dev = abs(ratio - 0.125)
    return Result("gaussian_longtime_diffusivity", dev, tol, dev <= tol, f"ratio={ratio:.6f}")


def _well_state(n: int = 4096, length: float = 1.0) -> WaveField:
    grid = make_grid(0.0, length, n, "dirichlet")
    return WaveField(grid, math.sqrt(2.0 / length) * np.sin(math.pi * grid.x / length))


def stationary_energy(tol: float) -> Result:
    """Relative error of e_diff against hbar^2 pi^2 / (2 m L^2); e_flow must be <= 1e-10 e_total."""
    psi = _well_state()
    c = psi.constants
    exact = c.hbar ** 2 * math.pi ** 2 / (2.0 * c.mass * 1.0 ** 2)
    split = kinetic_energy_split(psi)
    rel = abs(split.e_diff / exact - 1.0)
    flow_ok = split.e_flow <= 1e-10 * split.e_total
    return Result("stationary_energy", rel, tol, rel <= tol and flow_ok,
                  f"e_flow={split.e_flow:.3g} e_diff={split.e_diff:.12g}")


def osmotic_identity(tol: float) -> Result:
    """|(M/2) int rho u^2 / e_diff - 1| on the infinite-well ground state."""
    psi = _well_state()
    e_diff = kinetic_energy_split(psi).e_diff
    rel = abs(osmotic_energy(psi) / e_diff - 1.0)
    return Result("osmotic_identity", rel, tol, rel <= tol)


def soliton_preservation(tol: float) -> Result:
    """Final density L2 shape error of the NLS soliton; centroid and mu=0 control also required."""
    spec = SolitonSpec(sigma0=1.0, u0=1.0)
    grid = make_grid(-100.0, 100.0, 4096, "periodic")
    psi0 = soliton_state(spec, grid, 0.0)
    t_final = 10.0
    runs = {}
    for mu in (spec.coupling, 0.0):
        traj = propagate(psi0, PropagatorConfig(1e-3, t_final, nonlinearity_mu=mu,
                                                snapshot_stride=1000))
        runs[mu] = shape_error(traj, spec.density)
    err = float(runs[spec.coupling].l2_error[-1])
    centroid = abs(float(runs[spec.coupling].mean_x[-1]) - spec.u0 * t_final)
    control = float(runs[0.0].l2_error[-1])
    ok = err <= tol and centroid <= 1e-3 and control >= 10.0 * err
    return Result("soliton_preservation", err, tol, ok,
                  f"centroid_err={centroid:.3g} control={control:.3g}")


def force_diffusion_opposition(tol: float) -> Result:
    """max F*D over points with rho > 1e-12, soliton at t = 0, 2.5, 5."""
    spec = SolitonSpec(sigma0=1.0, u0=1.0)
    grid = make_grid(-40.0, 40.0, 4096, "periodic")
    worst = -math.inf
    for t in (0.0, 2.5, 5.0):
        psi = soliton_state(spec, grid, t)
        fd = force_field(grid, soliton_potential(spec, grid, t)) * diffusion_flux(psi)
        mask = probability_density(psi) > 1e-12
        worst = max(worst, float(np.max(fd[mask])))
    return Result("force_diffusion_opposition", worst, tol, worst <= tol)


BOX_POINTS_T = (1e-3, 1e-2, 0.1, 0.5, 1.0)
BOX_POINTS_X = (0.0, 0.3, 0.5, 2.0, 10.0)
BOX_NORM_TIMES = (1e-3, 1e-2, 1e-1, 1.0)


def box_evolution_crosscheck(tol: float) -> Result:
    """max |box_evolved - quadrature| over 25 (x, t) points; norms within 1e-6 at four times."""
    spec = BoxSpec(a=1.0)
    worst = 0.0
    for t in BOX_POINTS_T:
        for x in BOX_POINTS_X:
            exact = complex(box_amplitude(spec, x, t))
            worst = max(worst, abs(exact - propagator_quadrature(spec, x, t)))
    norm_dev = max(abs(box_norm(spec, t).total - 1.0) for t in BOX_NORM_TIMES)
    return Result("box_evolution_crosscheck", worst, tol, worst <= tol and norm_dev <= 1e-6,
                  f"max|norm-1|={norm_dev:.3g}")


def farfield_leakage(tol: float) -> Result:
    """|P / P_oracle - 1| for Prob([5, 10]) at t = 1e-3; P must be > 0."""
    spec = BoxSpec(a=1.0)
    p = farfield_probability(spec, 1e-3, 5.0, 10.0)
    p_ref = farfield_probability_oracle(spec, 1e-3, 5.0, 10.0, n=1001)
    rel = abs(p / p_ref - 1.0)
    return Result("farfield_leakage", rel, tol, p > 0 and rel <= tol, f"P={p:.6g} oracle={p_ref:.6g}")


def asymptotic_density(tol: float) -> Result:
    """max relative error of the 2-term far-field density at x = 10a over times with |z1| >= 3."""
    spec = BoxSpec(a=1.0)
    x = 10.0 * spec.a
    worst = 0.0
    for t in (5e-4, 1e-3, 1e-1, 1.0):
        exact = abs(complex(box_amplitude(spec, x, t))) ** 2
        approx = float(box_farfield_density(spec, x, t, terms=2))
        worst = max(worst, abs(approx / exact - 1.0))
    return Result("asymptotic_density", worst, tol, worst <= tol)


def edge_flux_divergence_check(tol: float) -> Result:
    """|slope - 1| of log max|D| vs log(1/dx) for n in 512..4096; outward signs required."""
    grids = [make_grid(-1.0, 1.0, n, "periodic") for n in (512, 1024, 2048, 4096)]
    res = edge_flux_divergence(BoxSpec(a=1.0), grids)
    dev = abs(res.slope - 1.0)
    return Result("edge_flux_divergence", dev, tol, dev <= tol and res.outward,
                  f"slope={res.slope:.6f} outward={res.outward}")


def specfun_accuracy(tol: float) -> Result:
    """max relative faddeeva error vs the 100-digit oracle on 1000 points, |z| <= 6."""
    rng = np.random.default_rng(20231016)
    r = 6.0 * np.sqrt(rng.uniform(0.0, 1.0, 1000))
    theta = rng.uniform(-math.pi, math.pi, 1000)
    z = r * np.exp(1j * theta)
    w = specfun.faddeeva(z)
    ref = np.array([highprec_faddeeva(v) for v in z])
    rel = float(np.max(np.abs(w - ref) / np.abs(ref)))
    axis = np.linspace(-6.0, 6.0, 32)
    lattice = (axis[:, None] + 1j * axis[None, :]).ravel()
    ident = float(np.max(np.abs(specfun.erf(lattice) + specfun.erfc(lattice) - 1.0)))
    return Result("specfun_accuracy", rel, tol, rel <= tol and ident <= 1e-12,
                  f"erf+erfc-1={ident:.3g}")


def propagator_health(tol: float) -> Result:
    """Free-Gaussian L2 error vs analytic; dt-halving ratio, reversal and cross-method also required."""
    # free packet against the closed form
    g = GaussianSpec(a=1.0, k0=1.0)
    T = g.spreading_time
    grid = make_grid(-20.0, 20.0, 2048, "periodic")
    final = propagate(gaussian_state(g, grid, 0.0),
                      PropagatorConfig(T / 4096, T, snapshot_stride=10 ** 9)).final
    free_err = l2_distance(grid, final.values, gaussian_state(g, grid, T).values)

    # Strang order on the NLS soliton, whose exact solution is known
    sol = SolitonSpec(sigma0=1.0, u0=1.0)
    sgrid = make_grid(-40.0, 40.0, 512, "periodic")
    errs = []
    for dt in (0.01, 0.005):
        out = propagate(soliton_state(sol, sgrid, 0.0),
                        PropagatorConfig(dt, 2.0, nonlinearity_mu=sol.coupling,
                                         snapshot_stride=10 ** 9)).final
        errs.append(l2_distance(sgrid, out.values, soliton_state(sol, sgrid, 2.0).values))
    ratio = errs[0] / errs[1]

    # time reversal in a harmonic trap
    hgrid = make_grid(-20.0, 20.0, 512, "periodic")
    v = 0.5 * hgrid.x ** 2
    psi0 = gaussian_state(GaussianSpec(a=1.0, k0=2.0), hgrid, 0.0)
    fwd = propagate(psi0, PropagatorConfig(1e-3, 1.0, potential=v, snapshot_stride=10 ** 9)).final
    back = propagate(fwd, PropagatorConfig(-1e-3, -1.0, potential=v, t_start=1.0,
                                           snapshot_stride=10 ** 9)).final
    reversal = l2_distance(hgrid, back.values, psi0.values)

    # split-step vs Crank-Nicolson densities at shared nodes
    pgrid = make_grid(-12.0, 12.0, 2400, "periodic")
    dgrid = make_grid(-12.0, 12.0 - 0.5 * pgrid.dx, 4800, "dirichlet")
    ss = propagate(gaussian_state(g, pgrid, 0.0),
                   PropagatorConfig(T / 8192, T, snapshot_stride=10 ** 9)).final
    cn = propagate(gaussian_state(g, dgrid, 0.0),
                   PropagatorConfig(T / 4096, T, method=Method.CRANK_NICOLSON,
                                    snapshot_stride=10 ** 9)).final
    cross = l2_distance(pgrid, np.abs(ss.values) ** 2, np.abs(cn.values[::2]) ** 2)

    ok = free_err <= tol and 3.5 <= ratio <= 4.5 and reversal <= 1e-8 and cross <= 1e-5
    return Result("propagator_health", free_err, tol, ok,
                  f"dt_ratio={ratio:.4f} reversal={reversal:.3g} ss_vs_cn={cross:.3g}")


CRITERIA: dict[str, Callable[[float], Result]] = {
    "gaussian_flux_identity": gaussian_flux_identity,
    "gaussian_longtime_diffusivity": gaussian_longtime_diffusivity,
    "stationary_energy": stationary_energy,
    "osmotic_identity": osmotic_identity,
    "soliton_preservation": soliton_preservation,
    "force_diffusion_opposition": force_diffusion_opposition,
    "box_evolution_crosscheck": box_evolution_crosscheck,
    "farfield_leakage": farfield_leakage,
    "asymptotic_density": asymptotic_density,
    "edge_flux_divergence": edge_flux_divergence_check,
    "specfun_accuracy": specfun_accuracy,
    "propagator_health": propagator_health,
}


def validate_tolerances(overrides: dict[str, str]) -> dict[str, float]:
    """Merge tolerance overrides; raises ValueError naming the bad key."""
    tols = dict(TOLERANCES)
    for key, raw in overrides.items():
        if key not in tols:
            raise ValueError(f"unknown criterion '{key}'")
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"{key}: tolerance '{raw}' is not a number") from None
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{key}: tolerance must be finite and non-negative, got {raw}")
        tols[key] = value
    return tols


def run_one(name: str, tolerances: dict[str, float] | None = None) -> Result:
    tols = tolerances or TOLERANCES
    start = time.perf_counter()
    res = CRITERIA[name](tols[name])
    return Result(res.name, res.measured, res.tolerance, res.passed, res.detail,
                  time.perf_counter() - start)


def run(only: str | None = None, tolerances: dict[str, float] | None = None) -> list[Result]:
    if only is not None and only not in CRITERIA:
        raise KeyError(f"unknown criterion '{only}'; choose from {', '.join(CRITERIA)}")
    names = [only] if only else list(CRITERIA)
    return [run_one(n, tolerances) for n in names]
