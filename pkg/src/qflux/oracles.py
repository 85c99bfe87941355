"""Slow, independent references for the production kernels.

Nothing in here calls into ``specfun``, ``hydro`` or ``propagator``: the
Faddeeva reference sums the erf Maclaurin series in 100-digit arithmetic, the
propagator reference integrates the free kernel panel by panel with
Gauss-Legendre rules, and the derivative reference builds Fornberg weights
from scratch.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .core import Grid1D


class OracleFailure(RuntimeError):
    pass


# ---------------------------------------------------------------- Faddeeva

_ORACLE_DPS = 100


def highprec_faddeeva(z: complex) -> complex:
    """``w(z)`` from the erf Maclaurin series summed at 100 digits.

    Good to well below 1e-14 relative for ``|z| <= 8``: the largest series
    term there is about ``exp(64)``, leaving more than 60 spare digits.
    """
    z = complex(z)
    if abs(z) > 8.0:
        raise ValueError(f"oracle only covers |z| <= 8, got |z| = {abs(z):.3g}")
    with mpmath.workdps(_ORACLE_DPS):
        zm = mpmath.mpc(z.real, z.imag)
        s = -1j * zm  # erf argument
        s2 = s * s
        term = s
        total = mpmath.mpc(0)
        eps = mpmath.mpf(10) ** (-_ORACLE_DPS + 5)
        k = 0
        while True:
            contrib = term / (2 * k + 1)
            total += contrib
            if k > 10 and abs(contrib) < eps * (abs(total) + 1):
                break
            k += 1
            term = -term * s2 / k
        erf_s = 2 / mpmath.sqrt(mpmath.pi) * total
        w = mpmath.exp(-zm * zm) * (1 - erf_s)
        return complex(w)


# ------------------------------------------------------ free-propagator box

@dataclass(frozen=True)
class QuadratureSpec:
    panels: int = 64
    tolerance: float = 1e-10
    max_panels: int = 2_000_000

    def __post_init__(self):
        if self.panels < 64:
            raise ValueError("need at least 64 initial panels")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _panel_sums(lo, hi, integrand, order):
    nodes, weights = _gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    return half * (integrand(pts) @ weights)


def propagator_quadrature(spec, x: float, t: float,
                          q: QuadratureSpec | None = None) -> complex:
    """Free evolution of the centred box state at one point, by quadrature.

    Integrates ``K(x - x', t) / sqrt(a)`` over the box, where
    ``K(s, t) = sqrt(m / (2 pi i hbar t)) exp(i m s^2 / (2 hbar t))``.
    Panels start no wider than a quarter of the local phase period and are
    bisected until 8- and 16-point Gauss-Legendre sums agree.
    """
    q = q or QuadratureSpec()
    if not t > 0:
        raise ValueError("propagator quadrature needs t > 0")
    a = float(spec.a)
    hbar, m = spec.constants.hbar, spec.constants.mass
    beta = m / (2.0 * hbar * t)
    prefactor = cmath.sqrt(m / (2j * math.pi * hbar * t)) / math.sqrt(a)

    def integrand(xp):
        s = x - xp
        return np.exp(1j * beta * s * s)

    # local angular frequency of the phase is 2*beta*|x - x'|
    lo_edge, hi_edge = -0.5 * a, 0.5 * a
    max_freq = 2.0 * beta * max(abs(x - lo_edge), abs(x - hi_edge))
    quarter_period = 0.25 * 2.0 * math.pi / max(max_freq, 1e-300)
    n0 = max(q.panels, int(math.ceil(a / quarter_period)))
    if n0 > q.max_panels:
        raise OracleFailure(f"{n0} initial panels exceed the budget of {q.max_panels}")
    edges = np.linspace(lo_edge, hi_edge, n0 + 1)
    lo, hi = edges[:-1], edges[1:]

    # phase roundoff: eps * (beta s^2) per node, which no refinement removes
    phase_max = beta * max(abs(x - lo_edge), abs(x - hi_edge)) ** 2
    noise_per_width = 32.0 * np.finfo(float).eps * (1.0 + phase_max)

    total = 0.0 + 0.0j
    trunc_err = 0.0
    noise_sq = 0.0
    used = n0
    while lo.size:
        coarse = _panel_sums(lo, hi, integrand, 8)
        fine = _panel_sums(lo, hi, integrand, 16)
        diff = np.abs(fine - coarse)
        width = hi - lo
        converged = diff <= q.tolerance * width / a / abs(prefactor)
        at_noise = ~converged & (diff <= noise_per_width * width)
        ok = converged | at_noise
        total += fine[ok].sum()
        trunc_err += diff[converged].sum()
        noise_sq += np.sum(diff[at_noise] ** 2)
        if ok.all():
            break
        mid = 0.5 * (lo[~ok] + hi[~ok])
        lo, hi = np.concatenate((lo[~ok], mid)), np.concatenate((mid, hi[~ok]))
        used += lo.size // 2
        if used > q.max_panels:
            raise OracleFailure("propagator quadrature did not converge within the panel budget")
    # roundoff contributions are uncorrelated between panels
    err = (trunc_err + math.sqrt(noise_sq)) * abs(prefactor)
    if err > q.tolerance:
        raise OracleFailure(f"error estimate {err:.3g} exceeds tolerance {q.tolerance:.3g}")
    return complex(prefactor * total)


# ------------------------------------------------------------- derivatives

def fornberg_weights(x0: float, nodes: np.ndarray, m: int = 1) -> np.ndarray:
    """Weights of the ``m``-th derivative at ``x0`` from values at ``nodes``."""
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    c = np.zeros((n, m + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = nodes[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def finite_difference_derivative(grid: Grid1D, field: np.ndarray, order: int = 4) -> np.ndarray:
    """Reference first derivative with truncation error ``O(dx**order)``.

    Uses centred stencils of ``order + 1`` points. Periodic grids wrap;
    Dirichlet grids shift the stencil inward near the ends so every point
    keeps the stated order.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    f = np.asarray(field)
    n = grid.n
    x = grid.x
    dx = grid.dx
    half = order // 2
    out = np.zeros(n, dtype=np.result_type(f, float))
    for i in range(n):
        if grid.periodic:
            idx = [(i + s) % n for s in range(-half, half + 1)]
            pts = dx * np.arange(-half, half + 1)
            wts = fornberg_weights(0.0, pts)
        else:
            start = min(max(i - half, 0), n - order - 1)
            idx = list(range(start, start + order + 1))
            wts = fornberg_weights(x[i], x[idx])
        acc = 0.0
        for w, j in zip(wts, idx):
            acc = acc + w * f[j]
        out[i] = acc
    return out
