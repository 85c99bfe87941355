"""Quantum hydrodynamics of 1-D wave packets: flux, diffusion flux and energy split.

Closed-form packets (spreading Gaussian, NLS soliton, freely evolving box),
numerical propagation, special functions and independent oracles.
"""

from .core import Boundary, Grid1D, PhysConstants, WaveField, make_grid, norm, probability_in_interval
from .hydro import EnergySplit, HydroFields, hydro_fields, kinetic_energy_split
from .packets import BoxSpec, GaussianSpec, SolitonSpec

__all__ = [
    "Boundary",
    "BoxSpec",
    "EnergySplit",
    "GaussianSpec",
    "Grid1D",
    "HydroFields",
    "PhysConstants",
    "SolitonSpec",
    "WaveField",
    "hydro_fields",
    "kinetic_energy_split",
    "make_grid",
    "norm",
    "probability_in_interval",
]

__version__ = "0.1.0"
