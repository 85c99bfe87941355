"""Command-line scenario runner.

    qflux run <scenario> [--config FILE] [--grid-n N] [--x-min V] [--x-max V]
                         [--dt V] [--t-final V] [--hbar V] [--mass V]
                         [--out PATH] [--format csv|json]
    qflux acceptance [--only NAME] [--config FILE]

``--format csv`` writes the per-point field table (to ``--out`` or stdout) and,
when ``--out`` is given, the summary next to it as ``<out>.summary.json``.
``--format json`` writes only the summary. Exit codes: 0 success, 2 config
error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import acceptance as acc
from .analysis import box_norm, gaussian_diffusion_at, gaussian_grid_through
from .core import PhysConstants, WaveField, make_grid, norm
from .hydro import (NormalizationError, edge_flux_divergence, hydro_fields, kinetic_energy_split,
                    osmotic_energy)
from .oracles import propagator_quadrature
from .packets import (BoxSpec, GaussianSpec, SolitonSpec, box_amplitude, box_evolved,
                      box_initial, gaussian_state, soliton_state)
from .propagator import PropagatorConfig, propagate, shape_error

SCHEMA_VERSION = 1
FIELD_COLUMNS = ("x", "rho", "flux_j", "diff_d", "osmotic_u", "phase_s")
EDGE_COLUMNS = ("dx", "max_abs_d")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


class ConfigError(ValueError):
    pass


def fmt(v) -> str:
    return format(float(v), ".17g")


# ------------------------------------------------------------------ config

# key -> parser; every scenario accepts a subset
_PARSERS: dict[str, Callable[[str], object]] = {
    "grid_n": int,
    "x_min": float,
    "x_max": float,
    "dt": float,
    "t_final": float,
    "hbar": float,
    "mass": float,
    "a": float,
    "k0": float,
    "x0": float,
    "sigma0": float,
    "u0": float,
    "level": int,
}

# None means "derived from the other parameters"
_DEFAULTS: dict[str, dict[str, object]] = {
    "GaussianFields": dict(grid_n=2048, x_min=None, x_max=None, t_final=None, a=1.0, k0=2.0, x0=0.0),
    "GaussianAsymptotic": dict(grid_n=2048, x_min=None, x_max=None, t_final=None, a=1.0, k0=0.0),
    "SolitonNLS": dict(grid_n=4096, x_min=-100.0, x_max=100.0, dt=1e-3, t_final=10.0,
                       sigma0=1.0, u0=1.0),
    "BoxEvolution": dict(grid_n=4001, x_min=-10.0, x_max=10.0, t_final=1e-2, a=1.0),
    "BoxEdgeFlux": dict(grid_n=4096, x_min=-1.0, x_max=1.0, a=1.0),
    "StationaryEnergy": dict(grid_n=4096, x_min=0.0, x_max=1.0, level=1),
}
for _d in _DEFAULTS.values():
    _d.setdefault("hbar", 1.0)
    _d.setdefault("mass", 1.0)
SCENARIOS = tuple(_DEFAULTS)


def read_config_file(path: str | Path) -> dict[str, tuple[str, int]]:
    """Parse ``key = value`` lines; ``#`` starts a comment. Returns key -> (raw, line)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    out: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got '{line}'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if not key or not raw:
            raise ConfigError(f"{path}:{lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}' (first on line {out[key][1]})")
        out[key] = (raw, lineno)
    return out


def resolve_params(scenario: str, file_values: dict[str, tuple[str, int]],
                   flag_values: dict[str, object], source: str = "config") -> dict[str, object]:
    """Defaults, then the config file, then flags; each value parsed and range-checked."""
    if scenario not in _DEFAULTS:
        raise ConfigError(f"unknown scenario '{scenario}'; choose from {', '.join(SCENARIOS)}")
    params = dict(_DEFAULTS[scenario])
    for key, (raw, lineno) in file_values.items():
        where = f"{source}:{lineno}"
        if key not in params:
            raise ConfigError(f"{where}: key '{key}' does not apply to {scenario}")
        try:
            params[key] = _PARSERS[key](raw)
        except ValueError:
            raise ConfigError(f"{where}: {key}: cannot parse '{raw}'") from None
    for key, value in flag_values.items():
        if value is None:
            continue
        if key not in params:
            raise ConfigError(f"--{key.replace('_', '-')} does not apply to {scenario}")
        params[key] = value
    for key, value in params.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"{key}: must be finite, got {value}")
    for key in ("grid_n", "hbar", "mass", "a", "sigma0", "level", "dt"):
        if key in params and params[key] is not None and not params[key] > 0:
            raise ConfigError(f"{key}: must be positive, got {params[key]}")
    if "t_final" in params and params["t_final"] is not None and params["t_final"] < 0:
        raise ConfigError(f"t_final: must be >= 0, got {params['t_final']}")
    if scenario == "BoxEvolution" and not params["t_final"] > 0:
        raise ConfigError("t_final: box evolution needs t_final > 0")
    return params


# ------------------------------------------------------------------ results

@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)  # NaN fails


@dataclass
class ScenarioResult:
    scenario: str
    params: dict
    columns: tuple[str, ...]
    table: list[np.ndarray]
    norm: float
    e_flow: float | None = None
    e_diff: float | None = None
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def _energies(psi: WaveField) -> tuple[float | None, float | None]:
    try:
        split = kinetic_energy_split(psi)
    except NormalizationError:
        return None, None
    return split.e_flow, split.e_diff


def _field_table(psi: WaveField) -> list[np.ndarray]:
    h = hydro_fields(psi)
    return [psi.grid.x, h.rho, h.flux_j, h.diff_d, h.osmotic_u, h.phase_s]


def _grid_bounds(p: dict, lo: float, hi: float) -> tuple[float, float]:
    return (lo if p["x_min"] is None else p["x_min"], hi if p["x_max"] is None else p["x_max"])


# ----------------------------------------------------------------- scenarios

def _gaussian_fields(p: dict, c: PhysConstants) -> ScenarioResult:
    spec = GaussianSpec(a=p["a"], k0=p["k0"], x0=p["x0"], constants=c)
    T = spec.spreading_time
    t = T if p["t_final"] is None else p["t_final"]
    p["t_final"] = t
    half = 6.0 * spec.width(t)
    lo, hi = _grid_bounds(p, spec.center(t) - half, spec.center(t) + half)
    p["x_min"], p["x_max"] = lo, hi
    psi = gaussian_state(spec, make_grid(lo, hi, p["grid_n"], "periodic"), t)
    table = _field_table(psi)
    rho, j, d = table[1], table[2], table[3]
    vscale = max(abs(spec.u0), c.hbar / (c.mass * spec.a))
    resid = float(np.max(np.abs(j - rho * spec.u0 - (t / T) * d)) / (rho.max() * vscale))
    e_flow, e_diff = _energies(psi)
    total = norm(psi)
    checks = [Check("norm_deviation", abs(total - 1.0), 1e-6),
              Check("flux_identity_residual", resid, 1e-8)]
    if e_flow is not None:
        exact = c.hbar ** 2 * (spec.k0 ** 2 + 1.0 / spec.a ** 2) / (2.0 * c.mass)
        checks.append(Check("kinetic_energy_rel_error", abs((e_flow + e_diff) / exact - 1.0), 1e-6))
    return ScenarioResult("GaussianFields", p, FIELD_COLUMNS, table, total, e_flow, e_diff, checks)


def _gaussian_asymptotic(p: dict, c: PhysConstants) -> ScenarioResult:
    spec = GaussianSpec(a=p["a"], k0=p["k0"], constants=c)
    T = spec.spreading_time
    t = 100.0 * T if p["t_final"] is None else p["t_final"]
    if not t > 0:
        raise ConfigError("t_final: the decay ratio needs t_final > 0")
    p["t_final"] = t
    x = spec.center(0.0) + 0.5 * spec.a
    if p["x_min"] is None and p["x_max"] is None:
        grid = gaussian_grid_through(spec, t, x, p["grid_n"])
    else:
        lo, hi = _grid_bounds(p, spec.center(t) - 6.0 * spec.width(t), spec.center(t) + 6.0 * spec.width(t))
        grid = make_grid(lo, hi, p["grid_n"], "periodic")
    p["x_min"], p["x_max"] = grid.x_min, grid.x_max
    psi = gaussian_state(spec, grid, t)
    ratio = gaussian_diffusion_at(spec, x, 2.0 * t, p["grid_n"]) / gaussian_diffusion_at(spec, x, t, p["grid_n"])
    exact = float(spec.diffusion_flux(x, 2.0 * t) / spec.diffusion_flux(x, t))
    total = norm(psi)
    checks = [Check("norm_deviation", abs(total - 1.0), 1e-6),
              Check("decay_ratio_vs_closed_form", abs(ratio / exact - 1.0), 1e-6)]
    if t >= 100.0 * T:
        checks.append(Check("decay_ratio_minus_one_eighth", abs(ratio - 0.125), 0.0013))
    e_flow, e_diff = _energies(psi)
    return ScenarioResult("GaussianAsymptotic", p, FIELD_COLUMNS, _field_table(psi), total,
                          e_flow, e_diff, checks)


def _soliton_nls(p: dict, c: PhysConstants) -> ScenarioResult:
    spec = SolitonSpec(sigma0=p["sigma0"], u0=p["u0"], constants=c)
    grid = make_grid(p["x_min"], p["x_max"], p["grid_n"], "periodic")
    psi0 = soliton_state(spec, grid, 0.0)
    t_final = p["t_final"]
    if not t_final > 0:
        raise ConfigError("t_final: propagation needs t_final > 0")
    cfg = PropagatorConfig(p["dt"], t_final, nonlinearity_mu=spec.coupling, snapshot_stride=10 ** 9)
    traj = propagate(psi0, cfg)
    series = shape_error(traj, spec.density)
    final = traj.final
    total = norm(final)
    e_flow, e_diff = _energies(final)
    checks = [Check("norm_drift", abs(total - norm(psi0)), 1e-6),
              Check("shape_l2_error", float(series.l2_error[-1]), 1e-3),
              Check("centroid_error", abs(float(series.mean_x[-1]) - spec.u0 * t_final), 1e-3)]
    if e_flow is not None:
        # exact split: flow M u0^2 / 2, diffusion hbar^2 / (6 M sigma0^2)
        flow_exact = 0.5 * c.mass * spec.u0 ** 2
        diff_exact = c.hbar ** 2 / (6.0 * c.mass * spec.sigma0 ** 2)
        checks.append(Check("e_flow_abs_error", abs(e_flow - flow_exact), 1e-5 * max(flow_exact, diff_exact)))
        checks.append(Check("e_diff_rel_error", abs(e_diff / diff_exact - 1.0), 1e-5))
    return ScenarioResult("SolitonNLS", p, FIELD_COLUMNS, _field_table(final), total,
                          e_flow, e_diff, checks)


def _box_evolution(p: dict, c: PhysConstants) -> ScenarioResult:
    spec = BoxSpec(a=p["a"], constants=c)
    t = p["t_final"]
    grid = make_grid(p["x_min"], p["x_max"], p["grid_n"], "dirichlet")
    psi = box_evolved(spec, grid, t)
    total = box_norm(spec, t).total
    probe = np.array([0.0, 0.25, 0.5, 2.0, 5.0]) * spec.a
    oracle = np.array([propagator_quadrature(spec, x, t) for x in probe])
    err = float(np.max(np.abs(box_amplitude(spec, probe, t) - oracle)))
    checks = [Check("norm_deviation", abs(total - 1.0), 1e-6),
              Check("oracle_max_abs_error", err, 1e-8)]
    # the kinetic energy of a sharp box is infinite; no finite split to report
    return ScenarioResult("BoxEvolution", p, FIELD_COLUMNS, _field_table(psi), total, None, None, checks)


def _box_edge_flux(p: dict, c: PhysConstants) -> ScenarioResult:
    spec = BoxSpec(a=p["a"], constants=c)
    n = p["grid_n"]
    if n < 64 or n % 8:
        raise ConfigError(f"grid_n: need a multiple of 8 that is >= 64 for the refinement ladder, got {n}")
    grids = [make_grid(p["x_min"], p["x_max"], n // k, "periodic") for k in (8, 4, 2, 1)]
    res = edge_flux_divergence(spec, grids)
    total = norm(box_initial(spec, grids[-1]))
    checks = [Check("slope_minus_one", abs(res.slope - 1.0), 0.1),
              Check("inward_edges", 0.0 if res.outward else 1.0, 0.0)]
    return ScenarioResult("BoxEdgeFlux", p, EDGE_COLUMNS, [res.dx, res.max_abs_d], total,
                          None, None, checks)


def _stationary_energy(p: dict, c: PhysConstants) -> ScenarioResult:
    lo, hi, k = p["x_min"], p["x_max"], p["level"]
    L = hi - lo
    grid = make_grid(lo, hi, p["grid_n"], "dirichlet")
    psi = WaveField(grid, math.sqrt(2.0 / L) * np.sin(k * math.pi * (grid.x - lo) / L), c)
    split = kinetic_energy_split(psi)
    exact = c.hbar ** 2 * math.pi ** 2 * k ** 2 / (2.0 * c.mass * L ** 2)
    total = norm(psi)
    checks = [Check("norm_deviation", abs(total - 1.0), 1e-6),
              Check("flow_fraction", split.e_flow / split.e_total, 1e-10),
              Check("e_diff_rel_error", abs(split.e_diff / exact - 1.0), 1e-6),
              Check("osmotic_identity", abs(osmotic_energy(psi) / split.e_diff - 1.0), 1e-10)]
    return ScenarioResult("StationaryEnergy", p, FIELD_COLUMNS, _field_table(psi), total,
                          split.e_flow, split.e_diff, checks)


_RUNNERS = {
    "GaussianFields": _gaussian_fields,
    "GaussianAsymptotic": _gaussian_asymptotic,
    "SolitonNLS": _soliton_nls,
    "BoxEvolution": _box_evolution,
    "BoxEdgeFlux": _box_edge_flux,
    "StationaryEnergy": _stationary_energy,
}


def run_scenario(scenario: str, params: dict) -> ScenarioResult:
    p = dict(params)
    c = PhysConstants(p["hbar"], p["mass"])
    return _RUNNERS[scenario](p, c)


# ------------------------------------------------------------------ output

def _json_value(v, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if v is None or isinstance(v, bool):
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json_value(x, indent + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        return "[\n" + ",\n".join(inner + _json_value(x, indent + 1) for x in v) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def summary_json(res: ScenarioResult) -> str:
    """Summary with every float at 17 significant digits; key order is fixed."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scenario": res.scenario,
        "params": {k: res.params[k] for k in sorted(res.params)},
        "norm": res.norm,
        "e_flow": res.e_flow,
        "e_diff": res.e_diff,
        "checks": [{"name": ch.name, "measured": ch.measured, "tolerance": ch.tolerance,
                    "pass": ch.passed} for ch in res.checks],
    }
    return _json_value(doc, 0) + "\n"


def table_csv(res: ScenarioResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(res.columns)
    for row in zip(*res.table):
        w.writerow("" if not math.isfinite(v) else fmt(v) for v in row)
    return buf.getvalue()


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# ------------------------------------------------------------------ entry

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qflux", description="Quantum hydrodynamics scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and emit its field table or summary")
    run.add_argument("scenario", help=", ".join(SCENARIOS))
    run.add_argument("--config", help="flat key = value file; flags override it")
    run.add_argument("--grid-n", type=int)
    run.add_argument("--x-min", type=float)
    run.add_argument("--x-max", type=float)
    run.add_argument("--dt", type=float)
    run.add_argument("--t-final", type=float)
    run.add_argument("--hbar", type=float)
    run.add_argument("--mass", type=float)
    run.add_argument("--out", type=Path)
    run.add_argument("--format", choices=("csv", "json"), default="csv")

    ac = sub.add_parser("acceptance", help="run the acceptance suite")
    ac.add_argument("--only", help="run a single criterion by name")
    ac.add_argument("--config", help="key = value file of tolerance overrides")
    return parser


def _cmd_run(args) -> int:
    try:
        file_values = read_config_file(args.config) if args.config else {}
        flags = {k: getattr(args, k) for k in ("grid_n", "x_min", "x_max", "dt", "t_final", "hbar", "mass")}
        params = resolve_params(args.scenario, file_values, flags, source=args.config or "config")
        if args.out is not None and not args.out.parent.is_dir():
            raise ConfigError(f"--out: directory {args.out.parent} does not exist")
        res = run_scenario(args.scenario, params)
    except (ConfigError, ValueError, OverflowError) as exc:
        print(f"qflux: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.format == "json":
        _write(summary_json(res), args.out)
    else:
        _write(table_csv(res), args.out)
        if args.out is not None:
            _write(summary_json(res), args.out.with_name(args.out.name + ".summary.json"))
    for ch in res.checks:
        if not ch.passed:
            print(f"qflux: invariant violated: {ch.name} = {ch.measured:.6g} > {ch.tolerance:.6g}",
                  file=sys.stderr)
    return EXIT_OK if res.ok else EXIT_INVARIANT


def _cmd_acceptance(args) -> int:
    try:
        tolerances = None
        if args.config:
            raw = {k: v for k, (v, _) in read_config_file(args.config).items()}
            tolerances = acc.validate_tolerances(raw)
        if args.only is not None and args.only not in acc.CRITERIA:
            raise ConfigError(f"unknown criterion '{args.only}'; choose from {', '.join(acc.CRITERIA)}")
    except ValueError as exc:
        print(f"qflux: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    passed = 0
    results = []
    for name in ([args.only] if args.only else list(acc.CRITERIA)):
        res = acc.run_one(name, tolerances)
        print(res.line(), flush=True)
        results.append(res)
        passed += res.passed
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_INVARIANT


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_acceptance(args)


if __name__ == "__main__":
    sys.exit(main())
