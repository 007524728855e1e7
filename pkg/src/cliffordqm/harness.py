"""Scenario-driven runs: configure, evolve, check, export.

Configs are YAML documents with a schema_version field; see the bundled
files under cliffordqm/scenarios for the dialect.  A run produces a fields
CSV, a trajectories CSV, and a report JSON whose pass/fail flags drive the
CLI exit code.
"""

from __future__ import annotations

import importlib.resources
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import dynamics as dy
from . import grids as gd
from . import observables as ob
from . import oracle as orc

SCHEMA_VERSION = 1
ENV_OUT_ROOT = "CLIFFORDQM_OUT_ROOT"


class ConfigError(ValueError):
    pass


class RunAborted(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# config parsing

_STATE_KINDS = ("plane-wave", "gaussian", "pauli-superposition", "euler-texture")


def _require(cfg: dict, key: str, ctx: str):
    if key not in cfg:
        raise ConfigError(f"missing key {key!r} in {ctx}")
    return cfg[key]


@dataclass
class Scenario:
    name: str
    description: str
    particle: str
    grid: gd.Grid
    descriptor: object
    potential: np.ndarray  # None for free evolution
    potential_spec: dict
    evolution: dy.EvolutionConfig
    seeds: list
    trajectory_stride: int
    tol_C: float
    support_rel: float
    checks: list


def parse_config(text: str, source: str = "<config>") -> Scenario:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f" at line {mark.line + 1}" if mark else ""
        raise ConfigError(f"{source}: YAML parse error{line}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: config must be a mapping")
    version = _require(raw, "schema_version", source)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{source}: unsupported schema_version {version}")

    name = _require(raw, "name", source)
    particle = _require(raw, "particle", source)
    if particle not in ("schrodinger", "pauli"):
        raise ConfigError(f"{source}: particle must be schrodinger or pauli")

    gspec = _require(raw, "grid", source)
    grid = gd.Grid.line(float(_require(gspec, "lo", "grid")),
                        float(_require(gspec, "hi", "grid")),
                        int(_require(gspec, "n", "grid")),
                        gspec.get("boundary", "clamped"))

    sspec = _require(raw, "initial_state", source)
    descriptor = _parse_state(sspec, particle, source)

    vspec = raw.get("potential", {"kind": "none"})
    potential = _parse_potential(vspec, grid, source)

    espec = _require(raw, "evolution", source)
    evolution = dy.EvolutionConfig(
        m=float(_require(espec, "m", "evolution")),
        dt=float(_require(espec, "dt", "evolution")),
        steps=int(_require(espec, "steps", "evolution")),
        V=potential,
        scheme=espec.get("scheme", "crank-nicolson"),
    )

    tspec = raw.get("trajectories", {})
    seeds = [float(s) for s in tspec.get("seeds", [])]
    stride = int(tspec.get("stride", 10))

    tol = raw.get("tolerances", {})
    tol_C = float(tol.get("C", 1.0))
    support_rel = float(tol.get("support_rel", 1e-8))

    checks = raw.get("checks", _default_checks(particle))
    for c in checks:
        if c not in _ALL_CHECKS:
            raise ConfigError(f"{source}: unknown check {c!r}")

    scenario = Scenario(name, raw.get("description", ""), particle, grid,
                        descriptor, potential, dict(vspec), evolution, seeds,
                        stride, tol_C, support_rel, list(checks))
    _validate(scenario, source)
    return scenario


def _parse_state(spec: dict, particle: str, source: str):
    kind = _require(spec, "kind", "initial_state")
    if kind not in _STATE_KINDS:
        raise ConfigError(f"{source}: unknown initial_state kind {kind!r}")
    if kind == "plane-wave":
        return gd.PlaneWave(k=(float(spec.get("k", 1.0)), 0.0, 0.0),
                            m=float(spec.get("m", 1.0)))
    if kind == "gaussian":
        return gd.GaussianPacket(sigma=float(spec.get("sigma", 1.0)),
                                 x0=(float(spec.get("x0", 0.0)), 0.0, 0.0),
                                 k=(float(spec.get("k", 0.0)), 0.0, 0.0),
                                 m=float(spec.get("m", 1.0)))
    if kind == "pauli-superposition":
        if particle != "pauli":
            raise ConfigError(f"{source}: pauli-superposition needs particle: pauli")
        w = spec.get("weights", (1.0, 1.0))
        return gd.PauliSuperposition(k1=(float(spec.get("k1", 1.0)), 0.0, 0.0),
                                     k2=(float(spec.get("k2", -1.0)), 0.0, 0.0),
                                     weights=(float(w[0]), float(w[1])),
                                     m=float(spec.get("m", 1.0)))
    if particle != "pauli":
        raise ConfigError(f"{source}: euler-texture needs particle: pauli")
    return gd.EulerTexture(
        theta0=float(spec.get("theta", np.pi / 2)),
        theta_k=(float(spec.get("theta_k", 0.0)), 0.0, 0.0),
        phi0=float(spec.get("phi", 0.0)),
        phi_k=(float(spec.get("phi_k", 0.0)), 0.0, 0.0),
        chi_k=(float(spec.get("chi_k", 0.0)), 0.0, 0.0),
        sigma=float(spec["sigma"]) if spec.get("sigma") is not None else None,
        x0=(float(spec.get("x0", 0.0)), 0.0, 0.0),
    )


def _parse_potential(spec: dict, grid: gd.Grid, source: str):
    kind = spec.get("kind", "none")
    if kind == "none":
        return None
    if kind == "harmonic":
        omega = float(spec.get("omega", 1.0))
        m = float(spec.get("m", 1.0))
        x = grid.coords(0)
        return 0.5 * m * omega ** 2 * x ** 2
    if kind == "table":
        values = spec.get("values")
        if values is None or len(values) != grid.shape[0]:
            raise ConfigError(f"{source}: potential table must list one value per grid point")
        return np.asarray(values, dtype=float)
    raise ConfigError(f"{source}: unknown potential kind {kind!r}")


def _validate(sc: Scenario, source: str):
    if isinstance(sc.descriptor, gd.GaussianPacket):
        margin = 6.0 * sc.descriptor.sigma
        lo, hi = sc.grid.axes[0].lo, sc.grid.axes[0].hi
        x0 = sc.descriptor.x0[0]
        if x0 - margin < lo or x0 + margin > hi:
            raise ConfigError(f"{source}: packet needs >=6 sigma of margin to each edge")
    if sc.particle == "pauli" and isinstance(sc.descriptor, (gd.PlaneWave, gd.GaussianPacket)):
        raise ConfigError(f"{source}: scalar initial state with particle: pauli")
    for s in sc.seeds:
        if not sc.grid.axes[0].lo <= s <= sc.grid.axes[0].hi:
            raise ConfigError(f"{source}: trajectory seed {s} outside grid")


def _default_checks(particle: str) -> list:
    base = ["qhj", "continuity", "triple_agreement"]
    if particle == "pauli":
        base += ["spin_transport", "q_split", "current_decomposition"]
    return base


_ALL_CHECKS = ("qhj", "continuity", "triple_agreement", "spin_transport",
               "q_split", "current_decomposition")


# ---------------------------------------------------------------------------
# running

NORM_DRIFT_ABORT = 1e-4


def _initial_field(sc: Scenario) -> np.ndarray:
    psi0 = gd.sample(sc.descriptor, sc.grid)
    n = dy.norm(psi0, sc.grid)
    return psi0 / n


def run_scenario(sc: Scenario, series: gd.SnapshotSeries = None) -> dict:
    """Evolve (unless a series is supplied), check, assemble the report."""
    if series is None:
        psi0 = _initial_field(sc)
        series = dy.evolve(psi0, sc.grid, sc.evolution)
    drift = abs(dy.norm(series.frames[-1], sc.grid)
                - dy.norm(series.frames[0], sc.grid))
    if drift > NORM_DRIFT_ABORT:
        raise RunAborted(f"norm drift {drift:g} exceeds {NORM_DRIFT_ABORT:g}")

    k = len(series) // 2
    m = sc.evolution.m
    state = ob.state_at(series, k)
    obs = ob.compute_observables(series, k, m, sc.potential)
    support = state.mask & ob.support_mask(state.rho, sc.support_rel)

    h = sc.grid.spacing[0]
    dt = sc.evolution.dt
    tol_time = 5.0 * sc.tol_C * (h * h + dt * dt)
    tol_space = 5.0 * sc.tol_C * h * h

    report = {
        "schema_version": SCHEMA_VERSION,
        "name": sc.name,
        "particle": sc.particle,
        "grid": {"h": h, "dt": dt, "n": sc.grid.shape[0],
                 "boundary": sc.grid.boundary},
        "norm_drift": drift,
        "frame": k,
        "residuals": {},
        "passed": True,
    }

    def record(name, res_field, tol, mask=support):
        stats = ob.residual_stats(res_field, mask)
        stats["grid"] = {"h": h, "dt": dt}
        stats["tolerance"] = tol
        stats["passed"] = stats["max_abs"] <= tol
        report["residuals"][name] = stats
        if not stats["passed"]:
            report["passed"] = False

    for check in sc.checks:
        if check == "qhj":
            record("qhj", obs.residuals["qhj"], tol_time)
        elif check == "continuity":
            record("continuity", obs.residuals["continuity"], tol_time)
        elif check == "spin_transport":
            res = obs.residuals["spin_transport"]
            record("spin_transport", res, tol_time)
        elif check == "triple_agreement":
            record("p_alg_vs_weighted",
                   _vec_mag(obs.P - ob.bohm_momentum_weighted(state)), tol_space)
            p_oracle = _per_rho(orc.momentum_density(state.psi, sc.grid), state)
            record("p_alg_vs_oracle", _vec_mag(obs.P - p_oracle), tol_space)
            e_weighted = ob.bohm_energy_weighted(series, k)
            record("e_alg_vs_weighted", np.abs(obs.E - e_weighted), tol_time)
            e_oracle = ob_energy_oracle(series, k, state)
            record("e_alg_vs_oracle", np.abs(obs.E - e_oracle), tol_time)
        elif check == "q_split":
            record("q_split", np.abs(obs.Q - obs.Q1 - obs.Q2), tol_space)
        elif check == "current_decomposition":
            total = orc.messiah_current(state.psi, sc.grid, m)
            record("current_decomposition",
                   _vec_mag(total - (obs.J_conv + obs.J_rot)), tol_space)

    return report


def _vec_mag(v: np.ndarray) -> np.ndarray:
    return np.sqrt((v ** 2).sum(axis=-1))


def _per_rho(density: np.ndarray, state: ob.SpinorField) -> np.ndarray:
    safe = np.where(state.mask, state.rho, 1.0)
    out = density / safe[..., None]
    out[~state.mask] = 0.0
    return out


def ob_energy_oracle(series, k, state) -> np.ndarray:
    dens = orc.energy_density((series.frames[k - 1], series.frames[k],
                               series.frames[k + 1]), series.dt)
    safe = np.where(state.mask, state.rho, 1.0)
    out = dens / safe
    out[~state.mask] = 0.0
    return out


def run_trajectories(sc: Scenario, series: gd.SnapshotSeries) -> dy.TrajectorySet:
    m = sc.evolution.m
    stride = sc.trajectory_stride
    if len(series) <= stride:
        stride = max(1, len(series) - 1)
    frames, times, masks = [], [], []
    for f in range(0, len(series), stride):
        state = ob.SpinorField(sc.grid, series.frames[f])
        frames.append(ob.pauli_current(state, m).v)
        masks.append(state.mask)
        times.append(series.times[f])
    vser = gd.SnapshotSeries(np.asarray(times), frames, sc.grid)
    seeds = np.asarray(sc.seeds, dtype=float).reshape(-1, 1)
    return dy.integrate_trajectories(vser, seeds, masks)


def run_to_files(sc: Scenario, out_dir) -> dict:
    """Full pipeline: run, export fields/trajectories CSV and report JSON."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    psi0 = _initial_field(sc)
    series = dy.evolve(psi0, sc.grid, sc.evolution)
    report = run_scenario(sc, series)

    k = report["frame"]
    state = ob.state_at(series, k)
    obs = ob.compute_observables(series, k, sc.evolution.m, sc.potential)
    columns = {
        "rho": state.rho,
        "P": obs.P[..., : sc.grid.dim],
        "E": obs.E,
        "Q": obs.Q,
        "Q1": obs.Q1,
        "Q2": obs.Q2,
        "v": obs.v[..., : sc.grid.dim],
    }
    if obs.s is not None:
        columns["s"] = obs.s
    gd.export_csv(out / "fields.csv", sc.grid, columns)

    if sc.seeds:
        traj = run_trajectories(sc, series)
        traj.to_csv(out / "trajectories.csv")
        report["trajectories"] = {
            "n_seeds": len(sc.seeds),
            "n_truncated": int(traj.truncated.sum()),
            "ordering_preserved": dy.ordering_preserved(traj.paths),
        }
        if not report["trajectories"]["ordering_preserved"]:
            report["passed"] = False

    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


# ---------------------------------------------------------------------------
# convergence sweep

def sweep(sc: Scenario, levels: int) -> dict:
    """Refine h by 2 per level (dt by 4), report per-residual error slopes."""
    if levels < 3:
        raise ConfigError("sweep needs at least 3 refinement levels")
    rows = []
    base_n = sc.grid.shape[0]
    base_dt = sc.evolution.dt
    base_steps = sc.evolution.steps
    for lvl in range(levels):
        factor = 2 ** lvl
        grid = gd.Grid.line(sc.grid.axes[0].lo, sc.grid.axes[0].hi,
                            base_n * factor, sc.grid.boundary)
        dt = base_dt / factor ** 2
        steps = base_steps * factor ** 2
        if sc.potential_spec.get("kind", "none") == "table":
            raise ConfigError("table potentials cannot be refined for a sweep")
        pot = _parse_potential(sc.potential_spec, grid, sc.name)
        level_sc = Scenario(sc.name, sc.description, sc.particle, grid,
                            sc.descriptor, pot, sc.potential_spec,
                            dy.EvolutionConfig(sc.evolution.m, dt, steps, pot,
                                               sc.evolution.scheme),
                            [], sc.trajectory_stride, sc.tol_C,
                            sc.support_rel, sc.checks)
        rows.append(run_scenario(level_sc))

    slopes = {}
    for name in rows[0]["residuals"]:
        errs = [r["residuals"][name]["max_abs"] for r in rows]
        pair_slopes = []
        for a, b in zip(errs, errs[1:]):
            if b > 0:
                pair_slopes.append(float(np.log2(a / b)))
        slopes[name] = {
            "max_abs": errs,
            "log2_ratios": pair_slopes,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "name": sc.name,
        "levels": levels,
        "h": [r["grid"]["h"] for r in rows],
        "dt": [r["grid"]["dt"] for r in rows],
        "residual_slopes": slopes,
    }


# ---------------------------------------------------------------------------
# bundled scenarios

def bundled_dir():
    return importlib.resources.files("cliffordqm") / "scenarios"


def list_scenarios() -> list:
    """(name, description) pairs for the bundled scenario configs."""
    out = []
    root = bundled_dir()
    if not root.is_dir():
        return out
    for entry in sorted(root.iterdir()):
        if entry.name.endswith(".cfg"):
            try:
                raw = yaml.safe_load(entry.read_text())
                out.append((raw.get("name", entry.name), raw.get("description", "")))
            except yaml.YAMLError:
                out.append((entry.name, "<unparseable>"))
    return out


def load_bundled(name: str) -> Scenario:
    path = bundled_dir() / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError(f"no bundled scenario named {name!r}")
    return parse_config(path.read_text(), str(path))


def default_out_root() -> Path:
    return Path(os.environ.get(ENV_OUT_ROOT, "runs"))
