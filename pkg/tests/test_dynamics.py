"""Time evolution schemes and Bohm trajectory integration."""

import numpy as np
import pytest

from cliffordqm import dynamics as dy
from cliffordqm import grids as gd
from cliffordqm import observables as ob


def test_config_validation():
    with pytest.raises(ValueError):
        dy.EvolutionConfig(m=1.0, dt=-0.1, steps=10)
    with pytest.raises(ValueError):
        dy.EvolutionConfig(m=1.0, dt=0.1, steps=0)
    with pytest.raises(ValueError):
        dy.EvolutionConfig(m=1.0, dt=0.1, steps=10, scheme="leapfrog")


def test_scheme_boundary_pairing():
    cfg = dy.EvolutionConfig(m=1.0, dt=1e-3, steps=1)
    periodic = gd.Grid.line(0.0, 1.0, 16, "periodic")
    clamped = gd.Grid.line(0.0, 1.0, 16)
    psi = np.ones(16, dtype=complex)
    with pytest.raises(gd.GridError):
        dy.evolve(psi, periodic, cfg)  # crank-nicolson needs clamped
    cfg_ss = dy.EvolutionConfig(m=1.0, dt=1e-3, steps=1, scheme="split-step")
    with pytest.raises(gd.GridError):
        dy.evolve(psi, clamped, cfg_ss)


def test_crank_nicolson_unitarity():
    grid = gd.Grid.line(-10.0, 10.0, 256)
    psi0 = gd.sample(gd.GaussianPacket(sigma=1.0, k=(2.0, 0, 0)), grid)
    psi0 /= dy.norm(psi0, grid)
    x = grid.coords(0)
    cfg = dy.EvolutionConfig(m=1.0, dt=2e-3, steps=200, V=0.5 * x ** 2)
    series = dy.evolve_schrodinger(psi0, grid, cfg)
    norms = [dy.norm(f, grid) for f in series.frames]
    assert np.max(np.abs(np.array(norms) - 1.0)) < 1e-12
    assert len(series) == 201


def test_harmonic_ground_state_phase():
    """1000 steps leave the ground state invariant up to exp(-i t/2)."""
    grid = gd.Grid.line(-8.0, 8.0, 512)
    psi0 = gd.sample(gd.HarmonicGroundState(), grid)
    psi0 /= dy.norm(psi0, grid)
    x = grid.coords(0)
    cfg = dy.EvolutionConfig(m=1.0, dt=5e-4, steps=1000, V=0.5 * x ** 2)
    series = dy.evolve_schrodinger(psi0, grid, cfg)
    t = series.times[-1]
    expect = psi0 * np.exp(-0.5j * t)
    # density stays put to high accuracy; phase picks up the O(h^2, dt^2) bias
    drho = np.abs(np.abs(series.frames[-1]) ** 2 - np.abs(psi0) ** 2)
    assert np.max(drho) < 1e-4
    overlap = np.vdot(expect, series.frames[-1]) * grid.spacing[0]
    assert abs(abs(overlap) - 1.0) < 1e-8


def test_split_step_plane_wave_exact():
    grid = gd.Grid.line(0.0, 2.0 * np.pi, 64, "periodic")
    k, m = 3.0, 1.0
    psi0 = gd.sample(gd.PlaneWave(k=(k, 0, 0), m=m), grid)
    cfg = dy.EvolutionConfig(m=m, dt=5e-3, steps=100, scheme="split-step")
    series = dy.evolve(psi0, grid, cfg)
    exact = gd.sample(gd.PlaneWave(k=(k, 0, 0), m=m), grid, series.times[-1])
    # plane waves are eigenmodes of the FFT kinetic step: exact propagation
    assert np.max(np.abs(series.frames[-1] - exact)) < 1e-10


def test_free_gaussian_matches_closed_form():
    grid = gd.Grid.line(-16.0, 16.0, 512)
    psi0 = gd.sample(gd.GaussianPacket(sigma=1.0), grid)
    psi0 /= dy.norm(psi0, grid)
    cfg = dy.EvolutionConfig(m=1.0, dt=5e-4, steps=800)
    series = dy.evolve_schrodinger(psi0, grid, cfg)
    exact = gd.sample(gd.GaussianPacket(sigma=1.0), grid, series.times[-1])
    exact /= dy.norm(exact, grid)
    err = np.max(np.abs(np.abs(series.frames[-1]) ** 2 - np.abs(exact) ** 2))
    assert err < 5e-4


def test_pauli_evolution_keeps_spin_norm():
    grid = gd.Grid.line(-12.0, 12.0, 256)
    psi0 = gd.sample(gd.EulerTexture(theta0=1.0, theta_k=(0.2, 0, 0), sigma=1.5), grid)
    psi0 /= dy.norm(psi0, grid)
    cfg = dy.EvolutionConfig(m=1.0, dt=1e-3, steps=100)
    series = dy.evolve_pauli(psi0, grid, cfg)
    state = ob.SpinorField(grid, series.frames[-1])
    norms = np.linalg.norm(state.spin, axis=-1)
    assert np.max(np.abs(norms[state.mask] - 0.5)) < 1e-12


def test_normalization_guard():
    grid = gd.Grid.line(-8.0, 8.0, 64)
    psi0 = 2.0 * gd.sample(gd.GaussianPacket(), grid)
    cfg = dy.EvolutionConfig(m=1.0, dt=1e-3, steps=1)
    with pytest.raises(ValueError):
        dy.evolve_schrodinger(psi0, grid, cfg)


def test_accuracy_warning():
    grid = gd.Grid.line(-8.0, 8.0, 512)
    psi0 = gd.sample(gd.GaussianPacket(), grid)
    psi0 /= dy.norm(psi0, grid)
    cfg = dy.EvolutionConfig(m=1.0, dt=0.1, steps=1)
    with pytest.warns(UserWarning):
        dy.evolve_schrodinger(psi0, grid, cfg)


def test_trajectories_uniform_flow():
    grid = gd.Grid.line(0.0, 10.0, 51)
    v = np.ones(grid.shape + (1,))
    times = np.linspace(0.0, 2.0, 21)
    series = gd.SnapshotSeries(times, [v] * 21, grid)
    traj = dy.integrate_trajectories(series, [[1.0], [2.0], [3.0]])
    assert np.allclose(traj.paths[-1, :, 0], [3.0, 4.0, 5.0], atol=1e-12)
    assert not traj.truncated.any()


def test_trajectories_linear_velocity_exact_growth():
    """v(x) = x integrates to x0 exp(t) with 4th order accuracy."""
    grid = gd.Grid.line(0.1, 40.0, 400)
    x = grid.coords(0)
    v = x[:, None].copy()
    times = np.linspace(0.0, 1.0, 101)
    series = gd.SnapshotSeries(times, [v] * 101, grid)
    traj = dy.integrate_trajectories(series, [[1.0], [2.0]])
    expect = np.array([np.exp(1.0), 2.0 * np.exp(1.0)])
    assert np.max(np.abs(traj.paths[-1, :, 0] - expect)) < 1e-6


def test_trajectory_truncation_at_edge():
    grid = gd.Grid.line(0.0, 1.0, 11)
    v = np.ones(grid.shape + (1,))
    times = np.linspace(0.0, 2.0, 21)
    series = gd.SnapshotSeries(times, [v] * 21, grid)
    traj = dy.integrate_trajectories(series, [[0.5]])
    assert traj.truncated[0]
    # once clamped the path stays at the boundary
    assert traj.paths[-1, 0, 0] == pytest.approx(1.0)


def test_ordering_preserved_helper():
    good = np.zeros((3, 4, 1))
    good[:, :, 0] = [[0, 1, 2, 3], [0.1, 1.1, 2.1, 3.1], [0.2, 1.2, 2.2, 3.2]]
    assert dy.ordering_preserved(good)
    bad = good.copy()
    bad[2, 0, 0] = 5.0
    assert not dy.ordering_preserved(bad)


def test_trajectory_csv(tmp_path):
    grid = gd.Grid.line(0.0, 10.0, 11)
    v = np.ones(grid.shape + (1,))
    times = np.linspace(0.0, 1.0, 3)
    series = gd.SnapshotSeries(times, [v] * 3, grid)
    traj = dy.integrate_trajectories(series, [[1.0]])
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "seed_id,t,x,truncated_flag"
    assert len(lines) == 4
