"""Uniform grids, sampled fields, and second-order finite differences.

All stencils are second order: central in the interior, one-sided
second-order at clamped boundaries, wrap-around for periodic grids.
Derivative helpers work directly on ndarrays whose leading axes are the
grid axes; trailing axes (vector components, multivector coefficients)
ride along untouched.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

MIN_POINTS = 5


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < MIN_POINTS:
            raise GridError(f"need at least {MIN_POINTS} points per axis, got {self.n}")
        if not self.hi > self.lo:
            raise GridError("axis extent must be increasing")


@dataclass(frozen=True)
class Grid:
    """Uniform 1-3D grid; periodic axes omit the duplicate endpoint."""

    axes: tuple
    boundary: str = "clamped"  # 'clamped' | 'periodic'

    def __post_init__(self):
        if self.boundary not in ("clamped", "periodic"):
            raise GridError(f"unknown boundary {self.boundary!r}")
        if not 1 <= len(self.axes) <= 3:
            raise GridError("grid must be 1-3 dimensional")

    @staticmethod
    def line(lo: float, hi: float, n: int, boundary: str = "clamped") -> "Grid":
        return Grid((Axis(lo, hi, n),), boundary)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(ax.n for ax in self.axes)

    @property
    def spacing(self) -> tuple:
        if self.boundary == "periodic":
            return tuple((ax.hi - ax.lo) / ax.n for ax in self.axes)
        return tuple((ax.hi - ax.lo) / (ax.n - 1) for ax in self.axes)

    def coords(self, axis: int) -> np.ndarray:
        ax = self.axes[axis]
        h = self.spacing[axis]
        return ax.lo + h * np.arange(ax.n)

    def meshgrid(self) -> list:
        return list(np.meshgrid(*[self.coords(i) for i in range(self.dim)], indexing="ij"))

    @property
    def n_points(self) -> int:
        return int(np.prod(self.shape))


@dataclass(frozen=True)
class GridField:
    """A sampled field; values has the grid shape plus optional value axes."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape[: self.grid.dim] != self.grid.shape:
            raise GridError(
                f"values shape {self.values.shape} does not start with grid shape {self.grid.shape}"
            )


@dataclass
class SnapshotSeries:
    """Uniformly spaced time snapshots of a field."""

    times: np.ndarray
    frames: list  # ndarrays sharing one shape
    grid: Grid = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.frames):
            raise GridError("times and frames length mismatch")
        if len(self.times) >= 2:
            steps = np.diff(self.times)
            if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
                raise GridError("times must be strictly increasing with uniform step")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self):
        return len(self.frames)


# ---------------------------------------------------------------------------
# stencils

def _deriv1(values: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v, dtype=np.result_type(v, float))
    if periodic:
        out[:] = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2.0 * h)
    else:
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def _deriv2(values: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v, dtype=np.result_type(v, float))
    h2 = h * h
    if periodic:
        out[:] = (np.roll(v, -1, axis=0) - 2.0 * v + np.roll(v, 1, axis=0)) / h2
    else:
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h2
    return np.moveaxis(out, 0, axis)


def deriv(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """First derivative along one grid axis."""
    return _deriv1(values, grid.spacing[axis], axis, grid.boundary == "periodic")


def gradient(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Spatial gradient; returns shape grid.shape + value shape + (3,).

    Components along axes the grid does not have are zero.
    """
    out = np.zeros(values.shape + (3,), dtype=np.result_type(values, float))
    for ax in range(grid.dim):
        out[..., ax] = deriv(values, grid, ax)
    return out


def laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    out = np.zeros_like(values, dtype=np.result_type(values, float))
    for ax in range(grid.dim):
        out += _deriv2(values, grid.spacing[ax], ax, grid.boundary == "periodic")
    return out


def divergence(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Divergence of a 3-component vector field (trailing axis)."""
    out = np.zeros(v.shape[:-1], dtype=np.result_type(v, float))
    for ax in range(grid.dim):
        out += deriv(v[..., ax], grid, ax)
    return out


def curl(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Curl of a 3-component vector field; missing-axis derivatives are zero."""
    d = np.zeros(v.shape[:-1] + (3, 3), dtype=np.result_type(v, float))
    for comp in range(3):
        for ax in range(grid.dim):
            d[..., comp, ax] = deriv(v[..., comp], grid, ax)
    out = np.empty_like(v, dtype=np.result_type(v, float))
    out[..., 0] = d[..., 2, 1] - d[..., 1, 2]
    out[..., 1] = d[..., 0, 2] - d[..., 2, 0]
    out[..., 2] = d[..., 1, 0] - d[..., 0, 1]
    return out


def time_derivative(series: SnapshotSeries, k: int) -> np.ndarray:
    """Central time difference at frame k; boundary frames are rejected."""
    if not 1 <= k <= len(series) - 2:
        raise GridError(f"frame {k} has no central-stencil neighbours (len {len(series)})")
    return (series.frames[k + 1] - series.frames[k - 1]) / (2.0 * series.dt)


# ---------------------------------------------------------------------------
# node masking

NODE_EPS = 1e-12


def node_mask(rho: np.ndarray) -> np.ndarray:
    """True where the density is large enough for per-rho fields to be valid."""
    return rho >= NODE_EPS * float(np.max(rho))


# ---------------------------------------------------------------------------
# scenario sampling: closed-form initial/exact states

@dataclass(frozen=True)
class PlaneWave:
    """psi = exp(i(k.x - E t)), E = |k|^2/2m."""

    k: tuple = (1.0, 0.0, 0.0)
    m: float = 1.0


@dataclass(frozen=True)
class GaussianPacket:
    """Free Gaussian, exact spreading solution.

    At t=0: psi = (2 pi sigma^2)^(-d/4) exp(-(x-x0)^2/(4 sigma^2) + i k.x).
    """

    sigma: float = 1.0
    x0: tuple = (0.0, 0.0, 0.0)
    k: tuple = (0.0, 0.0, 0.0)
    m: float = 1.0


@dataclass(frozen=True)
class HarmonicGroundState:
    """psi = (m w/pi)^(d/4) exp(-m w x^2/2) exp(-i E t), E = d*w/2."""

    omega: float = 1.0
    m: float = 1.0


@dataclass(frozen=True)
class PauliSuperposition:
    """Psi = (w1 psi_a, w2 psi_b) built from two plane waves."""

    k1: tuple = (1.0, 0.0, 0.0)
    k2: tuple = (-1.0, 0.0, 0.0)
    weights: tuple = (1.0, 1.0)
    m: float = 1.0


@dataclass(frozen=True)
class EulerTexture:
    """Pauli field from slowly varying Euler angles.

    theta = theta0 + theta_k . x, phi = phi0 + phi_k . x, chi = chi0 + chi_k . x,
    amplitude R = exp(-(x-x0)^2/(4 sigma^2)) or 1 when sigma is None.
    """

    theta0: float = np.pi / 2
    theta_k: tuple = (0.0, 0.0, 0.0)
    phi0: float = 0.0
    phi_k: tuple = (0.0, 0.0, 0.0)
    chi0: float = 0.0
    chi_k: tuple = (0.0, 0.0, 0.0)
    sigma: float = None
    x0: tuple = (0.0, 0.0, 0.0)
    omega_t: float = 0.0  # chi advances at -omega_t * t


def _dot_x(grid: Grid, k) -> np.ndarray:
    out = np.zeros(grid.shape)
    for ax, x in enumerate(grid.meshgrid()):
        out += k[ax] * x
    return out


def _r2(grid: Grid, x0) -> np.ndarray:
    out = np.zeros(grid.shape)
    for ax, x in enumerate(grid.meshgrid()):
        out += (x - x0[ax]) ** 2
    return out


def sample(descriptor, grid: Grid, t: float = 0.0) -> np.ndarray:
    """Evaluate a closed-form scenario on the grid at time t.

    Returns a complex array: grid.shape for scalar states, grid.shape+(2,)
    for Pauli states.
    """
    if isinstance(descriptor, PlaneWave):
        k = descriptor.k
        energy = sum(ki * ki for ki in k) / (2.0 * descriptor.m)
        return np.exp(1j * (_dot_x(grid, k) - energy * t))
    if isinstance(descriptor, GaussianPacket):
        return _gaussian_packet(descriptor, grid, t)
    if isinstance(descriptor, HarmonicGroundState):
        m, w = descriptor.m, descriptor.omega
        d = grid.dim
        energy = d * w / 2.0
        norm = (m * w / np.pi) ** (d / 4.0)
        return norm * np.exp(-m * w * _r2(grid, (0.0, 0.0, 0.0)) / 2.0) * np.exp(-1j * energy * t)
    if isinstance(descriptor, PauliSuperposition):
        w1, w2 = descriptor.weights
        norm = np.hypot(w1, w2)
        c1 = sample(PlaneWave(descriptor.k1, descriptor.m), grid, t) * (w1 / norm)
        c2 = sample(PlaneWave(descriptor.k2, descriptor.m), grid, t) * (w2 / norm)
        return np.stack([c1, c2], axis=-1)
    if isinstance(descriptor, EulerTexture):
        return _euler_texture(descriptor, grid, t)
    raise GridError(f"unknown scenario descriptor {type(descriptor).__name__}")


def _gaussian_packet(d: GaussianPacket, grid: Grid, t: float) -> np.ndarray:
    # exact free evolution: sigma_t^2 = sigma^2 (1 + i t / (2 m sigma^2))
    sig2 = d.sigma ** 2
    m = d.m
    tau = 1.0 + 1j * t / (2.0 * m * sig2)
    dim = grid.dim
    k2 = sum(ki * ki for ki in d.k)
    out = np.ones(grid.shape, dtype=complex)
    out *= (2.0 * np.pi * sig2) ** (-dim / 4.0) * tau ** (-dim / 2.0)
    xs = grid.meshgrid()
    phase_free = np.zeros(grid.shape)
    quad = np.zeros(grid.shape, dtype=complex)
    for ax in range(dim):
        xc = xs[ax] - d.x0[ax] - d.k[ax] * t / m
        quad += xc ** 2
        phase_free += d.k[ax] * (xs[ax] - d.x0[ax])
    out *= np.exp(-quad / (4.0 * sig2 * tau))
    out *= np.exp(1j * (phase_free - k2 * t / (2.0 * m)))
    return out


def _euler_texture(d: EulerTexture, grid: Grid, t: float) -> np.ndarray:
    theta = d.theta0 + _dot_x(grid, d.theta_k)
    phi = d.phi0 + _dot_x(grid, d.phi_k)
    chi = d.chi0 + _dot_x(grid, d.chi_k) - d.omega_t * t
    if d.sigma is None:
        R = np.ones(grid.shape)
    else:
        R = np.exp(-_r2(grid, d.x0) / (4.0 * d.sigma ** 2))
    psi1 = R * np.cos(theta / 2.0) * np.exp(1j * (phi + chi) / 2.0)
    psi2 = 1j * R * np.sin(theta / 2.0) * np.exp(1j * (chi - phi) / 2.0)
    return np.stack([psi1, psi2], axis=-1)


# ---------------------------------------------------------------------------
# spinor field text format: `x[ y z] Re(psi1) Im(psi1) [Re(psi2) Im(psi2)]`

def write_spinor_field(path, grid: Grid, psi: np.ndarray) -> None:
    psi = np.asarray(psi, dtype=complex)
    comps = [psi] if psi.shape == grid.shape else [psi[..., 0], psi[..., 1]]
    xs = [x.ravel() for x in grid.meshgrid()]
    with open(path, "w") as fh:
        for idx in range(grid.n_points):
            parts = [f"{x[idx]:.17g}" for x in xs]
            for c in comps:
                v = c.ravel()[idx]
                parts.append(f"{v.real:.17g}")
                parts.append(f"{v.imag:.17g}")
            fh.write(" ".join(parts) + "\n")


def read_spinor_field(path, grid: Grid) -> np.ndarray:
    """Read a spinor field written by write_spinor_field onto a known grid."""
    data = np.loadtxt(path, ndmin=2)
    n_val = data.shape[1] - grid.dim
    if n_val not in (2, 4):
        raise GridError(f"unexpected record width {data.shape[1]} in spinor file")
    vals = data[:, grid.dim:]
    if n_val == 2:
        return (vals[:, 0] + 1j * vals[:, 1]).reshape(grid.shape)
    psi1 = vals[:, 0] + 1j * vals[:, 1]
    psi2 = vals[:, 2] + 1j * vals[:, 3]
    return np.stack([psi1.reshape(grid.shape), psi2.reshape(grid.shape)], axis=-1)


# ---------------------------------------------------------------------------
# CSV export

def export_csv(path, grid: Grid, columns: dict) -> None:
    """Write one row per grid point: coordinates then named values.

    Floats are printed with 17 significant digits for bit-stable dumps.
    """
    axis_names = ("x", "y", "z")[: grid.dim]
    xs = [x.ravel() for x in grid.meshgrid()]
    cols = []
    names = []
    for name, arr in columns.items():
        arr = np.asarray(arr)
        flat = arr.reshape(grid.n_points, -1)
        if flat.shape[1] == 1:
            names.append(name)
        else:
            names.extend(f"{name}_{i}" for i in range(flat.shape[1]))
        cols.append(flat)
    data = np.hstack([np.column_stack(xs)] + cols)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(axis_names) + names)
        for row in data:
            writer.writerow([f"{v:.17g}" for v in row])
