"""Independent standard-formalism oracle.

Everything here is computed with ordinary complex/matrix arithmetic (Pauli
matrices, column spinors, np.gradient) and never routes through the Clifford
arithmetic, so agreement between the two sides is a genuine check.
"""

from __future__ import annotations

import numpy as np

from .algebra import Multivector, Signature, cayley_table

SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)
IDENTITY2 = np.eye(2, dtype=complex)


def _blade_matrices(sig: Signature):
    if (sig.p, sig.q) == (0, 1):
        return (np.array(1.0 + 0j), np.array(1j))
    mats = []
    for blade in ((), (1,), (2,), (3,), (2, 3), (1, 3), (1, 2), (1, 2, 3)):
        m = IDENTITY2
        for idx in blade:
            m = m @ SIGMA[idx - 1]
        mats.append(m)
    return tuple(mats)


def matrix_rep(a: Multivector):
    """Algebra homomorphism into C (for Cl(0,1)) or 2x2 complex matrices."""
    mats = _blade_matrices(a.signature)
    out = sum(c * m for c, m in zip(a.coeffs, mats))
    if (a.signature.p, a.signature.q) == (0, 1):
        return complex(out)
    return out


def rep_trace(m) -> complex:
    """Trace in the representation (the number itself for Cl(0,1))."""
    if np.isscalar(m) or np.asarray(m).ndim == 0:
        return complex(m)
    return complex(np.trace(m))


def density_matrix(psi1: complex, psi2: complex) -> np.ndarray:
    """Outer product Psi Psi^dagger."""
    col = np.array([psi1, psi2], dtype=complex)
    return np.outer(col, col.conjugate())


def blade_names(sig: Signature):
    return cayley_table(sig).names


# ---------------------------------------------------------------------------
# field-level densities (standard wavefunction formalism)

def _axis_spacings(grid):
    return [grid.spacing[ax] for ax in range(grid.dim)]


def _grad(values: np.ndarray, grid) -> list[np.ndarray]:
    """Per-axis derivative via np.gradient (second order, one-sided edges)."""
    if grid.dim == 1:
        return [np.gradient(values, grid.spacing[0], edge_order=2)]
    return list(np.gradient(values, *_axis_spacings(grid), edge_order=2))


def momentum_density(psi, grid) -> np.ndarray:
    """T^0j = Im(psi^* d_j psi), summed over spinor components.

    psi: complex array of shape grid.shape (Schrodinger) or grid.shape+(2,).
    Returns shape grid.shape + (3,), unused axes zero.
    """
    psi = np.asarray(psi, dtype=complex)
    components = [psi] if psi.shape == grid.shape else [psi[..., 0], psi[..., 1]]
    out = np.zeros(grid.shape + (3,))
    for comp in components:
        for ax, d in enumerate(_grad(comp, grid)):
            out[..., ax] += (comp.conjugate() * d).imag
    return out


def energy_density(frames, dt: float) -> np.ndarray:
    """T^00 = -Im(psi^* d_t psi) via the central stencil on three frames.

    frames: (prev, cur, next) complex arrays; summed over spinor components.
    """
    prev, cur, nxt = (np.asarray(f, dtype=complex) for f in frames)
    dpsi_dt = (nxt - prev) / (2.0 * dt)
    per_comp = -(cur.conjugate() * dpsi_dt).imag
    if per_comp.ndim and prev.shape[-1] == 2 and per_comp.shape[-1] == 2:
        return per_comp.sum(axis=-1)
    return per_comp


def probability_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    dens = np.abs(psi) ** 2
    if psi.ndim and psi.shape[-1] == 2:
        return dens.sum(axis=-1)
    return dens


def spin_direction(psi) -> np.ndarray:
    """Unit spin direction a = (Psi^dagger sigma Psi) / (Psi^dagger Psi)."""
    psi = np.asarray(psi, dtype=complex)
    p1, p2 = psi[..., 0], psi[..., 1]
    norm = np.abs(p1) ** 2 + np.abs(p2) ** 2
    safe = np.where(norm > 0.0, norm, 1.0)
    a1 = 2.0 * (p1 * p2.conjugate()).real
    a2 = -2.0 * (p1 * p2.conjugate()).imag
    a3 = np.abs(p1) ** 2 - np.abs(p2) ** 2
    return np.stack([a1, a2, a3], axis=-1) / safe[..., None]


def messiah_current(psi, grid, m: float) -> np.ndarray:
    """Total Pauli current: m J = Im(Psi^dagger grad Psi) + curl(rho s).

    The spin vector s has magnitude 1/2, so rho*s = rho*a/2 with a the unit
    direction.  Returns J (already divided by m), shape grid.shape + (3,).
    """
    psi = np.asarray(psi, dtype=complex)
    conv = momentum_density(psi, grid)
    rho = probability_density(psi)
    s = 0.5 * rho[..., None] * spin_direction(psi)
    rot = _curl(s, grid)
    return (conv + rot) / m


def _curl(v: np.ndarray, grid) -> np.ndarray:
    derivs = np.zeros(grid.shape + (3, 3))  # derivs[..., comp, axis]
    for comp in range(3):
        for ax, d in enumerate(_grad(v[..., comp], grid)):
            derivs[..., comp, ax] = d
    out = np.zeros_like(v)
    out[..., 0] = derivs[..., 2, 1] - derivs[..., 1, 2]
    out[..., 1] = derivs[..., 0, 2] - derivs[..., 2, 0]
    out[..., 2] = derivs[..., 1, 0] - derivs[..., 0, 1]
    return out
