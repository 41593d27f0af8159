"""Samplers for hard-disk configurations at fixed cell energies.

The interaction is hard-core, so position and velocity factorize: positions
are uniform on the admissible region (pairwise gaps >= 2r included) and the
velocities of each cell are uniform on the sphere |v|^2 = E_cell.  Under that
shell measure the energy of a tagged disk satisfies E_1/E ~ Beta(1, M-1) and
the energy split of a two-cell shell is Beta(M, M), which is what the
conditioned sampler truncates.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import beta as _beta

from . import core
from .geometry import CellGeometry

__all__ = [
    "sample_positions",
    "sample_velocities_on_shell",
    "sample_cell_energy_conditioned",
    "sample_conditional_liouville",
    "bath_refresh",
]


def sample_positions(geometry: CellGeometry, cells, rng,
                     max_tries: int = 200000, fixed=None, n_sweeps: int = 12):
    """Uniform admissible centers for disks assigned to ``cells``.

    A sequential-insertion seed followed by n_sweeps single-disk
    Metropolis sweeps whose stationary law is the uniform measure on the
    non-overlapping admissible product (gaps >= 2r, including against the
    optional ``fixed`` obstacle centers).
    """
    g, boxes = core.get_packed(geometry)
    rec_tag, rec_p, cell_lo, cell_hi, r, _ = g
    cells_arr = np.asarray(cells, dtype=np.int64)
    if fixed is None or len(fixed) == 0:
        fixed_arr = np.empty((0, 2))
    else:
        fixed_arr = np.asarray(fixed, dtype=np.float64).reshape(-1, 2)
    tries = 0
    pool = max(1024, 64 * len(cells_arr))
    while tries < max_tries:
        uniforms = rng.random(2 * pool)
        pos, used, ok = core.place_disks(
            rec_tag, rec_p, cell_lo, cell_hi, boxes, cells_arr, r, fixed_arr,
            n_sweeps, uniforms)
        tries += used // 2
        if ok:
            return [(float(pos[i, 0]), float(pos[i, 1]))
                    for i in range(len(cells_arr))]
        pool *= 4
    raise RuntimeError(
        "could not place %d disks after %d tries" % (len(cells_arr), max_tries))


def sample_velocities_on_shell(energy: float, n_disks: int, rng):
    """Velocities uniform on the shell sum |v_i|^2 = energy."""
    if energy < 0.0:
        raise ValueError("energy must be nonnegative")
    if energy == 0.0:
        return [(0.0, 0.0)] * n_disks
    g = rng.standard_normal(2 * n_disks)
    norm2 = float(np.dot(g, g))
    scale = math.sqrt(energy / norm2)
    return [(float(g[2 * i]) * scale, float(g[2 * i + 1]) * scale)
            for i in range(n_disks)]


def sample_cell_energy_conditioned(total: float, m_left: int, m_right: int,
                                   rng, cap: float | None = None) -> float:
    """Left-cell energy of a two-cell shell, optionally conditioned below cap.

    The unconditioned split is E_left/total ~ Beta(m_left, m_right); the cap
    conditions on E_left < cap by inverting the truncated CDF.
    """
    if total <= 0.0:
        raise ValueError("total energy must be positive")
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    if cap is None:
        x = float(_beta.ppf(u, m_left, m_right))
    else:
        if not 0.0 < cap:
            raise ValueError("cap must be positive")
        mass = float(_beta.cdf(min(cap / total, 1.0), m_left, m_right))
        x = float(_beta.ppf(u * mass, m_left, m_right))
    return x * total


def sample_conditional_liouville(geometry: CellGeometry, m_per_cell: int,
                                 cell_energies, rng):
    """Full state at fixed per-cell energies: (positions, velocities, cells)."""
    if len(cell_energies) != geometry.n_cells:
        raise ValueError("need one energy per cell")
    cells = []
    for c in range(geometry.n_cells):
        cells.extend([c] * m_per_cell)
    positions = sample_positions(geometry, cells, rng)
    velocities = []
    for c, e_cell in enumerate(cell_energies):
        velocities.extend(sample_velocities_on_shell(float(e_cell), m_per_cell, rng))
    return positions, velocities, cells


def bath_refresh(geometry: CellGeometry, positions, velocities, cells,
                 cell: int, temperature: float, rng):
    """Thermalize one cell: fresh Exp(temperature) energy, fresh configuration.

    Disks of the other cells are untouched; the refreshed centers still
    respect the 2r gap against them.  Returns new (positions, velocities).
    """
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    idx = [i for i, c in enumerate(cells) if c == cell]
    if not idx:
        raise ValueError("cell %d holds no disks" % cell)
    e_new = float(rng.exponential(temperature))
    new_pos = list(positions)
    new_vel = list(velocities)
    fixed = [positions[i] for i, c in enumerate(cells) if c != cell]
    fresh = sample_positions(geometry, [cell] * len(idx), rng, fixed=fixed)
    vel = sample_velocities_on_shell(e_new, len(idx), rng)
    for k, i in enumerate(idx):
        new_pos[i] = fresh[k]
        new_vel[i] = vel[k]
    return new_pos, new_vel
