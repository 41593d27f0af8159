"""Event-driven hard-disk dynamics on a cell table.

The simulator keeps, per disk, the earliest wall contact among the
pieces of its cell, and, per eligible disk pair, the earliest meeting
time.  After an event only the candidates touching the updated disks are
recomputed (every other flight is unchanged), and every collision is
resolved exactly at its contact configuration.  The hot loop lives in
core.py as jitted kernels; this class owns the state arrays and the
validation.

Conventions pinned here and used by every experiment:

* contact times are accepted with absolute tolerance EPS_T; imminent or
  micro-penetrating contacts fire after EPS_T rather than at 0, so
  recovery cannot stall the clock;
* ties within EPS_T resolve toward the lowest participant index, walls
  before pair events;
* a contact whose normal relative speed is below GRAZE is a miss: the
  state is nudged apart by NUDGE along the contact normal and the
  candidates are rescheduled;
* after every real collision the participants are nudged NUDGE along the
  contact normal to rule out immediate re-detection.

Disk energy is |v|^2 throughout (disks have mass 2).
"""

from __future__ import annotations

import math

import numpy as np

from . import core
from .core import EPS_T, GRAZE, NUDGE
from .geometry import CellGeometry, center_clearance

__all__ = ["Simulator", "EPS_T", "NUDGE", "GRAZE"]

INF = math.inf

# events returned by Simulator.step
WALL = core.WALL
PAIR = core.PAIR
WALL_MISS = core.WALL_MISS
PAIR_MISS = core.PAIR_MISS


class Simulator:
    """Hard-disk billiard state plus its event calendar."""

    def __init__(self, geometry: CellGeometry, positions, velocities, cells,
                 time: float = 0.0):
        n = len(positions)
        if not (len(velocities) == len(cells) == n):
            raise ValueError("positions, velocities and cells must align")
        self.geometry = geometry
        self.px = np.array([float(p[0]) for p in positions])
        self.py = np.array([float(p[1]) for p in positions])
        self.vx = np.array([float(v[0]) for v in velocities])
        self.vy = np.array([float(v[1]) for v in velocities])
        self.cell = np.array([int(c) for c in cells], dtype=np.int64)
        for i in range(n):
            if not geometry.admissible(self.cell[i], self.px[i], self.py[i]):
                raise ValueError("disk %d starts outside its cell's free region" % i)
        for i in range(n):
            for j in range(i + 1, n):
                gap = math.hypot(self.px[i] - self.px[j], self.py[i] - self.py[j])
                if gap < 2.0 * geometry.disk_radius:
                    raise ValueError("disks %d and %d start overlapping" % (i, j))
        self.n = n
        self.n_events = 0
        self._r = geometry.disk_radius
        self._two_r = 2.0 * geometry.disk_radius
        self._G = core.get_packed(geometry)[0]
        pair_i = []
        pair_j = []
        for i in range(n):
            for j in range(i + 1, n):
                if geometry.pairs_eligible(self.cell[i], self.cell[j]):
                    pair_i.append(i)
                    pair_j.append(j)
        self._clock = np.array([float(time)])
        self._last_pre = np.zeros(2)
        self._S = (
            self.px, self.py, self.vx, self.vy, self.cell,
            np.full(n, INF), np.full(n, -1, dtype=np.int64),
            np.asarray(pair_i, dtype=np.int64),
            np.asarray(pair_j, dtype=np.int64),
            np.full(len(pair_i), INF),
            self._clock,
        )
        core.init_calendar(self._G, self._S)

    @property
    def time(self) -> float:
        return float(self._clock[0])

    @time.setter
    def time(self, value: float):
        self._clock[0] = float(value)

    @property
    def last_pair_pre(self):
        return float(self._last_pre[0]), float(self._last_pre[1])

    # -- stepping ------------------------------------------------------------

    def step(self):
        """Advance to the next event; returns (kind, i, j) or None when static."""
        kind, i, j = core.step(self._G, self._S, self._last_pre)
        if kind == -1:
            return None
        self.n_events += 1
        return (int(kind), int(i), int(j))

    def run_events(self, n: int) -> int:
        done = int(core.run_events(self._G, self._S, self._last_pre, n))
        self.n_events += done
        return done

    def run_until(self, t_end: float):
        """Advance through every event strictly before t_end, then drift to it."""
        self.n_events += int(
            core.run_until(self._G, self._S, self._last_pre, float(t_end)))

    def run_collect_cross(self, n_cross: int, t_cap: float = INF,
                          max_events: int = 2**62):
        """Record up to n_cross cross-cell collisions.

        Returns (rows, status): rows[k] = (time, i, j, ei_pre, ej_pre,
        ei_post, ej_post, cell_i, cell0_pre, cell1_pre).
        """
        out = np.empty((n_cross, 10))
        got, status, ev = core.collect_cross(
            self._G, self._S, self._last_pre, n_cross, float(t_cap),
            max_events, out)
        self.n_events += int(ev)
        return out[:got], int(status)

    def first_cross_collision(self, t_cap: float = INF,
                              max_events: int = 2**62):
        """Time of the first collision between disks of different cells.

        Returns (row, status); row is None when the cap, a static state or
        the event budget intervened first.
        """
        rows, status = self.run_collect_cross(1, t_cap, max_events)
        if len(rows) == 0:
            return None, status
        return rows[0], status

    def run_until_cells_above(self, threshold: float, t_cap: float = INF,
                              max_events: int = 2**62):
        """First time both cell energies reach threshold; (time, status)."""
        t, status, ev = core.run_until_cells_above(
            self._G, self._S, self._last_pre, float(threshold), float(t_cap),
            max_events)
        self.n_events += int(ev)
        return float(t), int(status)

    # -- observables and audits ----------------------------------------------

    def disk_energy(self, i: int) -> float:
        return float(self.vx[i] ** 2 + self.vy[i] ** 2)

    def cell_energy(self, cell: int) -> float:
        e = 0.0
        for i in range(self.n):
            if self.cell[i] == cell:
                e += self.vx[i] ** 2 + self.vy[i] ** 2
        return float(e)

    def total_energy(self) -> float:
        return float(np.dot(self.vx, self.vx) + np.dot(self.vy, self.vy))

    def min_pair_clearance(self) -> float:
        best = INF
        for i in range(self.n):
            for j in range(i + 1, self.n):
                gap = math.hypot(self.px[i] - self.px[j], self.py[i] - self.py[j])
                best = min(best, gap - self._two_r)
        return best

    def min_wall_clearance(self) -> float:
        geom = self.geometry
        best = INF
        for i in range(self.n):
            for idx in geom.cell_pieces[self.cell[i]]:
                c = center_clearance(geom.pieces[idx], self.px[i], self.py[i],
                                     geom.disk_radius)
                best = min(best, c)
        return best

    def cells_consistent(self) -> bool:
        return all(
            self.geometry.cell_of(self.px[i]) == self.cell[i] for i in range(self.n)
        )
