import math
import sys
import time

import numpy as np

sys.path.insert(0, "src")
from exchain.billiard import Simulator, multi_cell_table, sample_conditional_liouville
from exchain.billiard.dynamics import PAIR
from exchain.billiard.sampling import sample_positions


def first_cross(sim, cap):
    ev = 0
    while sim.time < cap:
        out = sim.step()
        if out is None:
            return math.inf, ev
        ev += 1
        if out[0] == PAIR and sim.cell[out[1]] != sim.cell[out[2]]:
            return sim.time, ev
    return math.inf, ev


def placement_ok(geom, m, tries=60):
    rng = np.random.default_rng(123)
    cells = [0] * m + [1] * m
    t0 = time.perf_counter()
    for _ in range(tries):
        try:
            sample_positions(geom, cells, rng, max_tries=20000)
        except RuntimeError:
            return None
    return (time.perf_counter() - t0) / tries * 1e3


def probe(name, kw, m=3, e=(0.5, 0.5), n_rep=150, cap=50.0, seed=7):
    try:
        geom = multi_cell_table(n_cells=2, **kw)
    except (ValueError, RuntimeError) as err:
        print(f"{name}: REJECTED {err}")
        return
    p4 = placement_ok(geom, 4)
    if p4 is None:
        print(f"{name}: M4-PLACEMENT-FAIL")
        return
    ss = np.random.SeedSequence(seed)
    taus = []
    cens = 0
    events = 0
    t0 = time.perf_counter()
    for child in ss.spawn(n_rep):
        rng = np.random.default_rng(child)
        try:
            pos, vel, cells = sample_conditional_liouville(geom, m, e, rng)
        except RuntimeError:
            print(f"{name}: M3-PLACEMENT-FAIL")
            return
        sim = Simulator(geom, pos, vel, cells)
        tau, ev = first_cross(sim, cap)
        events += ev
        if math.isinf(tau):
            cens += 1
            taus.append(cap)
        else:
            taus.append(tau)
    wall = time.perf_counter() - t0
    n_unc = n_rep - cens
    mt = sum(taus) / max(n_unc, 1)
    c = 1.0 / (mt * math.sqrt(min(e))) if n_unc else 0.0
    pace = events / sum(taus)
    us = 1e6 * wall / max(events, 1)
    print(f"{name}: mt={mt:6.2f} cens={cens:3d}/{n_rep} c={c:.3f} "
          f"pace={pace:5.1f}/u {us:4.1f}us/ev p4={p4:.1f}ms ({wall:.1f}s)")


base18 = dict(disk_radius=0.18, end_sag=0.08, post_radius=0.02, gate_width=0.36)
base15 = dict(disk_radius=0.15, end_sag=0.06, post_radius=0.02, gate_width=0.30)
base12 = dict(disk_radius=0.12, end_sag=0.05, post_radius=0.02, gate_width=0.25)

grid = []
for w in (1.1, 1.2, 1.3):
    for h in (1.1, 1.2):
        for sag in (0.08, 0.15, 0.22):
            grid.append((f"r18 w{w} h{h} s{sag}",
                         dict(cell_width=w, height=h, wall_sag=sag, **base18)))
for w in (0.9, 1.0):
    for h in (0.95, 1.05):
        for sag in (0.12, 0.18):
            grid.append((f"r15 w{w} h{h} s{sag}",
                         dict(cell_width=w, height=h, wall_sag=sag, **base15)))
for w in (0.75, 0.85):
    for h in (0.8, 0.9):
        for sag in (0.10, 0.15):
            grid.append((f"r12 w{w} h{h} s{sag}",
                         dict(cell_width=w, height=h, wall_sag=sag, **base12)))

for name, kw in grid:
    probe(name, kw)
