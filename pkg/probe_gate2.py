import sys
import time

import numpy as np

sys.path.insert(0, "src")
from exchain.billiard import Simulator, multi_cell_table, sample_conditional_liouville

cellkw = dict(n_cells=2, cell_width=1.1, height=1.2, disk_radius=0.18,
              wall_sag=0.08, end_sag=0.08)
r = 0.18

for rp, margin in [(0.01, 0.01), (0.01, 0.005), (0.01, 0.002),
                   (0.005, 0.005), (0.02, 0.005), (0.03, 0.005),
                   (0.05, 0.005)]:
    gw = 2.0 * (rp + r) - margin
    try:
        g = multi_cell_table(post_radius=rp, gate_width=gw, **cellkw)
    except ValueError as err:
        print(f"rp={rp} m={margin}: REJECTED {err}")
        continue
    rng = np.random.default_rng(3)
    pos, vel, cells = sample_conditional_liouville(g, 3, (0.5, 0.5), rng)
    sim = Simulator(g, pos, vel, cells)
    sim.run_events(2000)
    t_start = sim.time
    n_start = sim.n_events
    t0 = time.perf_counter()
    rows, status = sim.run_collect_cross(4000, max_events=40_000_000)
    wall = time.perf_counter() - t0
    span = sim.time - t_start
    rate = len(rows) / span
    pace = (sim.n_events - n_start) / span
    a0 = g.meta["gate_contact_offset"]
    print(f"rp={rp:5.3f} g={gw:.3f} m={margin}: a0={a0:.4f} "
          f"rate={rate:.4f}/u pace={pace:.1f} ev/cross={pace/rate:.0f} ({wall:.1f}s)")
