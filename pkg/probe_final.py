import sys
import time

import numpy as np

sys.path.insert(0, "src")
from exchain.billiard import Simulator, multi_cell_table, sample_conditional_liouville
from exchain.billiard.sampling import sample_positions

for w in (1.0, 1.1):
    for h in (1.1, 1.2):
        for sag in (0.06, 0.10, 0.14):
            try:
                g = multi_cell_table(n_cells=2, cell_width=w, height=h,
                                     disk_radius=0.18, wall_sag=sag,
                                     end_sag=0.08, post_radius=0.005,
                                     gate_width=0.365)
            except ValueError as err:
                print(f"w{w} h{h} s{sag}: REJECTED {err}")
                continue
            rng = np.random.default_rng(5)
            t0 = time.perf_counter()
            try:
                for _ in range(40):
                    sample_positions(g, [0] * 4 + [1] * 4, rng, max_tries=40000)
            except RuntimeError:
                print(f"w{w} h{h} s{sag}: M4-PLACEMENT-FAIL")
                continue
            p4 = (time.perf_counter() - t0) / 40 * 1e3
            pos, vel, cells = sample_conditional_liouville(g, 3, (0.5, 0.5), rng)
            sim = Simulator(g, pos, vel, cells)
            sim.run_events(2000)
            t_start, n_start = sim.time, sim.n_events
            rows, _ = sim.run_collect_cross(4000, max_events=40_000_000)
            span = sim.time - t_start
            rate = len(rows) / span
            pace = (sim.n_events - n_start) / span
            print(f"w{w} h{h} s{sag}: rate={rate:.4f}/u pace={pace:.1f} "
                  f"ev/cross={pace/rate:.0f} p4={p4:.2f}ms")
