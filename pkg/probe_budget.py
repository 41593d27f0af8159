import math
import sys
import time

import numpy as np

sys.path.insert(0, "src")
from exchain.billiard import Simulator, multi_cell_table, sample_conditional_liouville
from exchain.billiard.sampling import sample_cell_energy_conditioned


def replica_point(g, m, e, n_rep, cap, seed):
    ss = np.random.SeedSequence(seed)
    taus = []
    cens = 0
    events = 0
    t0 = time.perf_counter()
    for child in ss.spawn(n_rep):
        rng = np.random.default_rng(child)
        pos, vel, cells = sample_conditional_liouville(g, m, e, rng)
        sim = Simulator(g, pos, vel, cells)
        row, status = sim.first_cross_collision(t_cap=cap)
        events += sim.n_events
        if row is None:
            cens += 1
        else:
            taus.append(row[0])
    wall = time.perf_counter() - t0
    mt = (sum(taus) + cens * cap) / max(len(taus), 1)
    ms = 1e3 * wall / n_rep
    print(f"M={m} E={e}: mt={mt:8.2f} cens={cens}/{n_rep} "
          f"{ms:6.2f} ms/rep  -> 1e5 reps = {ms * 100:6.0f} s")
    return mt


g = multi_cell_table()
print("meta:", {k: round(v, 4) for k, v in g.meta.items()})
replica_point(g, 3, (0.5, 0.5), 400, 200.0, 11)
replica_point(g, 3, (0.01, 0.99), 400, 2000.0, 12)
replica_point(g, 3, (0.001, 0.999), 200, 20000.0, 13)
replica_point(g, 2, (1e-4, 1.0 - 1e-4), 100, 100000.0, 14)

# criterion 12 start: cap-conditioned split, M=2, total 1, E_left < 0.001
rng = np.random.default_rng(15)
t0 = time.perf_counter()
n_rep = 300
taus = []
for _ in range(n_rep):
    e_l = sample_cell_energy_conditioned(1.0, 2, 2, rng, cap=0.001)
    pos, vel, cells = sample_conditional_liouville(g, 2, (e_l, 1.0 - e_l), rng)
    sim = Simulator(g, pos, vel, cells)
    t, status = sim.run_until_cells_above(0.2, t_cap=1e6)
    taus.append(t)
wall = time.perf_counter() - t0
ms = 1e3 * wall / n_rep
print(f"passage M=2 low-start: mean={np.mean(taus):.1f} median={np.median(taus):.1f} "
      f"{ms:.2f} ms/rep -> 1e6 reps = {ms * 1000:.0f} s")
