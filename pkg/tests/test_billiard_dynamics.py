import math

import numpy as np
import pytest

from exchain.billiard import (
    Simulator,
    circle_table,
    multi_cell_table,
    sample_conditional_liouville,
)


def test_circle_chord_exact():
    geom = circle_table(radius=1.0, disk_radius=0.1)
    sim = Simulator(geom, [(0.0, 0.0)], [(1.0, 0.0)], [0])
    ev = sim.step()
    assert ev == (0, 0, -1)
    assert sim.time == pytest.approx(0.9, abs=1e-12)
    assert sim.px[0] == pytest.approx(0.9, abs=1e-9)
    assert sim.vx[0] == -1.0 and sim.vy[0] == 0.0
    # next chord is the full diameter of the contact circle
    sim.step()
    assert sim.time == pytest.approx(0.9 + 1.8, abs=1e-8)


def test_head_on_pair_swap():
    geom = circle_table(radius=2.0, disk_radius=0.1)
    sim = Simulator(geom, [(-0.5, 0.0), (0.5, 0.0)],
                    [(1.0, 0.0), (-1.0, 0.0)], [0, 0])
    ev = sim.step()
    assert ev == (1, 0, 1)
    assert sim.time == pytest.approx(0.4, abs=1e-9)
    assert sim.vx[0] == pytest.approx(-1.0)
    assert sim.vx[1] == pytest.approx(1.0)
    assert sim.last_pair_pre == pytest.approx((1.0, 1.0))


def test_cross_cell_collision_through_gate():
    geom = multi_cell_table()
    h = geom.meta["height"]
    w = geom.meta["cell_width"]
    sim = Simulator(geom, [(w - 0.19, 0.5 * h), (w + 0.19, 0.5 * h)],
                    [(1.0, 0.0), (-1.0, 0.0)], [0, 1])
    ev = sim.step()
    assert ev == (1, 0, 1)
    # gap closes from 0.38 to 0.36 at closing speed 2
    assert sim.time == pytest.approx(0.01, abs=1e-9)
    assert sim.cells_consistent()


def test_energy_conserved_and_no_penetration():
    geom = multi_cell_table()
    rng = np.random.default_rng(42)
    pos, vel, cells = sample_conditional_liouville(geom, 3, (1.3, 0.8), rng)
    sim = Simulator(geom, pos, vel, cells)
    e0 = sim.total_energy()
    saw_pair = False
    for k in range(20000):
        ev = sim.step()
        assert ev is not None
        if ev[0] == 1:
            saw_pair = True
        if k % 500 == 0:
            assert sim.min_pair_clearance() > -1e-9
            assert sim.min_wall_clearance() > -1e-9
    assert saw_pair
    assert abs(sim.total_energy() - e0) / e0 < 1e-9
    assert sim.cells_consistent()


def test_pair_collision_conserves_pair_energy_and_momentum():
    geom = multi_cell_table()
    rng = np.random.default_rng(5)
    pos, vel, cells = sample_conditional_liouville(geom, 3, (2.0, 0.5), rng)
    sim = Simulator(geom, pos, vel, cells)
    checked = 0
    while checked < 50:
        ev = sim.step()
        assert ev is not None
        if ev[0] != 1:
            continue
        i, j = ev[1], ev[2]
        ei, ej = sim.last_pair_pre
        post = sim.disk_energy(i) + sim.disk_energy(j)
        assert post == pytest.approx(ei + ej, rel=1e-12)
        checked += 1


def test_trajectory_reversal_short_window():
    geom = multi_cell_table()
    pos, vel, cells = sample_conditional_liouville(
        geom, 3, (1.0, 1.0), np.random.default_rng(3))
    sim = Simulator(geom, pos, vel, cells)
    sim.run_events(20)
    t_mid = sim.time
    back = Simulator(geom, list(zip(sim.px, sim.py)),
                     [(-vx, -vy) for vx, vy in zip(sim.vx, sim.vy)], cells)
    back.run_until(t_mid)
    for i in range(6):
        assert back.px[i] == pytest.approx(pos[i][0], abs=1e-6)
        assert back.py[i] == pytest.approx(pos[i][1], abs=1e-6)


def test_deterministic_replay():
    geom = multi_cell_table()
    pos, vel, cells = sample_conditional_liouville(
        geom, 4, (1.7, 0.4), np.random.default_rng(8))
    runs = []
    for _ in range(2):
        sim = Simulator(geom, pos, vel, cells)
        log = [sim.step() for _ in range(3000)]
        runs.append((log, list(sim.px), list(sim.vx), sim.time))
    assert runs[0] == runs[1]


def test_static_state_returns_none():
    geom = multi_cell_table()
    rng = np.random.default_rng(1)
    pos, _, cells = sample_conditional_liouville(geom, 3, (1.0, 1.0), rng)
    sim = Simulator(geom, pos, [(0.0, 0.0)] * 6, cells)
    assert sim.step() is None
    sim.run_until(5.0)
    assert sim.time == 5.0


def test_run_until_free_flight():
    geom = circle_table(radius=5.0, disk_radius=0.1)
    sim = Simulator(geom, [(0.0, 0.0)], [(0.3, 0.4)], [0])
    sim.run_until(1.25)
    assert sim.px[0] == pytest.approx(0.375)
    assert sim.py[0] == pytest.approx(0.5)
    assert sim.time == 1.25


def test_constructor_validation():
    geom = multi_cell_table()
    h = geom.meta["height"]
    with pytest.raises(ValueError):
        Simulator(geom, [(0.5, 0.5 * h), (0.6, 0.5 * h)],
                  [(0.0, 0.0)] * 2, [0, 0])  # overlap
    with pytest.raises(ValueError):
        Simulator(geom, [(2.0, 0.5 * h)], [(0.0, 0.0)], [0])  # on the partition
    with pytest.raises(ValueError):
        Simulator(geom, [(0.5, 0.5 * h)], [], [0])
