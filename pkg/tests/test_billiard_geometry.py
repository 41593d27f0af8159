import math

import pytest

from exchain.billiard import circle_table, multi_cell_table
from exchain.billiard.geometry import Arc, Segment, center_clearance


def test_circle_table_admissibility():
    geom = circle_table(radius=1.0, disk_radius=0.1)
    assert geom.n_cells == 1
    assert geom.admissible(0, 0.0, 0.0)
    assert geom.admissible(0, 0.89, 0.0)
    assert not geom.admissible(0, 0.95, 0.0)


def test_two_cell_table_structure():
    geom = multi_cell_table()
    arcs = [p for p in geom.pieces if isinstance(p, Arc)]
    segs = [p for p in geom.pieces if isinstance(p, Segment)]
    assert len(arcs) == 6
    assert len(segs) == 2
    assert geom.n_cells == 2
    meta = geom.meta
    # the partition posts must close the gate to disk centers while still
    # letting disks on opposite sides meet across it
    assert meta["center_block_margin"] > 0.0
    assert meta["gate_throat_depth"] < geom.disk_radius
    w, sag = meta["cell_width"], meta["wall_sag"]
    assert meta["arc_radius"] == pytest.approx((w * w / 4.0 + sag * sag) / (2.0 * sag))


def test_partition_plane_blocked_to_centers():
    geom = multi_cell_table()
    w = geom.meta["cell_width"]
    h = geom.meta["height"]
    for y in (0.2, 0.5 * h, h - 0.2):
        assert not geom.admissible(0, w - 1e-9, y)
        assert not geom.admissible(1, w + 1e-9, y)
    # just beyond the gate throat the mid-height line opens up again
    delta = geom.meta["gate_throat_depth"]
    assert geom.admissible(0, w - delta - 1e-3, 0.5 * h)
    assert geom.admissible(1, w + delta + 1e-3, 0.5 * h)


def test_cell_of_and_pair_eligibility():
    geom = multi_cell_table(n_cells=3)
    w = geom.meta["cell_width"]
    assert geom.cell_of(0.5 * w) == 0
    assert geom.cell_of(1.5 * w) == 1
    assert geom.cell_of(2.5 * w) == 2
    assert geom.pairs_eligible(0, 0)
    assert geom.pairs_eligible(0, 1)
    assert geom.pairs_eligible(2, 1)
    assert not geom.pairs_eligible(0, 2)


def test_invalid_tables_rejected():
    # post too small: centers could sit on the partition plane
    with pytest.raises(ValueError):
        multi_cell_table(post_radius=0.5)
    # sag so deep the waist pinches shut
    with pytest.raises(ValueError):
        multi_cell_table(wall_sag=0.75)
    with pytest.raises(ValueError):
        multi_cell_table(disk_radius=-0.1)


def test_center_clearance_signs():
    arc_out = Arc(0.0, 0.0, 1.0, inside=False)
    assert center_clearance(arc_out, 2.0, 0.0, 0.5) == pytest.approx(0.5)
    assert center_clearance(arc_out, 1.2, 0.0, 0.5) == pytest.approx(-0.3)
    arc_in = Arc(0.0, 0.0, 2.0, inside=True)
    assert center_clearance(arc_in, 0.0, 0.0, 0.5) == pytest.approx(1.5)
    assert center_clearance(arc_in, 1.8, 0.0, 0.5) == pytest.approx(-0.3)
    seg = Segment(0.0, 0.0, 4.0, 0.0)
    assert center_clearance(seg, 1.0, 0.7, 0.5) == pytest.approx(0.2)
    assert center_clearance(seg, -3.0, 4.0, 0.5) == pytest.approx(4.5)


def test_candidate_lists_cover_own_cell():
    geom = multi_cell_table()
    w = geom.meta["cell_width"]
    # every piece a disk of cell 0 can touch shows up in its candidate list
    cand0 = set(geom.cell_pieces[0])
    touchable = set()
    for idx, piece in enumerate(geom.pieces):
        if isinstance(piece, Segment):
            if piece.ax <= w:
                touchable.add(idx)
        elif piece.inside or piece.cx <= w + 1e-9:
            touchable.add(idx)
    assert touchable <= cand0
