"""Tables for hard-disk billiards.

A table is a list of wall pieces (full circles and segments) plus one
axis-aligned box per cell.  Every boundary is flat or bulges into the
domain (dispersing), so the single-disk dynamics is chaotic; chains of
cells share round "gate posts" that let disks touch across a partition
while their centers provably cannot cross it.

Disks have radius ``disk_radius`` and energy |v|^2 (mass 2).  Arcs are
kept as full circles: in every shipped table the angular stretches that
are not real boundary lie behind other pieces, outside the reachable
part of the domain, which spares the solvers angular-interval logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "Arc",
    "Segment",
    "CellGeometry",
    "multi_cell_table",
    "circle_table",
    "center_clearance",
]


@dataclass(frozen=True)
class Arc:
    """Circular wall.  inside=False: the domain lies outside the circle."""

    cx: float
    cy: float
    radius: float
    inside: bool = False


@dataclass(frozen=True)
class Segment:
    """Flat two-sided wall with endpoint caps."""

    ax: float
    ay: float
    bx: float
    by: float

    @property
    def length(self) -> float:
        return math.hypot(self.bx - self.ax, self.by - self.ay)


def center_clearance(piece, x: float, y: float, r: float) -> float:
    """Signed clearance of a disk center from a wall piece.

    Positive means the disk does not touch the piece; zero is contact.
    """
    if isinstance(piece, Arc):
        d = math.hypot(x - piece.cx, y - piece.cy)
        if piece.inside:
            return (piece.radius - r) - d
        return d - (piece.radius + r)
    ux, uy = piece.bx - piece.ax, piece.by - piece.ay
    ll = ux * ux + uy * uy
    t = ((x - piece.ax) * ux + (y - piece.ay) * uy) / ll
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    qx, qy = piece.ax + t * ux, piece.ay + t * uy
    return math.hypot(x - qx, y - qy) - r


@dataclass(frozen=True)
class CellGeometry:
    """Wall pieces, per-cell boxes and candidate lists for one table."""

    disk_radius: float
    pieces: tuple
    # (x_lo, x_hi, y_lo, y_hi) nominal box per cell
    cells: tuple
    # candidate piece indices per cell: every piece a disk of that cell can touch
    cell_pieces: tuple
    meta: dict = field(default_factory=dict)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def cell_of(self, x: float) -> int:
        """Nominal cell index of a center position (audits only)."""
        for idx, (x_lo, x_hi, _, _) in enumerate(self.cells):
            if x_lo <= x <= x_hi:
                return idx
        return -1

    def admissible(self, cell: int, x: float, y: float) -> bool:
        """True when a disk center at (x, y) is legal for the given cell."""
        x_lo, x_hi, y_lo, y_hi = self.cells[cell]
        if not (x_lo <= x <= x_hi and y_lo <= y <= y_hi):
            return False
        r = self.disk_radius
        for idx in self.cell_pieces[cell]:
            if center_clearance(self.pieces[idx], x, y, r) < 0.0:
                return False
        return True

    def pairs_eligible(self, cell_a: int, cell_b: int) -> bool:
        """Disks can meet iff their cells coincide or are adjacent."""
        return abs(cell_a - cell_b) <= 1


def _candidate_lists(pieces, cells, r):
    """Conservative per-cell candidate sets via box overlap.

    A piece is a candidate for a cell when its contact zone (inflated by
    the disk radius) intersects the cell box inflated by 2r; anything
    farther can never be touched by a disk whose center stays in the box.
    """
    out = []
    for (x_lo, x_hi, y_lo, y_hi) in cells:
        bx_lo, bx_hi = x_lo - 2 * r, x_hi + 2 * r
        by_lo, by_hi = y_lo - 2 * r, y_hi + 2 * r
        idxs = []
        for i, piece in enumerate(pieces):
            if isinstance(piece, Arc):
                reach = piece.radius + r
                px_lo, px_hi = piece.cx - reach, piece.cx + reach
                py_lo, py_hi = piece.cy - reach, piece.cy + reach
                if piece.inside:
                    idxs.append(i)
                    continue
            else:
                px_lo = min(piece.ax, piece.bx) - r
                px_hi = max(piece.ax, piece.bx) + r
                py_lo = min(piece.ay, piece.by) - r
                py_hi = max(piece.ay, piece.by) + r
            if px_lo <= bx_hi and px_hi >= bx_lo and py_lo <= by_hi and py_hi >= by_lo:
                idxs.append(i)
        out.append(tuple(idxs))
    return tuple(out)


def multi_cell_table(n_cells: int = 2, cell_width: float = 1.0,
                     height: float = 1.2, disk_radius: float = 0.18,
                     wall_sag: float = 0.10, end_sag: float = 0.08,
                     post_radius: float = 0.005,
                     gate_width: float = 0.365) -> CellGeometry:
    """A row of chaotic cells joined by center-blocking gates.

    The floor and ceiling are single shallow dispersing arcs spanning the
    whole row (sagging wall_sag into the domain); the row ends are
    dispersing arcs bulging end_sag inward.  Adjacent cells are divided
    by two vertical wall segments that leave a slot of gate_width around
    mid-height; a gate post (circle of post_radius) sits on each slot
    edge.  For two cells this is six circles and two segments.

    The slot admits a disk center only if gate_width >= 2(post_radius + r),
    so requiring the opposite strict inequality closes every partition to
    centers for all time.  Disks still meet across the slot: the closest
    a center can come to the partition plane is

        a0 = sqrt((post_radius + r)^2 - (gate_width/2)^2)

    attained at mid-slot, and the construction demands a0 < r so that two
    opposing disks (gap 2*a0 < 2r) overlap the plane and collide.
    """
    if n_cells < 1:
        raise ValueError("n_cells must be >= 1")
    if min(cell_width, height, disk_radius) <= 0:
        raise ValueError("lengths must be positive")
    if wall_sag <= 0 or 2 * wall_sag >= height:
        raise ValueError("wall_sag must lie in (0, height/2)")
    if end_sag <= 0 or end_sag >= cell_width / 2:
        raise ValueError("end_sag must lie in (0, cell_width/2)")
    if post_radius < 0 or gate_width <= 0:
        raise ValueError("post_radius must be >= 0 and gate_width > 0")
    r = disk_radius
    w, h = cell_width, height
    length = n_cells * w

    rr = post_radius + r
    blocking = 2.0 * rr - gate_width
    if n_cells > 1:
        if blocking <= 0:
            raise ValueError("gate too wide: disk centers could cross the slot")
        a0 = math.sqrt(rr * rr - (gate_width / 2.0) ** 2)
        if a0 >= r:
            raise ValueError("gate too narrow: disks cannot meet across it")
    else:
        a0 = 0.0

    if w - end_sag - 2 * r < 2 * r:
        raise ValueError("cell too short for a disk beside the end wall")

    slot_lo = h / 2.0 - gate_width / 2.0
    slot_hi = h / 2.0 + gate_width / 2.0
    # circle through (0, 0) and (length, 0) sagging to (length/2, wall_sag)
    arc_radius = (length * length / 4.0 + wall_sag * wall_sag) / (2.0 * wall_sag)
    # circle through (0, 0) and (0, h) bulging to (end_sag, h/2)
    end_radius = (h * h / 4.0 + end_sag * end_sag) / (2.0 * end_sag)

    def floor_height(x):
        return (wall_sag - arc_radius) + math.sqrt(
            arc_radius * arc_radius - (x - length / 2.0) ** 2)

    # disks must fit between the arcs in every cell body and still reach the
    # contact window beside every partition
    worst_mid = max(floor_height((k + 0.5) * w) for k in range(n_cells))
    if h - 2 * (worst_mid + r) < 2 * r:
        raise ValueError("cell too flat for a disk to pass the waist")
    if n_cells > 1:
        worst_part = max(floor_height(k * w) for k in range(1, n_cells))
        if h - 2 * (worst_part + r) <= 0.05:
            raise ValueError("arcs pinch the partition shut")

    pieces: list = [
        Arc(length / 2.0, wall_sag - arc_radius, arc_radius),
        Arc(length / 2.0, h - wall_sag + arc_radius, arc_radius),
        Arc(end_sag - end_radius, h / 2.0, end_radius),
        Arc(length - end_sag + end_radius, h / 2.0, end_radius),
    ]
    for k in range(1, n_cells):
        x = k * w
        y_floor = floor_height(x)
        if slot_lo - post_radius <= y_floor:
            raise ValueError("slot too close to the floor arc")
        pieces.append(Segment(x, y_floor, x, slot_lo))
        pieces.append(Segment(x, slot_hi, x, h - y_floor))
        pieces.append(Arc(x, slot_lo, post_radius))
        pieces.append(Arc(x, slot_hi, post_radius))

    cells = tuple((c * w, (c + 1) * w, 0.0, h) for c in range(n_cells))
    geom = CellGeometry(
        disk_radius=r,
        pieces=tuple(pieces),
        cells=cells,
        cell_pieces=_candidate_lists(pieces, cells, r),
        meta={
            "cell_width": w,
            "height": h,
            "wall_sag": wall_sag,
            "end_sag": end_sag,
            "post_radius": post_radius,
            "gate_width": gate_width,
            "arc_radius": arc_radius,
            "end_arc_radius": end_radius,
            "slot_lo": slot_lo,
            "slot_hi": slot_hi,
            "gate_contact_offset": a0,
            "center_block_margin": blocking,
        },
    )
    return geom


def circle_table(radius: float = 1.0, disk_radius: float = 0.1) -> CellGeometry:
    """A single circular cell; handy for exact-geometry tests."""
    if radius <= 2 * disk_radius:
        raise ValueError("table too small for the disk")
    pieces = (Arc(0.0, 0.0, radius, inside=True),)
    cells = ((-radius, radius, -radius, radius),)
    return CellGeometry(disk_radius, pieces, cells, ((0,),),
                        meta={"radius": radius})
