"""Jitted kernels behind the billiard simulator.

Geometry is packed into flat record arrays; the calendar update, the
event step and the bulk drivers all run under numba so that replica
experiments cost well under a microsecond per event.  The semantics
(tolerances, tie-breaks, nudges) are pinned in dynamics.py; this module
is the single implementation.

Record layout: tag 0 is a circle the center must stay outside of
(p0=cx, p1=cy, p2=contact radius), tag 1 a circle the center must stay
inside of, tag 2 a segment contact slab (p0=ax, p1=ay, p2=ux, p3=uy,
p4=length, p5=nx, p6=ny).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .geometry import Arc, CellGeometry

EPS_T = 1e-12
NUDGE = 1e-10
GRAZE = 1e-12
INF = math.inf

WALL = 0
PAIR = 1
WALL_MISS = 2
PAIR_MISS = 3

# status codes returned by the bulk drivers
OK = 0
TIME_CAP = 1
STATIC = 2
EVENT_CAP = 3


def pack_geometry(geometry: CellGeometry):
    """Flatten cell pieces into record arrays the kernels consume."""
    r = geometry.disk_radius
    tags = []
    params = []
    lo = []
    hi = []
    for cell in range(geometry.n_cells):
        lo.append(len(tags))
        for idx in geometry.cell_pieces[cell]:
            piece = geometry.pieces[idx]
            if isinstance(piece, Arc):
                if piece.inside:
                    tags.append(1)
                    params.append((piece.cx, piece.cy, piece.radius - r,
                                   0.0, 0.0, 0.0, 0.0))
                else:
                    tags.append(0)
                    params.append((piece.cx, piece.cy, piece.radius + r,
                                   0.0, 0.0, 0.0, 0.0))
            else:
                ll = piece.length
                ux, uy = (piece.bx - piece.ax) / ll, (piece.by - piece.ay) / ll
                tags.append(2)
                params.append((piece.ax, piece.ay, ux, uy, ll, -uy, ux))
                tags.append(0)
                params.append((piece.ax, piece.ay, r, 0.0, 0.0, 0.0, 0.0))
                tags.append(0)
                params.append((piece.bx, piece.by, r, 0.0, 0.0, 0.0, 0.0))
        hi.append(len(tags))
    return (
        np.asarray(tags, dtype=np.int64),
        np.asarray(params, dtype=np.float64),
        np.asarray(lo, dtype=np.int64),
        np.asarray(hi, dtype=np.int64),
        float(r),
        2.0 * float(r),
    )


@njit(cache=True)
def _time_to_record(tag, p, x, y, vx, vy, r):
    """Earliest admissible contact time of one disk flight with one record."""
    if tag == 0:
        dx = x - p[0]
        dy = y - p[1]
        rc = p[2]
        b = dx * vx + dy * vy
        cc = dx * dx + dy * dy - rc * rc
        if cc > 0.0:
            if b >= 0.0:
                return INF
            a = vx * vx + vy * vy
            disc = b * b - a * cc
            if disc <= 0.0:
                return INF
            t = (-b - math.sqrt(disc)) / a
            return t if t > EPS_T else EPS_T
        # micro-penetration of the contact zone: fire only while deepening
        return EPS_T if b < 0.0 else INF
    if tag == 1:
        dx = x - p[0]
        dy = y - p[1]
        rc = p[2]
        a = vx * vx + vy * vy
        if a == 0.0:
            return INF
        b = dx * vx + dy * vy
        cc = dx * dx + dy * dy - rc * rc
        disc = b * b - a * cc
        if disc <= 0.0:
            # fully outside the containing circle: recover immediately
            return EPS_T
        t = (-b + math.sqrt(disc)) / a
        return t if t > EPS_T else EPS_T
    # segment interior
    ax = p[0]
    ay = p[1]
    ux = p[2]
    uy = p[3]
    ll = p[4]
    nx = p[5]
    ny = p[6]
    dx = x - ax
    dy = y - ay
    d0 = dx * nx + dy * ny
    vd = vx * nx + vy * ny
    if d0 > r:
        if vd >= 0.0:
            return INF
        t = (r - d0) / vd
    elif d0 < -r:
        if vd <= 0.0:
            return INF
        t = (-r - d0) / vd
    else:
        # center inside the contact slab: legal only beyond the span ends,
        # where the caps govern; fire only while deepening within the span
        if d0 * vd < 0.0:
            s0 = dx * ux + dy * uy
            if 0.0 <= s0 <= ll:
                return EPS_T
        return INF
    s = dx * ux + dy * uy + (vx * ux + vy * uy) * t
    if 0.0 <= s <= ll:
        return t if t > EPS_T else EPS_T
    return INF


@njit(cache=True)
def _record_normal(tag, p, x, y):
    if tag == 0:
        dx = x - p[0]
        dy = y - p[1]
        d = math.hypot(dx, dy)
        return dx / d, dy / d
    if tag == 1:
        dx = p[0] - x
        dy = p[1] - y
        d = math.hypot(dx, dy)
        return dx / d, dy / d
    nx = p[5]
    ny = p[6]
    d0 = (x - p[0]) * nx + (y - p[1]) * ny
    if d0 >= 0.0:
        return nx, ny
    return -nx, -ny


@njit(cache=True)
def _admissible(rec_tag, rec_p, lo, hi, x, y, r):
    """Center position legal against every record of one cell."""
    for q in range(lo, hi):
        tag = rec_tag[q]
        p = rec_p[q]
        if tag == 0:
            dx = x - p[0]
            dy = y - p[1]
            if dx * dx + dy * dy <= p[2] * p[2]:
                return False
        elif tag == 1:
            dx = x - p[0]
            dy = y - p[1]
            if dx * dx + dy * dy >= p[2] * p[2]:
                return False
        else:
            dx = x - p[0]
            dy = y - p[1]
            d0 = dx * p[5] + dy * p[6]
            if -r <= d0 <= r:
                s = dx * p[2] + dy * p[3]
                if 0.0 <= s <= p[4]:
                    return False
    return True


@njit(cache=True)
def _rewall(G, S, i):
    rec_tag, rec_p, cell_lo, cell_hi, r, two_r = G
    px, py, vx, vy, cell, wall_t, wall_rec, pair_i, pair_j, pair_t, clock = S
    x = px[i]
    y = py[i]
    ux = vx[i]
    uy = vy[i]
    best = INF
    best_rec = -1
    for q in range(cell_lo[cell[i]], cell_hi[cell[i]]):
        t = _time_to_record(rec_tag[q], rec_p[q], x, y, ux, uy, r)
        if t < best:
            best = t
            best_rec = q
    wall_t[i] = clock[0] + best if best < INF else INF
    wall_rec[i] = best_rec


@njit(cache=True)
def _repair(G, S, k):
    rec_tag, rec_p, cell_lo, cell_hi, r, two_r = G
    px, py, vx, vy, cell, wall_t, wall_rec, pair_i, pair_j, pair_t, clock = S
    i = pair_i[k]
    j = pair_j[k]
    dx = px[i] - px[j]
    dy = py[i] - py[j]
    dvx = vx[i] - vx[j]
    dvy = vy[i] - vy[j]
    b = dx * dvx + dy * dvy
    if b >= 0.0:
        pair_t[k] = INF
        return
    cc = dx * dx + dy * dy - two_r * two_r
    if cc < 0.0:
        pair_t[k] = clock[0] + EPS_T
        return
    a = dvx * dvx + dvy * dvy
    disc = b * b - a * cc
    if disc <= 0.0:
        pair_t[k] = INF
        return
    t = (-b - math.sqrt(disc)) / a
    pair_t[k] = clock[0] + (t if t > EPS_T else EPS_T)


@njit(cache=True)
def _refresh(G, S, i, j):
    pair_i = S[7]
    pair_j = S[8]
    _rewall(G, S, i)
    for k in range(pair_i.shape[0]):
        if pair_i[k] == i or pair_j[k] == i:
            _repair(G, S, k)
    if j >= 0:
        _rewall(G, S, j)
        for k in range(pair_i.shape[0]):
            if pair_i[k] == i or pair_j[k] == i:
                continue
            if pair_i[k] == j or pair_j[k] == j:
                _repair(G, S, k)


@njit(cache=True)
def init_calendar(G, S):
    n = S[0].shape[0]
    for i in range(n):
        _rewall(G, S, i)
    for k in range(S[7].shape[0]):
        _repair(G, S, k)


@njit(cache=True)
def step(G, S, last_pre):
    """One event; returns (kind, i, j), kind -1 when the state is static."""
    px, py, vx, vy, cell, wall_t, wall_rec, pair_i, pair_j, pair_t, clock = S
    n = px.shape[0]
    npair = pair_t.shape[0]
    t_min = INF
    for i in range(n):
        if wall_t[i] < t_min:
            t_min = wall_t[i]
    for k in range(npair):
        if pair_t[k] < t_min:
            t_min = pair_t[k]
    if t_min == INF:
        return -1, -1, -1
    # ties inside the tolerance window: lowest participant, walls first
    cut = t_min + EPS_T
    pick_kind = -1
    pick_i = n + 1
    pick_j = -1
    pick_t = t_min
    for i in range(n):
        if wall_t[i] <= cut:
            if i < pick_i or (i == pick_i and pick_kind > 0):
                pick_kind = 0
                pick_i = i
                pick_j = -1
                pick_t = wall_t[i]
    for k in range(npair):
        if pair_t[k] <= cut:
            i = pair_i[k]
            j = pair_j[k]
            if (i < pick_i
                    or (i == pick_i and pick_kind == 1 and j < pick_j)):
                pick_kind = 1
                pick_i = i
                pick_j = j
                pick_t = pair_t[k]

    dt = pick_t - clock[0]
    if dt > 0.0:
        for m in range(n):
            px[m] += vx[m] * dt
            py[m] += vy[m] * dt
        clock[0] = pick_t

    if pick_kind == 0:
        i = pick_i
        q = wall_rec[i]
        nx, ny = _record_normal(G[0][q], G[1][q], px[i], py[i])
        vn = vx[i] * nx + vy[i] * ny
        if vn > -GRAZE:
            # grazing or separating: miss, push off the wall and reschedule
            px[i] += nx * NUDGE
            py[i] += ny * NUDGE
            _refresh(G, S, i, -1)
            return WALL_MISS, i, -1
        vx[i] -= 2.0 * vn * nx
        vy[i] -= 2.0 * vn * ny
        px[i] += nx * NUDGE
        py[i] += ny * NUDGE
        _refresh(G, S, i, -1)
        return WALL, i, -1

    i = pick_i
    j = pick_j
    dx = px[i] - px[j]
    dy = py[i] - py[j]
    d = math.hypot(dx, dy)
    nx = dx / d
    ny = dy / d
    vrel = (vx[i] - vx[j]) * nx + (vy[i] - vy[j]) * ny
    if vrel > -GRAZE:
        px[i] += nx * (0.5 * NUDGE)
        py[i] += ny * (0.5 * NUDGE)
        px[j] -= nx * (0.5 * NUDGE)
        py[j] -= ny * (0.5 * NUDGE)
        _refresh(G, S, i, j)
        return PAIR_MISS, i, j
    last_pre[0] = vx[i] * vx[i] + vy[i] * vy[i]
    last_pre[1] = vx[j] * vx[j] + vy[j] * vy[j]
    vx[i] -= vrel * nx
    vy[i] -= vrel * ny
    vx[j] += vrel * nx
    vy[j] += vrel * ny
    px[i] += nx * (0.5 * NUDGE)
    py[i] += ny * (0.5 * NUDGE)
    px[j] -= nx * (0.5 * NUDGE)
    py[j] -= ny * (0.5 * NUDGE)
    _refresh(G, S, i, j)
    return PAIR, i, j


@njit(cache=True)
def run_events(G, S, last_pre, n_events):
    done = 0
    while done < n_events:
        kind, i, j = step(G, S, last_pre)
        if kind == -1:
            break
        done += 1
    return done


@njit(cache=True)
def run_until(G, S, last_pre, t_end):
    px, py, vx, vy = S[0], S[1], S[2], S[3]
    wall_t = S[5]
    pair_t = S[9]
    clock = S[10]
    done = 0
    while True:
        t_next = INF
        for i in range(wall_t.shape[0]):
            if wall_t[i] < t_next:
                t_next = wall_t[i]
        for k in range(pair_t.shape[0]):
            if pair_t[k] < t_next:
                t_next = pair_t[k]
        if t_next >= t_end:
            break
        kind, i, j = step(G, S, last_pre)
        if kind == -1:
            break
        done += 1
    dt = t_end - clock[0]
    if dt > 0.0:
        for m in range(px.shape[0]):
            px[m] += vx[m] * dt
            py[m] += vy[m] * dt
        clock[0] = t_end
    return done


@njit(cache=True)
def collect_cross(G, S, last_pre, n_want, t_cap, max_events, out):
    """Run until n_want cross-cell collisions are recorded.

    Each row of out: time, i, j, ei_pre, ej_pre, ei_post, ej_post,
    cell_i, cell0_pre, cell1_pre.  Returns (collected, status, events).
    """
    px, py, vx, vy, cell, wall_t, wall_rec, pair_i, pair_j, pair_t, clock = S
    n = px.shape[0]
    got = 0
    ev = 0
    while got < n_want:
        if clock[0] >= t_cap:
            return got, TIME_CAP, ev
        if ev >= max_events:
            return got, EVENT_CAP, ev
        kind, i, j = step(G, S, last_pre)
        ev += 1
        if kind == -1:
            return got, STATIC, ev
        if clock[0] > t_cap:
            return got, TIME_CAP, ev
        if kind != PAIR or cell[i] == cell[j]:
            continue
        ei_post = vx[i] * vx[i] + vy[i] * vy[i]
        ej_post = vx[j] * vx[j] + vy[j] * vy[j]
        e0 = 0.0
        e1 = 0.0
        for m in range(n):
            em = vx[m] * vx[m] + vy[m] * vy[m]
            if cell[m] == 0:
                e0 += em
            else:
                e1 += em
        # pre-collision cell energies from the recorded pair energies
        if cell[i] == 0:
            e0 += last_pre[0] - ei_post
            e1 += last_pre[1] - ej_post
        else:
            e1 += last_pre[0] - ei_post
            e0 += last_pre[1] - ej_post
        out[got, 0] = clock[0]
        out[got, 1] = i
        out[got, 2] = j
        out[got, 3] = last_pre[0]
        out[got, 4] = last_pre[1]
        out[got, 5] = ei_post
        out[got, 6] = ej_post
        out[got, 7] = cell[i]
        out[got, 8] = e0
        out[got, 9] = e1
        got += 1
    return got, OK, ev


@njit(cache=True)
def run_until_cells_above(G, S, last_pre, threshold, t_cap, max_events):
    """First time every cell energy is >= threshold; cell count is 2.

    Returns (time, status, events); energies change only at pair events.
    """
    px, py, vx, vy, cell = S[0], S[1], S[2], S[3], S[4]
    clock = S[10]
    n = px.shape[0]
    ev = 0
    while True:
        if clock[0] >= t_cap:
            return clock[0], TIME_CAP, ev
        if ev >= max_events:
            return clock[0], EVENT_CAP, ev
        kind, i, j = step(G, S, last_pre)
        ev += 1
        if kind == -1:
            return clock[0], STATIC, ev
        if kind != PAIR:
            continue
        e0 = 0.0
        e1 = 0.0
        for m in range(n):
            em = vx[m] * vx[m] + vy[m] * vy[m]
            if cell[m] == 0:
                e0 += em
            else:
                e1 += em
        if e0 >= threshold and e1 >= threshold:
            return clock[0], OK, ev


@njit(cache=True)
def _clear_of_others(pos, fixed, i, x, y, two_r2):
    for m in range(fixed.shape[0]):
        dx = x - fixed[m, 0]
        dy = y - fixed[m, 1]
        if dx * dx + dy * dy < two_r2:
            return False
    for m in range(pos.shape[0]):
        if m == i:
            continue
        dx = x - pos[m, 0]
        dy = y - pos[m, 1]
        if dx * dx + dy * dy < two_r2:
            return False
    return True


@njit(cache=True)
def place_disks(rec_tag, rec_p, cell_lo, cell_hi, boxes, cells, r, fixed,
                n_sweeps, uniforms):
    """Uniform admissible placement: sequential seed, Metropolis sweeps.

    Disks are first inserted sequentially (each drawn uniformly on its
    cell's admissible region until it clears everything placed so far and
    the fixed obstacle centers), then n_sweeps single-disk Metropolis
    sweeps run with uniform-admissible proposals accepted only when the
    proposal clears all other centers.  The uniform measure on the
    non-overlapping product is stationary for those moves, so the sweeps
    remove the insertion-order bias of the seed.  boxes[c] = (x0, y0, dx,
    dy) bounds cell c.  Returns (positions, used, ok); ok False means the
    uniform pool ran out and the caller should retry with a fresh pool.
    """
    n = cells.shape[0]
    pos = np.empty((n, 2))
    two_r2 = 4.0 * r * r
    u = 0
    total = uniforms.shape[0]
    for i in range(n):
        c = cells[i]
        placed = False
        while u + 2 <= total:
            x = boxes[c, 0] + boxes[c, 2] * uniforms[u]
            y = boxes[c, 1] + boxes[c, 3] * uniforms[u + 1]
            u += 2
            if not _admissible(rec_tag, rec_p, cell_lo[c], cell_hi[c], x, y, r):
                continue
            if _clear_of_others(pos[:i], fixed, -1, x, y, two_r2):
                pos[i, 0] = x
                pos[i, 1] = y
                placed = True
                break
        if not placed:
            return pos, u, False
    for _ in range(n_sweeps):
        for i in range(n):
            c = cells[i]
            while True:
                if u + 2 > total:
                    return pos, u, False
                x = boxes[c, 0] + boxes[c, 2] * uniforms[u]
                y = boxes[c, 1] + boxes[c, 3] * uniforms[u + 1]
                u += 2
                if _admissible(rec_tag, rec_p, cell_lo[c], cell_hi[c], x, y, r):
                    break
            if _clear_of_others(pos, fixed, i, x, y, two_r2):
                pos[i, 0] = x
                pos[i, 1] = y
    return pos, u, True


_pack_cache: dict = {}


def get_packed(geometry: CellGeometry):
    """Cached (records, boxes) arrays for one geometry object."""
    key = id(geometry)
    hit = _pack_cache.get(key)
    if hit is not None and hit[0] is geometry:
        return hit[1], hit[2]
    G = pack_geometry(geometry)
    boxes = np.empty((geometry.n_cells, 4))
    for c, (x_lo, x_hi, y_lo, y_hi) in enumerate(geometry.cells):
        boxes[c, 0] = x_lo
        boxes[c, 1] = y_lo
        boxes[c, 2] = x_hi - x_lo
        boxes[c, 3] = y_hi - y_lo
    if len(_pack_cache) > 64:
        _pack_cache.clear()
    _pack_cache[key] = (geometry, G, boxes)
    return G, boxes
