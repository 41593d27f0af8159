"""Stochastic energy exchange chain.

A chain of N sites carries nonnegative energies.  Every bond, including
the two bath bonds, rings at rate sqrt(min(left, right)); the ringing
bond repartitions energy between its endpoints through beta-distributed
participation fractions.  M (disks per cell in the underlying billiard
picture) enters only through the Beta(1, M-1) participation law.

Time is accumulated by plain float64 summation, so horizons much beyond
1e15 events lose resolution; every experiment here is far below that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModelParams",
    "EnergyChain",
    "ExchangeDraw",
    "JumpEvent",
    "ChainKernel",
    "SimulateResult",
    "clock_rate",
    "bath_rate",
    "sample_participation",
    "exchange",
    "bath_exchange",
    "ssa_step",
    "simulate",
    "sample_tail_corrected_initial",
]

# Draws below this are replaced by the polynomially corrected low-energy
# law in sample_tail_corrected_initial.
TAIL_CUTOFF = 0.01


@dataclass(frozen=True)
class ModelParams:
    """Chain size, participation parameter and bath temperatures."""

    n_sites: int
    m_disks: int
    t_left: float
    t_right: float

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if self.m_disks < 1:
            raise ValueError("m_disks must be >= 1")
        if not (self.t_left > 0.0 and self.t_right > 0.0):
            raise ValueError("bath temperatures must be positive")

    @property
    def n_bonds(self) -> int:
        return self.n_sites + 1


@dataclass
class EnergyChain:
    """Site energies plus the current process time."""

    energies: list[float]
    time: float = 0.0

    def __post_init__(self):
        self.energies = [float(e) for e in self.energies]
        if any(e < 0.0 for e in self.energies):
            raise ValueError("site energies must be nonnegative")

    def copy(self) -> "EnergyChain":
        return EnergyChain(list(self.energies), self.time)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.energies, dtype=float)


@dataclass(frozen=True)
class ExchangeDraw:
    """One event's randomness: split fraction p and participations b1, b2."""

    p: float
    b1: float
    b2: float


@dataclass(frozen=True)
class JumpEvent:
    """A resolved clock ring.

    ``pre`` and ``post`` hold (left, right) endpoint values; for a bath
    bond the bath endpoint reports the bath temperature, not an energy.
    ``flux`` is the energy moved right-to-left across the bond.
    """

    time: float
    bond: int
    pre: tuple[float, float]
    post: tuple[float, float]
    flux: float


def clock_rate(e_left: float, e_right: float) -> float:
    """Ring rate of an interior bond: sqrt of the smaller endpoint energy."""
    if e_left < 0.0 or e_right < 0.0:
        raise ValueError("energies must be nonnegative")
    return math.sqrt(e_left if e_left < e_right else e_right)


def bath_rate(temperature: float, energy: float) -> float:
    """Ring rate of a bath bond; the bath endpoint enters at its temperature."""
    if temperature <= 0.0:
        raise ValueError("bath temperature must be positive")
    if energy < 0.0:
        raise ValueError("energy must be nonnegative")
    return math.sqrt(temperature if temperature < energy else energy)


def sample_participation(m_disks: int, u: float) -> float:
    """Beta(1, M-1) participation fraction by inverse CDF.

    For M = 1 the whole cell energy takes part, so the fraction is 1.
    """
    if m_disks < 1:
        raise ValueError("m_disks must be >= 1")
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie in (0, 1)")
    if m_disks == 1:
        return 1.0
    return 1.0 - (1.0 - u) ** (1.0 / (m_disks - 1))


def exchange(e_left: float, e_right: float, draw: ExchangeDraw) -> tuple[float, float]:
    """Repartition energy across an interior bond.

    Each side exposes a beta fraction of its energy; the pooled amount is
    split p : 1-p.  The subtraction order below keeps both outputs
    nonnegative in floating point without clamping.
    """
    out_left = (1.0 - draw.p) * e_left * draw.b1
    out_right = draw.p * e_right * draw.b2
    return e_left - out_left + out_right, e_right - out_right + out_left


def bath_exchange(energy: float, temperature: float, draw: ExchangeDraw, x: float) -> float:
    """Repartition against a bath whose exposed energy is a fresh Exp(temperature) draw x."""
    out_site = energy * draw.b1
    return energy - out_site + draw.p * (out_site + x * draw.b2)


# ---------------------------------------------------------------------------
# SSA kernel
# ---------------------------------------------------------------------------


class ChainKernel:
    """Mutable event-by-event simulator for one chain replica.

    Draw order per step is fixed (wait, select, then p, b1, b2 and, for
    bath bonds, x), so incremental and full-recompute modes consume the
    stream identically and produce bit-identical trajectories.  Uniform
    draws feeding p and the participations are redrawn on exact 0.
    """

    def __init__(self, params: ModelParams, energies, time: float = 0.0,
                 rng=None, incremental: bool = True, block: int = 1024):
        self.params = params
        if len(energies) != params.n_sites:
            raise ValueError("energy vector length != n_sites")
        self.energies = [float(e) for e in energies]
        if any(e < 0.0 for e in self.energies):
            raise ValueError("site energies must be nonnegative")
        self.time = float(time)
        self.rng = np.random.default_rng() if rng is None else rng
        self.incremental = incremental
        self.frozen = False
        self.n_events = 0
        self._pexp = 1.0 / (params.m_disks - 1) if params.m_disks > 1 else None
        self._block = int(block)
        self._buf = self.rng.random(self._block).tolist()
        self._pos = 0
        self._rates = [0.0] * params.n_bonds
        self._recompute_all()

    # -- uniforms -----------------------------------------------------------

    def _uniform(self) -> float:
        pos = self._pos
        if pos == self._block:
            self._buf = self.rng.random(self._block).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]

    def _uniform_open(self) -> float:
        # strictly inside (0, 1); numpy's random() never returns 1.0
        while True:
            u = self._uniform()
            if u > 0.0:
                return u

    # -- rates --------------------------------------------------------------

    def _bond_rate(self, k: int) -> float:
        p = self.params
        e = self.energies
        if k == 0:
            a, b = p.t_left, e[0]
        elif k == p.n_sites:
            a, b = e[-1], p.t_right
        else:
            a, b = e[k - 1], e[k]
        return math.sqrt(a if a < b else b)

    def _recompute_all(self):
        rates = self._rates
        for k in range(self.params.n_bonds):
            rates[k] = self._bond_rate(k)

    def _refresh_after(self, bond: int):
        n = self.params.n_sites
        lo = bond - 1 if bond > 0 else 0
        hi = bond + 1 if bond < n else n
        for k in range(lo, hi + 1):
            self._rates[k] = self._bond_rate(k)

    # -- stepping -----------------------------------------------------------

    def step(self, t_max: float | None = None):
        """Advance one event; returns (bond, flux, pre_left, pre_right) or None.

        pre_left/pre_right are the bond endpoint energies before the event
        (bath endpoints report the bath temperature).  None means no event
        was applied: either a horizon given by t_max was reached (time is
        set to t_max) or the chain is frozen (every rate zero; the
        ``frozen`` flag is set).
        """
        if not self.incremental:
            self._recompute_all()
        rates = self._rates
        total = sum(rates)
        if total <= 0.0:
            self.frozen = True
            return None
        dt = -math.log1p(-self._uniform()) / total
        t_next = self.time + dt
        if t_max is not None and t_next > t_max:
            self.time = t_max
            return None
        self.time = t_next

        target = self._uniform() * total
        cum = 0.0
        bond = -1
        for k, r in enumerate(rates):
            cum += r
            if cum > target:
                bond = k
                break
        if bond < 0:
            # fp roundoff pushed target past the final cumulative; take the
            # last bond with positive rate
            for k in range(len(rates) - 1, -1, -1):
                if rates[k] > 0.0:
                    bond = k
                    break

        p = self.params
        e = self.energies
        pexp = self._pexp
        u = self._uniform_open()
        b1 = 1.0 if pexp is None else 1.0 - (1.0 - self._uniform_open()) ** pexp
        b2 = 1.0 if pexp is None else 1.0 - (1.0 - self._uniform_open()) ** pexp
        if bond == 0:
            x = -p.t_left * math.log1p(-self._uniform())
            pre = e[0]
            out = pre * b1
            post = pre - out + u * (out + x * b2)
            e[0] = post
            flux = pre - post
            pre_l, pre_r = p.t_left, pre
        elif bond == p.n_sites:
            x = -p.t_right * math.log1p(-self._uniform())
            pre = e[-1]
            out = pre * b1
            post = pre - out + u * (out + x * b2)
            e[-1] = post
            flux = post - pre
            pre_l, pre_r = pre, p.t_right
        else:
            i = bond - 1
            pre_l = e[i]
            pre_r = e[i + 1]
            out_l = (1.0 - u) * pre_l * b1
            out_r = u * pre_r * b2
            post_l = pre_l - out_l + out_r
            e[i] = post_l
            e[i + 1] = pre_r - out_r + out_l
            flux = post_l - pre_l

        if self.incremental:
            self._refresh_after(bond)
        self.n_events += 1
        return bond, flux, pre_l, pre_r

    def run_until(self, t_end: float) -> int:
        """Advance to t_end (exponential clocks allow discarding the cut draw)."""
        n0 = self.n_events
        while self.time < t_end:
            if self.step(t_end) is None:
                if self.frozen:
                    break
        return self.n_events - n0

    def chain(self) -> EnergyChain:
        return EnergyChain(list(self.energies), self.time)


def _event_from(kernel: ChainKernel, bond: int, flux: float,
                pre_l: float, pre_r: float) -> JumpEvent:
    p = kernel.params
    e = kernel.energies
    if bond == 0:
        post = (p.t_left, e[0])
    elif bond == p.n_sites:
        post = (e[-1], p.t_right)
    else:
        post = (e[bond - 1], e[bond])
    return JumpEvent(kernel.time, bond, (pre_l, pre_r), post, flux)


def ssa_step(state: EnergyChain, params: ModelParams, rng) -> tuple[JumpEvent | None, EnergyChain]:
    """Single full-recompute SSA step; reference for the kernel fast path.

    Returns (event, new state); a frozen chain (every rate zero) returns
    (None, unchanged state).
    """
    kernel = ChainKernel(params, state.energies, state.time, rng,
                         incremental=False, block=1)
    out = kernel.step()
    if out is None:
        return None, state
    return _event_from(kernel, *out), kernel.chain()


@dataclass
class SimulateResult:
    chain: EnergyChain
    n_events: int
    frozen: bool


def simulate(params: ModelParams, initial: EnergyChain, t_end: float, rng,
             observers=(), incremental: bool = True) -> SimulateResult:
    """Run one replica to t_end, feeding every JumpEvent to the observers."""
    if t_end < initial.time:
        raise ValueError("t_end lies before the initial time")
    kernel = ChainKernel(params, initial.energies, initial.time, rng,
                         incremental=incremental)
    while kernel.time < t_end:
        out = kernel.step(t_end)
        if out is None:
            if kernel.frozen:
                break
            continue
        if observers:
            ev = _event_from(kernel, *out)
            for obs in observers:
                obs(ev)
    return SimulateResult(kernel.chain(), kernel.n_events, kernel.frozen)


def sample_tail_corrected_initial(params: ModelParams, rng) -> EnergyChain:
    """Independent site energies with a polynomially corrected low tail.

    Each site draws Exp(mean (t_left + t_right) / 2); draws at or below
    TAIL_CUTOFF are replaced by TAIL_CUTOFF * U^(1 / (M - 1/2)), giving
    P[E < eps] proportional to eps^(M - 1/2) near zero.
    """
    mean = 0.5 * (params.t_left + params.t_right)
    q = 1.0 / (params.m_disks - 0.5)
    energies = []
    for _ in range(params.n_sites):
        e = -mean * math.log1p(-rng.random())
        if e <= TAIL_CUTOFF:
            e = TAIL_CUTOFF * rng.random() ** q
        energies.append(e)
    return EnergyChain(energies, 0.0)
