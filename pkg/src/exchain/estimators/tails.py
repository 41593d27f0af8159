"""Tail fits on empirical survival curves.

Both fitters evaluate the CCDF on a grid spanning a data-driven window
and run ordinary least squares on the transformed curve: log ccdf vs t
for exponential tails, log ccdf vs log t for polynomial tails.  The grid
(linear or geometric to match the transform) mirrors how a slope is read
off the corresponding plot and keeps dense sample regions from dominating
the fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ccdf import EmpiricalCCDF

__all__ = ["WindowPolicy", "TailFit", "fit_exponential_tail", "fit_polynomial_tail"]


@dataclass(frozen=True)
class WindowPolicy:
    """Data-driven fit window.

    The window starts at the head_quantile sample quantile (dropping the
    non-asymptotic head) and ends at the largest sample still having
    min_tail_count observations above it (dropping the noisy extreme
    tail).  Polynomial fits additionally demand min_decades of t-span.
    """

    head_quantile: float = 0.10
    min_tail_count: int = 100
    min_decades: float = 1.0
    n_grid: int = 200

    def window(self, curve: EmpiricalCCDF) -> tuple[float, float]:
        n = curve.n_total
        if curve.n_uncensored < max(self.min_tail_count + 10, 50):
            raise ValueError("too few uncensored samples for a tail fit")
        t_lo = curve.quantile(self.head_quantile)
        # largest uncensored value with >= min_tail_count samples above it;
        # censored mass counts as above, but the window never reaches the cap
        above = self.min_tail_count - curve.censored
        if above < 1:
            t_hi = float(curve.samples[-1])
        else:
            t_hi = float(curve.samples[curve.n_uncensored - above - 1])
        if not t_hi > t_lo:
            raise ValueError("degenerate fit window")
        return t_lo, t_hi


@dataclass(frozen=True)
class TailFit:
    """OLS line on a transformed survival curve.

    slope/intercept describe log ccdf = slope * x + intercept with x = t
    (kind "exp") or x = log t (kind "power").  rate and exponent are the
    sign-flipped slope for the respective kind.
    """

    kind: str
    slope: float
    intercept: float
    stderr: float
    r_squared: float
    t_lo: float
    t_hi: float
    n_points: int

    @property
    def rate(self) -> float:
        if self.kind != "exp":
            raise AttributeError("rate is defined for exponential fits")
        return -self.slope

    @property
    def exponent(self) -> float:
        if self.kind != "power":
            raise AttributeError("exponent is defined for polynomial fits")
        return -self.slope


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    n = x.size
    xm = x.mean()
    ym = y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - slope * x - intercept
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else float("nan")
    return slope, intercept, r2, stderr


def _fit(curve: EmpiricalCCDF, policy: WindowPolicy, window, kind: str) -> TailFit:
    t_lo, t_hi = policy.window(curve) if window is None else map(float, window)
    if kind == "power":
        if t_lo <= 0.0:
            raise ValueError("polynomial tail needs positive window start")
        if math.log10(t_hi / t_lo) < policy.min_decades:
            raise ValueError(
                "window spans %.2f decades, below the required %.2f"
                % (math.log10(t_hi / t_lo), policy.min_decades)
            )
        grid = np.geomspace(t_lo, t_hi, policy.n_grid)
    else:
        grid = np.linspace(t_lo, t_hi, policy.n_grid)
    y = curve.ccdf(grid)
    keep = y > 0.0
    grid, y = grid[keep], y[keep]
    if grid.size < 10:
        raise ValueError("fit window contains too few usable grid points")
    x = np.log(grid) if kind == "power" else grid
    slope, intercept, r2, stderr = _ols(x, np.log(y))
    return TailFit(kind, slope, intercept, stderr, r2, t_lo, t_hi, grid.size)


def fit_exponential_tail(curve: EmpiricalCCDF, policy: WindowPolicy = WindowPolicy(),
                         window: tuple[float, float] | None = None) -> TailFit:
    """Fit log ccdf = -rate * t + c over the policy window."""
    return _fit(curve, policy, window, "exp")


def fit_polynomial_tail(curve: EmpiricalCCDF, policy: WindowPolicy = WindowPolicy(),
                        window: tuple[float, float] | None = None) -> TailFit:
    """Fit log ccdf = -exponent * log t + c over the policy window."""
    return _fit(curve, policy, window, "power")
