"""Empirical complementary CDF with right censoring."""

from __future__ import annotations

import numpy as np

__all__ = ["EmpiricalCCDF"]


class EmpiricalCCDF:
    """Survival function of a sample, with mass censored above a cap.

    Censored observations are known only to exceed ``cap``; they count as
    "above t" for every t below the cap, and the curve is not defined at
    or beyond the cap.
    """

    def __init__(self, samples, censored: int = 0, cap: float | None = None):
        self.samples = np.sort(np.asarray(samples, dtype=float))
        if self.samples.size and not np.isfinite(self.samples[-1]):
            raise ValueError("samples must be finite; censor at a cap instead")
        self.censored = int(censored)
        self.cap = None if cap is None else float(cap)
        if self.censored and self.cap is None:
            raise ValueError("censored mass needs a cap")
        if self.cap is not None and self.samples.size and self.samples[-1] >= self.cap:
            raise ValueError("uncensored samples must lie below the cap")
        if self.n_total == 0:
            raise ValueError("empty sample")

    @classmethod
    def from_samples(cls, values, cap: float | None = None) -> "EmpiricalCCDF":
        """Split raw values at the cap; values at or above it become censored."""
        values = np.asarray(values, dtype=float)
        if cap is None:
            return cls(values)
        keep = values < cap
        return cls(values[keep], censored=int(np.sum(~keep)), cap=cap)

    @property
    def n_uncensored(self) -> int:
        return int(self.samples.size)

    @property
    def n_total(self) -> int:
        return self.n_uncensored + self.censored

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.n_total

    def ccdf(self, t):
        """P[X > t] with strict inequality; scalar or array t."""
        t = np.asarray(t, dtype=float)
        above = self.samples.size - np.searchsorted(self.samples, t, side="right")
        out = (above + self.censored) / self.n_total
        return float(out) if t.ndim == 0 else out

    def stderr(self, t):
        """Binomial standard error of the ccdf estimate at t."""
        p = self.ccdf(t)
        return np.sqrt(np.asarray(p) * (1.0 - p) / self.n_total)

    def quantile(self, q: float) -> float:
        """Smallest sample value with at least a fraction q of mass at or below it.

        Censored mass sits above every uncensored value, so quantiles
        inside the censored region are unavailable.
        """
        if not 0.0 < q <= 1.0:
            raise ValueError("q must lie in (0, 1]")
        k = int(np.ceil(q * self.n_total)) - 1
        if k >= self.n_uncensored:
            raise ValueError("quantile falls in the censored region")
        return float(self.samples[k])
