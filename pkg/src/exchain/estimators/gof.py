"""Thin goodness-of-fit helpers with pinned conventions."""

from __future__ import annotations

import numpy as np
from scipy import stats

__all__ = ["ks_statistic", "chi_square_pvalue"]


def ks_statistic(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance against a CDF callable."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)


def chi_square_pvalue(counts, probs, ddof: int = 0) -> float:
    """Pearson chi-square p-value of observed counts against cell probabilities.

    probs are renormalized; ddof counts parameters fitted from the data.
    """
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if counts.shape != probs.shape:
        raise ValueError("counts and probs must have matching shapes")
    if np.any(probs <= 0.0):
        raise ValueError("all cell probabilities must be positive")
    expected = probs / probs.sum() * counts.sum()
    return float(stats.chisquare(counts, expected, ddof=ddof).pvalue)
