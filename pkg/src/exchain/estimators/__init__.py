"""Statistical estimators shared by the chain and billiard experiments."""

from .ccdf import EmpiricalCCDF
from .tails import TailFit, WindowPolicy, fit_exponential_tail, fit_polynomial_tail
from .gof import chi_square_pvalue, ks_statistic

__all__ = [
    "EmpiricalCCDF",
    "TailFit",
    "WindowPolicy",
    "fit_exponential_tail",
    "fit_polynomial_tail",
    "chi_square_pvalue",
    "ks_statistic",
]
