"""Energy exchange chains, two-cell billiards, and their estimators."""

__version__ = "0.1.0"

from . import chain  # noqa: F401
