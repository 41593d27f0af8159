"""Hard-disk billiards in chains of chaotic cells joined by narrow gates."""

from .geometry import Arc, CellGeometry, Segment, circle_table, multi_cell_table
from .dynamics import Simulator
from .sampling import (
    bath_refresh,
    sample_cell_energy_conditioned,
    sample_conditional_liouville,
    sample_positions,
    sample_velocities_on_shell,
)

__all__ = [
    "Arc",
    "Segment",
    "CellGeometry",
    "circle_table",
    "multi_cell_table",
    "Simulator",
    "sample_conditional_liouville",
    "sample_velocities_on_shell",
    "sample_cell_energy_conditioned",
    "bath_refresh",
]
