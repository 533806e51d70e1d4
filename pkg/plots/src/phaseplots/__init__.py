"""Phase-transition plots for graph shotgun assembly sweep CSVs."""

from __future__ import annotations

from .render import (
    GROUP_KEYS,
    THRESHOLDS,
    Cell,
    PlotError,
    PlotSpec,
    read_cells,
    render,
    render_svg,
    wilson_interval,
)

__all__ = [
    "GROUP_KEYS",
    "THRESHOLDS",
    "Cell",
    "PlotError",
    "PlotSpec",
    "read_cells",
    "render",
    "render_svg",
    "wilson_interval",
]
