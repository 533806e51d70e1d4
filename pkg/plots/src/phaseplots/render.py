"""Render phase-transition curves from sweep CSV files as deterministic SVG.

The input is the sweep harness CSV (columns n, p, r, trial, seed, mode,
outcome, max_component, unique_rm1_balls, path_pair_count, good_edge_count,
elapsed_ms). Rows are grouped by (n, r, mode); within a group each distinct
p becomes one point: success frequency with a Wilson 95% interval. Named
threshold functions of (n, r) can be overlaid as vertical guide lines.

Output is hand-written SVG with fixed float formatting, so rendering is a
pure function of the CSV text and the spec: identical inputs give
byte-identical documents.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

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


class PlotError(ValueError):
    """Raised for malformed CSV input or an unusable plot spec."""


# =========================================================================
# Threshold vocabulary (names shared verbatim with the sweep harness)
# =========================================================================

THRESHOLDS: dict[str, Callable[[int, int], float]] = {
    # n^(-(2r+1)/(2r)): boundary of the path-pair witness regime
    "path_pair": lambda n, r: float(n) ** (-(2 * r + 1) / (2 * r)),
    # log n / (r n)
    "log_rn": lambda n, r: math.log(n) / (r * n),
    # sqrt(log n / (25 n))
    "sqrt_log_25n": lambda n, r: math.sqrt(math.log(n) / (25 * n)),
    # n^(-3/4) * (log n)^(1/4)
    "n34_log14": lambda n, r: float(n) ** -0.75 * math.log(n) ** 0.25,
    # (log n)^2 / (n (log log n)^3)
    "log2_llog3": lambda n, r: math.log(n) ** 2
    / (n * math.log(math.log(n)) ** 3),
}

GROUP_KEYS = ("n", "r", "mode")

_REQUIRED_COLUMNS = ("n", "p", "r", "mode", "outcome")

_SUCCESS_OUTCOMES = {
    "reconstruct": frozenset({"EXACT", "ISOMORPHIC"}),
    "witness": frozenset({"WITNESS_FOUND"}),
}


# =========================================================================
# Spec and aggregation
# =========================================================================


@dataclass(frozen=True)
class PlotSpec:
    """What to plot: which CSV, which overlays, where to write the SVG."""

    csv_path: Path
    out_path: Path
    group_by: tuple[str, ...] = GROUP_KEYS
    overlays: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if tuple(self.group_by) != GROUP_KEYS:
            raise PlotError(f"group_by must be {GROUP_KEYS}")
        for name in self.overlays:
            if name not in THRESHOLDS:
                raise PlotError(
                    f"unknown overlay {name!r}; expected one of "
                    f"{sorted(THRESHOLDS)}"
                )


@dataclass(frozen=True)
class Cell:
    """One plotted point: a (n, r, mode, p) cell aggregated over trials."""

    n: int
    r: int
    mode: str
    p: float
    trials: int
    successes: int
    frequency: float
    wilson_low: float
    wilson_high: float


def wilson_interval(
    successes: int, trials: int, z: float = 1.96
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clipped to [0, 1]."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = phat + z2 / (2 * trials)
    margin = z * math.sqrt(
        phat * (1.0 - phat) / trials + z2 / (4 * trials * trials)
    )
    low = min((centre - margin) / denom, phat)
    high = max((centre + margin) / denom, phat)
    return max(0.0, low), min(1.0, high)


def _is_success(mode: str, outcome: str) -> bool:
    kind = mode.split(":", 1)[0]
    if kind not in _SUCCESS_OUTCOMES:
        raise PlotError(f"unknown mode kind in {mode!r}")
    return outcome in _SUCCESS_OUTCOMES[kind]


def read_cells(csv_path: Path) -> list[Cell]:
    """Aggregate a sweep CSV into per-(n, r, mode, p) cells.

    Raises PlotError when referenced columns are missing, the body is
    empty, or a row fails to parse.
    """
    with open(csv_path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [c for c in _REQUIRED_COLUMNS if c not in header]
        if missing:
            raise PlotError(f"CSV is missing columns: {', '.join(missing)}")
        counts: dict[tuple[int, int, str, float], list[int]] = {}
        for row in reader:
            try:
                key = (
                    int(row["n"]),
                    int(row["r"]),
                    row["mode"],
                    float(row["p"]),
                )
                success = _is_success(row["mode"], row["outcome"])
            except (TypeError, KeyError, ValueError) as exc:
                if isinstance(exc, PlotError):
                    raise
                raise PlotError(
                    f"unparsable row {reader.line_num}: {exc}"
                ) from exc
            tally = counts.setdefault(key, [0, 0])
            tally[0] += 1
            tally[1] += int(success)
    if not counts:
        raise PlotError("CSV has no data rows")
    cells = []
    for (n, r, mode, p), (trials, successes) in sorted(counts.items()):
        low, high = wilson_interval(successes, trials)
        cells.append(
            Cell(
                n=n,
                r=r,
                mode=mode,
                p=p,
                trials=trials,
                successes=successes,
                frequency=successes / trials,
                wilson_low=low,
                wilson_high=high,
            )
        )
    return cells


# =========================================================================
# SVG rendering
# =========================================================================

_WIDTH, _HEIGHT = 640.0, 440.0
_LEFT, _RIGHT, _TOP, _BOTTOM = 70.0, 620.0, 30.0, 390.0

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_STYLE = (
    "text { font-family: monospace; font-size: 11px; fill: #222222; } "
    ".axis { stroke: #222222; stroke-width: 1; } "
    ".grid { stroke: #dddddd; stroke-width: 1; } "
    ".guide { stroke: #555555; stroke-width: 1; stroke-dasharray: 4 3; }"
)


def _fmt(value: float) -> str:
    """Pixel coordinates: fixed two decimals keeps the byte stream stable."""
    return f"{value:.2f}"


def _sig(value: float) -> str:
    """Data values: six significant figures."""
    return f"{value:.6g}"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


@dataclass
class _Axes:
    lo: float
    hi: float

    def x(self, p: float) -> float:
        frac = (math.log10(p) - self.lo) / (self.hi - self.lo)
        return _LEFT + frac * (_RIGHT - _LEFT)

    @staticmethod
    def y(frequency: float) -> float:
        return _BOTTOM - frequency * (_BOTTOM - _TOP)


def _axes_for(ps: list[float]) -> _Axes:
    logs = [math.log10(p) for p in ps]
    lo, hi = min(logs), max(logs)
    if hi - lo < 1e-9:
        # a single p value: centre it inside one decade
        lo, hi = lo - 0.5, hi + 0.5
    else:
        pad = 0.05 * (hi - lo)
        lo, hi = lo - pad, hi + pad
    return _Axes(lo=lo, hi=hi)


def _axis_elements(axes: _Axes) -> list[str]:
    parts = [
        f'<rect x="0" y="0" width="{_fmt(_WIDTH)}" height="{_fmt(_HEIGHT)}" '
        'fill="#ffffff"/>',
        f'<line class="axis" x1="{_fmt(_LEFT)}" y1="{_fmt(_BOTTOM)}" '
        f'x2="{_fmt(_RIGHT)}" y2="{_fmt(_BOTTOM)}"/>',
        f'<line class="axis" x1="{_fmt(_LEFT)}" y1="{_fmt(_TOP)}" '
        f'x2="{_fmt(_LEFT)}" y2="{_fmt(_BOTTOM)}"/>',
    ]
    for k in range(5):
        f = k / 4
        y = axes.y(f)
        parts.append(
            f'<line class="grid" x1="{_fmt(_LEFT)}" y1="{_fmt(y)}" '
            f'x2="{_fmt(_RIGHT)}" y2="{_fmt(y)}"/>'
        )
        parts.append(
            f'<text x="{_fmt(_LEFT - 8)}" y="{_fmt(y + 4)}" '
            f'text-anchor="end">{f:.2f}</text>'
        )
    decades = range(math.ceil(axes.lo), math.floor(axes.hi) + 1)
    ticks = [(float(k), f"1e{k}") for k in decades]
    if not ticks:
        ticks = [(axes.lo, _sig(10.0**axes.lo)), (axes.hi, _sig(10.0**axes.hi))]
    for logp, label in ticks:
        x = axes.x(10.0**logp)
        parts.append(
            f'<line class="axis" x1="{_fmt(x)}" y1="{_fmt(_BOTTOM)}" '
            f'x2="{_fmt(x)}" y2="{_fmt(_BOTTOM + 5)}"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(_BOTTOM + 18)}" '
            f'text-anchor="middle">{label}</text>'
        )
    parts.append(
        f'<text x="{_fmt((_LEFT + _RIGHT) / 2)}" y="{_fmt(_HEIGHT - 8)}" '
        'text-anchor="middle">p (log scale)</text>'
    )
    parts.append(
        f'<text x="14" y="{_fmt((_TOP + _BOTTOM) / 2)}" '
        'text-anchor="middle" transform="rotate(-90 14 '
        f'{_fmt((_TOP + _BOTTOM) / 2)})">success frequency</text>'
    )
    return parts


def _group_elements(
    axes: _Axes, cells: list[Cell], colour: str
) -> list[str]:
    parts = []
    points = [(axes.x(c.p), axes.y(c.frequency)) for c in cells]
    if len(cells) >= 2:
        band = [(axes.x(c.p), axes.y(c.wilson_high)) for c in cells]
        band += [(axes.x(c.p), axes.y(c.wilson_low)) for c in reversed(cells)]
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in band)
        parts.append(
            f'<polygon points="{path}" fill="{colour}" fill-opacity="0.2" '
            'stroke="none"/>'
        )
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{colour}" '
            'stroke-width="1.5"/>'
        )
    for cell, (x, y) in zip(cells, points):
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(axes.y(cell.wilson_low))}" '
            f'x2="{_fmt(x)}" y2="{_fmt(axes.y(cell.wilson_high))}" '
            f'stroke="{colour}" stroke-opacity="0.6" stroke-width="1"/>'
        )
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{colour}" '
            f'data-p="{_sig(cell.p)}" data-frequency="{_sig(cell.frequency)}"/>'
        )
    return parts


def render_svg(cells: list[Cell], overlays: tuple[str, ...] = ()) -> str:
    """Pure SVG rendering of aggregated cells plus overlay guides."""
    if not cells:
        raise PlotError("nothing to plot")
    groups: dict[tuple[int, int, str], list[Cell]] = {}
    for cell in cells:
        groups.setdefault((cell.n, cell.r, cell.mode), []).append(cell)
    guides: list[tuple[str, int, int, float]] = []
    seen = set()
    for name in overlays:
        if name not in THRESHOLDS:
            raise PlotError(f"unknown overlay {name!r}")
        for n, r, _mode in sorted(groups):
            value = THRESHOLDS[name](n, r)
            key = (name, _sig(value))
            if key not in seen:
                seen.add(key)
                guides.append((name, n, r, value))
    axes = _axes_for([c.p for c in cells] + [g[3] for g in guides])
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(_WIDTH)}" '
        f'height="{_fmt(_HEIGHT)}" viewBox="0 0 {_fmt(_WIDTH)} '
        f'{_fmt(_HEIGHT)}">',
        f"<style>{_STYLE}</style>",
    ]
    parts += _axis_elements(axes)
    for name, n, r, value in guides:
        x = axes.x(value)
        parts.append(
            f'<line class="guide" data-name="{name}" data-n="{n}" '
            f'data-r="{r}" data-p="{_sig(value)}" x1="{_fmt(x)}" '
            f'y1="{_fmt(_TOP)}" x2="{_fmt(x)}" y2="{_fmt(_BOTTOM)}"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + 3)}" y="{_fmt(_TOP + 10)}" '
            f'fill="#555555">{_escape(name)}</text>'
        )
    for i, key in enumerate(sorted(groups)):
        colour = _PALETTE[i % len(_PALETTE)]
        group_cells = sorted(groups[key], key=lambda c: c.p)
        parts += _group_elements(axes, group_cells, colour)
        n, r, mode = key
        label_y = _TOP + 14 + 14 * i
        parts.append(
            f'<rect x="{_fmt(_LEFT + 8)}" y="{_fmt(label_y - 8)}" width="10" '
            f'height="10" fill="{colour}"/>'
        )
        parts.append(
            f'<text x="{_fmt(_LEFT + 22)}" y="{_fmt(label_y + 1)}">'
            f"n={n} r={r} {_escape(mode)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(spec: PlotSpec) -> Path:
    """Aggregate the spec's CSV and write the SVG; returns the output path."""
    cells = read_cells(spec.csv_path)
    svg = render_svg(cells, spec.overlays)
    spec.out_path.write_text(svg, encoding="utf-8")
    return spec.out_path
