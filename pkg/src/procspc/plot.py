"""Standalone SVG control charts.

Output is plain SVG 1.1 text built from formatted strings, so identical
inputs give byte-identical files.  Coordinates are rounded to 0.01 px.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .core import ChartSeries, ControlLimits, Forecast, validate_limits
from .errors import EmptySeries, IoError
from .forecaster import FittedModel, components

PASS_FILL = "#d4edda"
AT_RISK_FILL = "#fff3cd"
CRITICAL_FILL = "#f8d7da"
LIMIT_STYLE = {
    "USL": "#c0392b",
    "UCL": "#e67e22",
    "Target": "#2c3e50",
    "LCL": "#e67e22",
    "LSL": "#c0392b",
}
ACTUAL_COLOR = "#1f4e79"
FORECAST_COLOR = "#8e44ad"
RIBBON_FILL = "#d7bde2"

MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 150, 50, 60


@dataclass(frozen=True)
class PlotSpec:
    width_px: int = 1200
    height_px: int = 700
    show_interval: bool = True
    zone_shading: bool = True

    def __post_init__(self):
        if self.width_px < 100 or self.height_px < 100:
            raise ValueError("plot dimensions must be at least 100 px")


def chart_filename(chart_id: str, suffix: str = ".svg") -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", chart_id) + suffix


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class _Axis:
    """Linear map from data range [lo, hi] to pixel range [p0, p1]."""

    def __init__(self, lo, hi, p0, p1):
        if hi <= lo:
            pad = max(abs(lo) * 0.05, 1.0)
            lo, hi = lo - pad, hi + pad
        self.lo, self.hi, self.p0, self.p1 = float(lo), float(hi), float(p0), float(p1)

    def __call__(self, v):
        return self.p0 + (float(v) - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)

    def ticks(self, count=5):
        return np.linspace(self.lo, self.hi, count)


def _date_label(ts: float) -> str:
    return datetime.fromtimestamp(int(round(ts)), tz=timezone.utc).strftime("%Y-%m-%d %H:%M")


def _header(width, height, title):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def _write(out_path, lines):
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {out_path}: {exc}") from exc
    return os.fspath(out_path)


def _time_ticks(xa: _Axis, y_px: float, top: float):
    out = []
    for tv in xa.ticks(5):
        x = xa(tv)
        out.append(f'<line x1="{_f(x)}" y1="{_f(top)}" x2="{_f(x)}" y2="{_f(y_px)}" stroke="#eeeeee"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(y_px + 18)}" text-anchor="middle">{_date_label(tv)}</text>')
    return out


def _value_ticks(ya: _Axis, x_px: float, right: float):
    out = []
    for v in ya.ticks(6):
        y = ya(v)
        out.append(f'<line x1="{_f(x_px)}" y1="{_f(y)}" x2="{_f(right)}" y2="{_f(y)}" stroke="#eeeeee"/>')
        out.append(f'<text x="{_f(x_px - 6)}" y="{_f(y + 4)}" text-anchor="end">{v:.6g}</text>')
    return out


def render_chart(series: ChartSeries, forecasts: Sequence[Forecast], limits: ControlLimits,
                 spec: PlotSpec | None = None, out_path="chart.svg") -> str:
    """Control chart: measurements, forecast line and ribbon, five limit lines, zone bands."""
    spec = spec or PlotSpec()
    if series is None or len(series) == 0:
        raise EmptySeries("nothing to plot")
    validate_limits(limits)
    forecasts = sorted(forecasts, key=lambda f: f.ds)
    W, H = spec.width_px, spec.height_px
    left, right = MARGIN_LEFT, W - MARGIN_RIGHT
    top, bottom = MARGIN_TOP, H - MARGIN_BOTTOM

    times = [float(v) for v in series.ds] + [float(f.ds) for f in forecasts]
    values = [float(v) for v in series.y] + [f.yhat for f in forecasts]
    if spec.show_interval:
        values += [f.yhat_lower for f in forecasts] + [f.yhat_upper for f in forecasts]
    lo = min(min(values), limits.lsl)
    hi = max(max(values), limits.usl)
    pad = 0.05 * (hi - lo) if hi > lo else max(abs(hi) * 0.05, 1.0)
    xa = _Axis(min(times), max(times), left, right)
    ya = _Axis(lo - pad, hi + pad, bottom, top)

    out = _header(W, H, f"SPC chart {series.chart_id}")
    out.append(f'<text x="{_f(left)}" y="28" font-size="16" font-weight="bold">'
               f'{escape(series.chart_id)} ({escape(series.group)})</text>')

    if spec.zone_shading:
        bands = [
            ("critical-low", ya.lo, limits.lsl, CRITICAL_FILL),
            ("at-risk-low", limits.lsl, limits.lcl, AT_RISK_FILL),
            ("pass", limits.lcl, limits.ucl, PASS_FILL),
            ("at-risk-high", limits.ucl, limits.usl, AT_RISK_FILL),
            ("critical-high", limits.usl, ya.hi, CRITICAL_FILL),
        ]
        out.append('<g class="zones">')
        for name, b0, b1, fill in bands:
            if b1 <= b0:
                continue
            y0, y1 = ya(b1), ya(b0)
            out.append(f'<rect class="zone zone-{name}" x="{_f(left)}" y="{_f(y0)}" '
                       f'width="{_f(right - left)}" height="{_f(y1 - y0)}" fill="{fill}"/>')
        out.append("</g>")

    out.extend(_time_ticks(xa, bottom, top))
    out.extend(_value_ticks(ya, left, right))
    out.append(f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(right - left)}" height="{_f(bottom - top)}" '
               f'fill="none" stroke="#555555"/>')

    out.append('<g class="limits">')
    for name, value in (("USL", limits.usl), ("UCL", limits.ucl), ("Target", limits.target),
                        ("LCL", limits.lcl), ("LSL", limits.lsl)):
        y = ya(value)
        dash = ' stroke-dasharray="6,4"' if name in ("UCL", "LCL") else ""
        out.append(f'<line class="limit-line" data-limit="{name}" x1="{_f(left)}" y1="{_f(y)}" '
                   f'x2="{_f(right)}" y2="{_f(y)}" stroke="{LIMIT_STYLE[name]}" stroke-width="1.5"{dash}/>')
        out.append(f'<text class="limit-label" data-limit="{name}" x="{_f(right + 6)}" y="{_f(y + 4)}" '
                   f'fill="{LIMIT_STYLE[name]}">{name} {value:.6g}</text>')
    out.append("</g>")

    if forecasts and spec.show_interval:
        upper = " ".join(f"{_f(xa(f.ds))},{_f(ya(f.yhat_upper))}" for f in forecasts)
        lower = " ".join(f"{_f(xa(f.ds))},{_f(ya(f.yhat_lower))}" for f in reversed(forecasts))
        out.append(f'<polygon class="interval" points="{upper} {lower}" fill="{RIBBON_FILL}" '
                   f'fill-opacity="0.6" stroke="none"/>')

    out.append('<g class="actual">')
    for d, v in zip(series.ds, series.y):
        out.append(f'<circle class="actual-point" cx="{_f(xa(d))}" cy="{_f(ya(v))}" r="2.5" fill="{ACTUAL_COLOR}"/>')
    out.append("</g>")

    if forecasts:
        pts = " ".join(f"{_f(xa(f.ds))},{_f(ya(f.yhat))}" for f in forecasts)
        out.append(f'<polyline class="forecast" points="{pts}" fill="none" stroke="{FORECAST_COLOR}" stroke-width="2"/>')
        out.append('<g class="forecast-points">')
        for f in forecasts:
            out.append(f'<circle class="forecast-point" cx="{_f(xa(f.ds))}" cy="{_f(ya(f.yhat))}" r="3" '
                       f'fill="{FORECAST_COLOR}"/>')
        out.append("</g>")

    out.append("</svg>")
    return _write(out_path, out)


def render_decomposition(model: FittedModel, timestamps, out_path="components.svg",
                         spec: PlotSpec | None = None, title: str = "components") -> str:
    """One stacked panel for the trend and one per fitted seasonality.

    Each panel group carries ``data-ymin``/``data-ymax`` so the plotted
    polyline can be mapped back to component values.
    """
    spec = spec or PlotSpec()
    ds = np.asarray(sorted(int(v) for v in timestamps), dtype=np.int64)
    if ds.size == 0:
        raise EmptySeries("no timestamps to decompose")
    parts = components(model, ds)
    W = spec.width_px
    panel_h = 220
    gap = 40
    H = MARGIN_TOP + len(parts) * (panel_h + gap) + MARGIN_BOTTOM
    left, right = MARGIN_LEFT, W - MARGIN_RIGHT
    xa = _Axis(float(ds[0]), float(ds[-1]), left, right)

    out = _header(W, H, f"Components {title}")
    out.append(f'<text x="{_f(left)}" y="28" font-size="16" font-weight="bold">{escape(title)}</text>')
    for i, (name, values) in enumerate(parts.items()):
        top = MARGIN_TOP + i * (panel_h + gap)
        bottom = top + panel_h
        vmin, vmax = float(np.min(values)), float(np.max(values))
        ya = _Axis(vmin, vmax, bottom, top)
        out.append(f'<g class="panel" data-component={quoteattr(name)} '
                   f'data-ymin="{ya.lo!r}" data-ymax="{ya.hi!r}" data-top="{top}" data-bottom="{bottom}">')
        out.append(f'<text x="{_f(left)}" y="{_f(top - 8)}" font-weight="bold">{escape(name)}</text>')
        out.extend(_value_ticks(ya, left, right))
        out.append(f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(right - left)}" height="{panel_h}" '
                   f'fill="none" stroke="#555555"/>')
        pts = " ".join(f"{_f(xa(d))},{_f(ya(v))}" for d, v in zip(ds, values))
        out.append(f'<polyline class="component" points="{pts}" fill="none" stroke="{ACTUAL_COLOR}" stroke-width="1.5"/>')
        out.append("</g>")
    out.extend(_time_ticks(xa, H - MARGIN_BOTTOM + 10, H - MARGIN_BOTTOM + 10))
    out.append("</svg>")
    return _write(out_path, out)
