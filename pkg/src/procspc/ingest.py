"""Load and clean qualification-chart CSV exports.

Expected header (any order, case-insensitive)::

    ChartID,date,Average,Usl,Ucl,Target,Lcl,Lsl,Group

Rows missing any of these fields are dropped, duplicate timestamps keep the
first occurrence, and each chart takes its limits from its chronologically
latest surviving row.
"""
from __future__ import annotations

import calendar
import csv
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Iterable

from .core import ChartSeries, ControlLimits, format_timestamp, validate_limits
from .errors import DataError, EmptyChartError, HeaderError, TimestampParseError

logger = logging.getLogger(__name__)

COLUMNS = ("ChartID", "date", "Average", "Usl", "Ucl", "Target", "Lcl", "Lsl", "Group")
LIMIT_COLUMNS = ("Lsl", "Lcl", "Target", "Ucl", "Usl")
_ATTR = {col: ("chart_id" if col == "ChartID" else col.lower()) for col in COLUMNS}

_TIMESTAMP_FORMATS = (
    "%m/%d/%y %I:%M %p",
    "%m/%d/%y %I:%M:%S %p",
    "%m/%d/%Y %I:%M %p",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M",
)
_MISSING = {"", "na", "n/a", "nan", "null", "none"}


@dataclass(frozen=True)
class RawRow:
    chart_id: str
    date: str
    average: str
    usl: str
    ucl: str
    target: str
    lcl: str
    lsl: str
    group: str


@dataclass
class CleaningReport:
    chart_id: str
    rows_read: int = 0
    rows_kept: int = 0
    rows_dropped: int = 0
    rows_deduped: int = 0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def parse_timestamp(text: str) -> int:
    """Parse ``4/2/25 11:35 AM`` or ``2025-04-02 11:35:26`` to UTC epoch seconds.

    Two-digit years 69-99 map to 1969-1999 and 00-68 to 2000-2068.
    """
    stripped = text.strip()
    if stripped.endswith("Z"):
        stripped = stripped[:-1]
    for fmt in _TIMESTAMP_FORMATS:
        try:
            parsed = datetime.strptime(stripped, fmt)
        except ValueError:
            continue
        return calendar.timegm(parsed.timetuple())
    raise TimestampParseError(text)


def _is_missing(value: str | None) -> bool:
    return value is None or value.strip().lower() in _MISSING


def _parse_real(text: str) -> float:
    value = float(text.strip())
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def _resolve_header(fieldnames: Iterable[str] | None) -> dict[str, str]:
    by_lower = {name.strip().lower(): name for name in (fieldnames or [])}
    mapping = {}
    missing = []
    for col in COLUMNS:
        if col.lower() in by_lower:
            mapping[col] = by_lower[col.lower()]
        else:
            missing.append(col)
    if missing:
        raise HeaderError(missing)
    return mapping


def read_rows(path: str | os.PathLike) -> list[RawRow]:
    """Read the nine key columns as unparsed strings (missing cells become "")."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        mapping = _resolve_header(reader.fieldnames)
        rows = []
        for rec in reader:
            vals = [rec.get(mapping[col]) for col in COLUMNS]
            rows.append(RawRow(*[("" if v is None else v) for v in vals]))
    return rows


def check_limit_consistency(chart_id: str, rows: list[RawRow]) -> list[str]:
    """One warning per limit column whose value changes across a chart's rows."""
    warnings = []
    for col in LIMIT_COLUMNS:
        seen = []
        for row in rows:
            raw = getattr(row, _ATTR[col])
            if _is_missing(raw):
                continue
            try:
                value = float(raw)
            except ValueError:
                continue
            if value not in seen:
                seen.append(value)
        if len(seen) > 1:
            changes = "->".join(f"{v:g}" for v in seen)
            warnings.append(
                f"chart {chart_id}: column {col} is not constant ({changes}); latest row wins"
            )
    return warnings


def clean_chart(chart_id: str, rows: list[RawRow]) -> tuple[ChartSeries | None, CleaningReport]:
    """Apply the drop / dedup / sort rules to one chart's rows."""
    report = CleaningReport(chart_id=chart_id, rows_read=len(rows))
    parsed = []
    for row in rows:
        if any(_is_missing(getattr(row, _ATTR[col])) for col in COLUMNS):
            report.rows_dropped += 1
            continue
        try:
            ds = parse_timestamp(row.date)
            y = _parse_real(row.average)
            limits = tuple(_parse_real(getattr(row, _ATTR[col])) for col in LIMIT_COLUMNS)
        except (DataError, ValueError) as exc:
            report.rows_dropped += 1
            report.warnings.append(f"chart {chart_id}: dropped unparseable row ({exc})")
            continue
        parsed.append((ds, y, limits, row))

    kept: dict[int, tuple] = {}
    for item in parsed:
        if item[0] in kept:
            report.rows_deduped += 1
        else:
            kept[item[0]] = item
    report.rows_kept = len(kept)
    if not kept:
        raise EmptyChartError(f"chart {chart_id}: no rows survive cleaning")

    ordered = [kept[k] for k in sorted(kept)]
    report.warnings.extend(check_limit_consistency(chart_id, [item[3] for item in ordered]))
    latest = ordered[-1]
    limits = validate_limits(ControlLimits(*latest[2]))
    series = ChartSeries(
        chart_id, latest[3].group.strip(), limits,
        [item[0] for item in ordered], [item[1] for item in ordered],
    )
    return series, report


def load_csv(path: str | os.PathLike) -> tuple[list[ChartSeries], list[CleaningReport]]:
    """Load every chart in a CSV export.

    Returns the cleaned series (in first-appearance order of ChartID) and one
    CleaningReport per chart.  A chart with no surviving rows, or whose limits
    are out of order, is skipped: it gets a report with a warning but no
    series.
    """
    rows = read_rows(path)
    grouped: dict[str, list[RawRow]] = {}
    orphans = 0
    for row in rows:
        key = row.chart_id.strip()
        if not key:
            orphans += 1
            continue
        grouped.setdefault(key, []).append(row)
    if orphans:
        logger.warning("%d rows without ChartID dropped", orphans)

    series_list, reports = [], []
    for chart_id, chart_rows in grouped.items():
        try:
            series, report = clean_chart(chart_id, chart_rows)
        except DataError as exc:
            logger.warning("skipping chart %s: %s", chart_id, exc)
            report = CleaningReport(chart_id=chart_id, rows_read=len(chart_rows))
            report.rows_dropped = len(chart_rows)
            report.warnings.append(f"chart {chart_id} skipped: {exc}")
            reports.append(report)
            continue
        series_list.append(series)
        reports.append(report)
    return series_list, reports


def write_csv(series_list: Iterable[ChartSeries], path: str | os.PathLike) -> None:
    """Write a normalized export that :func:`load_csv` reads back unchanged."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for s in series_list:
            lim = s.limits
            for ds, y in zip(s.ds, s.y):
                writer.writerow([
                    s.chart_id, format_timestamp(int(ds)), repr(float(y)),
                    repr(lim.usl), repr(lim.ucl), repr(lim.target), repr(lim.lcl), repr(lim.lsl),
                    s.group,
                ])
