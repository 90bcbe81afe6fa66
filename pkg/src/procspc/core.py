"""Shared domain types: timestamps, limits, chart series, zones, forecasts."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySeries, LimitOrderError, NonFiniteValue

# Epoch seconds, UTC.  Plain ints keep arithmetic exact.
Timestamp = int

SECONDS_PER_DAY = 86400


def format_timestamp(ts: Timestamp) -> str:
    """``YYYY-MM-DD HH:MM:SS`` in UTC (the layout used by forecast tables)."""
    return datetime.fromtimestamp(int(ts), tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


@dataclass(frozen=True)
class DataPoint:
    ds: Timestamp
    y: float

    def __post_init__(self):
        if not math.isfinite(self.y):
            raise NonFiniteValue(f"non-finite measurement {self.y!r} at ds={self.ds}")


@dataclass(frozen=True)
class ControlLimits:
    lsl: float
    lcl: float
    target: float
    ucl: float
    usl: float

    ORDER = ("lsl", "lcl", "target", "ucl", "usl")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.ORDER}


def validate_limits(limits: ControlLimits) -> ControlLimits:
    """Return ``limits`` unchanged if ``lsl <= lcl <= target <= ucl <= usl``.

    Raises LimitOrderError naming the first adjacent pair that is out of
    order, e.g. ``lcl>target``.
    """
    values = [getattr(limits, name) for name in ControlLimits.ORDER]
    for name, value in zip(ControlLimits.ORDER, values):
        if not math.isfinite(value):
            raise NonFiniteValue(f"limit {name} is not finite: {value!r}")
    for (lo_name, lo), (hi_name, hi) in zip(
        zip(ControlLimits.ORDER, values), zip(ControlLimits.ORDER[1:], values[1:])
    ):
        if lo > hi:
            raise LimitOrderError(lo_name, hi_name, lo, hi)
    return limits


class SpcZone(enum.Enum):
    """SPC decision zone.  ``code`` increases with the measured value."""

    CRITICAL_LOW = "CriticalLow"
    AT_RISK_LOW = "AtRiskLow"
    PASS = "Pass"
    AT_RISK_HIGH = "AtRiskHigh"
    CRITICAL_HIGH = "CriticalHigh"

    @property
    def code(self) -> int:
        return _ZONE_CODES[self]

    @property
    def severity(self) -> int:
        """0 = Pass, 1 = At Risk, 2 = Critical."""
        return abs(self.code - 2)

    @classmethod
    def from_code(cls, code: int) -> "SpcZone":
        return _ZONES_BY_CODE[int(code)]


_ZONES_BY_CODE = tuple(SpcZone)
_ZONE_CODES = {zone: i for i, zone in enumerate(_ZONES_BY_CODE)}


@dataclass(frozen=True)
class Forecast:
    ds: Timestamp
    yhat: float
    yhat_lower: float
    yhat_upper: float

    def __post_init__(self):
        if not self.yhat_lower <= self.yhat <= self.yhat_upper:
            raise ValueError(
                f"interval [{self.yhat_lower}, {self.yhat_upper}] does not contain yhat={self.yhat}"
            )


class ChartSeries:
    """One chart's observations, strictly increasing in time, plus its limits.

    The arrays are read-only views; ``points`` materialises DataPoint objects
    on demand.  Use :meth:`from_points` to sort and drop duplicate timestamps.
    """

    __slots__ = ("chart_id", "group", "limits", "ds", "y")

    def __init__(
        self,
        chart_id: str,
        group: str,
        limits: ControlLimits,
        ds: Sequence[int] | np.ndarray,
        y: Sequence[float] | np.ndarray,
    ):
        ds_arr = np.array(ds, dtype=np.int64)
        y_arr = np.array(y, dtype=np.float64)
        if ds_arr.ndim != 1 or ds_arr.shape != y_arr.shape:
            raise ValueError("ds and y must be 1-d arrays of equal length")
        if ds_arr.size == 0:
            raise EmptySeries(f"chart {chart_id!r} has no points")
        if not np.all(np.isfinite(y_arr)):
            raise NonFiniteValue(f"chart {chart_id!r} contains non-finite values")
        if np.any(np.diff(ds_arr) <= 0):
            raise ValueError(f"chart {chart_id!r}: timestamps must be strictly increasing")
        ds_arr.flags.writeable = False
        y_arr.flags.writeable = False
        object.__setattr__(self, "chart_id", str(chart_id))
        object.__setattr__(self, "group", str(group))
        object.__setattr__(self, "limits", validate_limits(limits))
        object.__setattr__(self, "ds", ds_arr)
        object.__setattr__(self, "y", y_arr)

    def __setattr__(self, name, value):
        raise AttributeError("ChartSeries is immutable")

    @classmethod
    def from_points(
        cls,
        chart_id: str,
        group: str,
        limits: ControlLimits,
        points: Iterable[DataPoint | tuple[int, float]],
    ) -> "ChartSeries":
        """Sort by timestamp, keeping the first occurrence of each timestamp."""
        seen: dict[int, float] = {}
        for p in points:
            ds, y = (p.ds, p.y) if isinstance(p, DataPoint) else p
            seen.setdefault(int(ds), float(y))
        keys = sorted(seen)
        return cls(chart_id, group, limits, keys, [seen[k] for k in keys])

    @property
    def points(self) -> list[DataPoint]:
        return [DataPoint(int(d), float(v)) for d, v in zip(self.ds, self.y)]

    def __len__(self) -> int:
        return int(self.ds.size)

    def slice(self, start: int | None = None, stop: int | None = None) -> "ChartSeries":
        return ChartSeries(self.chart_id, self.group, self.limits, self.ds[start:stop], self.y[start:stop])

    def __eq__(self, other):
        if not isinstance(other, ChartSeries):
            return NotImplemented
        return (
            self.chart_id == other.chart_id
            and self.group == other.group
            and self.limits == other.limits
            and np.array_equal(self.ds, other.ds)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None

    def __repr__(self):
        return f"ChartSeries({self.chart_id!r}, group={self.group!r}, n={len(self)})"
