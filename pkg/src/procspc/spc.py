"""SPC zone classification and decision labels.

Boundaries: the Pass band ``[lcl, ucl]`` is closed, the Critical bands
(``> usl``, ``< lsl``) are open, so a value exactly at a specification limit
is At Risk.  When ``ucl == usl`` the AtRiskHigh band is empty (likewise low).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import ControlLimits, Forecast, SpcZone
from .errors import NonFiniteValue

LABELS = {
    SpcZone.PASS: "Pass",
    SpcZone.AT_RISK_HIGH: "At Risk (Technician Review) - Above UCL",
    SpcZone.AT_RISK_LOW: "At Risk (Technician Review) - Below LCL",
    SpcZone.CRITICAL_HIGH: "Critical (Tool Stop) - Above USL",
    SpcZone.CRITICAL_LOW: "Critical (Tool Stop) - Below LSL",
}
_ZONE_BY_LABEL = {label: zone for zone, label in LABELS.items()}


def classify(value: float, limits: ControlLimits) -> SpcZone:
    if not math.isfinite(value):
        raise NonFiniteValue(f"cannot classify non-finite value {value!r}")
    if limits.lcl <= value <= limits.ucl:
        return SpcZone.PASS
    if value > limits.usl:
        return SpcZone.CRITICAL_HIGH
    if value < limits.lsl:
        return SpcZone.CRITICAL_LOW
    if value > limits.ucl:
        return SpcZone.AT_RISK_HIGH
    return SpcZone.AT_RISK_LOW


def classify_array(values, limits: ControlLimits) -> np.ndarray:
    """Zone codes (see :attr:`SpcZone.code`) for a whole array of values."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("cannot classify non-finite values")
    return _kernels.classify_codes(values, limits.lsl, limits.lcl, limits.ucl, limits.usl)


def decision_label(zone: SpcZone) -> str:
    return LABELS[zone]


def zone_from_label(label: str) -> SpcZone:
    try:
        return _ZONE_BY_LABEL[label]
    except KeyError:
        raise ValueError(f"not a decision label: {label!r}") from None


def severest(*zones: SpcZone) -> SpcZone:
    """Most severe zone; ties between directions resolve to the first given."""
    return max(zones, key=lambda z: z.severity)


@dataclass(frozen=True)
class ForecastDecision:
    point_zone: SpcZone
    worst_interval_zone: SpcZone


def classify_forecast(forecast: Forecast, limits: ControlLimits) -> ForecastDecision:
    point = classify(forecast.yhat, limits)
    worst = severest(
        point,
        classify(forecast.yhat_lower, limits),
        classify(forecast.yhat_upper, limits),
    )
    return ForecastDecision(point, worst)
