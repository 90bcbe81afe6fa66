"""Chronological hold-out evaluation and one-step-ahead replay.

``evaluate_chart`` fits once on the first 80% of a chart and predicts every
held-out timestamp.  ``replay`` walks forward through the chart forecasting
each next observation before it is revealed, and logs when the forecast
first leaves the Pass zone compared with when the measurements do.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ChartSeries, Forecast, SpcZone, format_timestamp
from .errors import EmptyInput, LengthMismatch, TooFewPoints
from .forecaster import ModelConfig, fit, predict_arrays
from .spc import classify_array, decision_label, zone_from_label

TABLE_HEADER = ("ds", "y", "yhat", "decision", "prophetDecision")
MIN_EVAL_POINTS = 5


@dataclass(frozen=True)
class EvalRow:
    ds: int
    y: float
    yhat: float
    decision: str
    prophet_decision: str

    def to_dict(self) -> dict:
        return {
            "ds": format_timestamp(self.ds),
            "y": self.y,
            "yhat": self.yhat,
            "decision": self.decision,
            "prophetDecision": self.prophet_decision,
        }


@dataclass(frozen=True)
class Metrics:
    mse: float
    rmse: float
    r2: float  # -inf when undefined (constant actuals, imperfect fit)

    @property
    def r2_defined(self) -> bool:
        return math.isfinite(self.r2)


def _r2_json(r2: float):
    return r2 if math.isfinite(r2) else "undefined"


@dataclass
class EvalReport:
    chart_id: str
    n_train: int
    n_test: int
    mse: float
    rmse: float
    r2: float
    spc_accuracy: float
    rows: list[EvalRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chart_id": self.chart_id,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "mse": self.mse,
            "rmse": self.rmse,
            "r2": _r2_json(self.r2),
            "spc_accuracy": self.spc_accuracy,
            "rows": [row.to_dict() for row in self.rows],
        }

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    for row in rows:
        writer.writerow([format_timestamp(row.ds), repr(row.y), repr(row.yhat), row.decision, row.prophet_decision])
    return buf.getvalue()


def split_chronological(series: ChartSeries, train_fraction: float = 0.8) -> tuple[ChartSeries, ChartSeries]:
    """First ``ceil(train_fraction * n)`` points train, the rest test."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    n = len(series)
    if n < MIN_EVAL_POINTS:
        raise TooFewPoints(f"chart {series.chart_id!r}: need >= {MIN_EVAL_POINTS} points to split, got {n}")
    # the epsilon keeps e.g. 0.7 * 10 = 7.000000000000001 from rounding up to 8
    n_train = min(math.ceil(train_fraction * n - 1e-9), n - 1)
    n_train = max(n_train, 2)
    return series.slice(0, n_train), series.slice(n_train, None)


def metrics(actual, predicted) -> Metrics:
    a = np.asarray(actual, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if a.shape != p.shape:
        raise LengthMismatch(f"{a.size} actual values vs {p.size} predictions")
    if a.size == 0:
        raise EmptyInput("metrics need at least one value")
    resid = a - p
    ss_res = float(np.sum(resid * resid))
    mse = ss_res / a.size
    dev = a - np.mean(a)
    ss_tot = float(np.sum(dev * dev))
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else -math.inf
    else:
        r2 = 1.0 - ss_res / ss_tot
    return Metrics(mse=mse, rmse=math.sqrt(mse), r2=r2)


def spc_decision_accuracy(rows) -> float:
    """Fraction of rows whose actual and forecast zones agree (direction included)."""
    rows = list(rows)
    if not rows:
        raise EmptyInput("no rows to score")
    hits = sum(zone_from_label(r.decision) == zone_from_label(r.prophet_decision) for r in rows)
    return hits / len(rows)


def build_rows(ds, y, yhat, limits) -> list[EvalRow]:
    """Label actual and forecast values; usable with externally produced forecasts."""
    ds = np.asarray(ds, dtype=np.int64)
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    actual_codes = classify_array(y, limits)
    pred_codes = classify_array(yhat, limits)
    return [
        EvalRow(int(d), float(a), float(b),
                decision_label(SpcZone.from_code(ca)), decision_label(SpcZone.from_code(cp)))
        for d, a, b, ca, cp in zip(ds, y, yhat, actual_codes, pred_codes)
    ]


def evaluate_chart_detailed(series: ChartSeries, config: ModelConfig | None = None,
                            train_fraction: float = 0.8):
    """Like :func:`evaluate_chart` but also returns ``(model, train, test)``."""
    train, test = split_chronological(series, train_fraction)
    model = fit(train, config)
    yhat, _, _ = predict_arrays(model, test.ds)
    rows = build_rows(test.ds, test.y, yhat, series.limits)
    m = metrics(test.y, yhat)
    report = EvalReport(
        chart_id=series.chart_id,
        n_train=len(train),
        n_test=len(test),
        mse=m.mse,
        rmse=m.rmse,
        r2=m.r2,
        spc_accuracy=spc_decision_accuracy(rows),
        rows=rows,
    )
    return report, model, train, test


def evaluate_chart(series: ChartSeries, config: ModelConfig | None = None,
                   train_fraction: float = 0.8) -> EvalReport:
    """Fit on the chronological training share, predict every held-out timestamp in one call."""
    return evaluate_chart_detailed(series, config, train_fraction)[0]


# -- replay ----------------------------------------------------------------

@dataclass
class AlarmLog:
    chart_id: str
    min_train: int
    refit_stride: int
    n_steps: int
    n_fits: int
    zone_accuracy: float
    first_predicted_alarm: int | None
    first_actual_alarm: int | None
    first_predicted_critical: int | None
    first_actual_critical: int | None
    events: list[dict] = field(default_factory=list)

    @property
    def alarm_lead(self) -> int | None:
        """Samples by which the forecast alarm precedes the measured one."""
        if self.first_predicted_alarm is None or self.first_actual_alarm is None:
            return None
        return self.first_actual_alarm - self.first_predicted_alarm

    @property
    def critical_lead(self) -> int | None:
        if self.first_predicted_critical is None or self.first_actual_critical is None:
            return None
        return self.first_actual_critical - self.first_predicted_critical

    def to_dict(self) -> dict:
        return {
            "chart_id": self.chart_id,
            "min_train": self.min_train,
            "refit_stride": self.refit_stride,
            "n_steps": self.n_steps,
            "n_fits": self.n_fits,
            "zone_accuracy": self.zone_accuracy,
            "first_predicted_alarm": self.first_predicted_alarm,
            "first_actual_alarm": self.first_actual_alarm,
            "alarm_lead_samples": self.alarm_lead,
            "first_predicted_critical": self.first_predicted_critical,
            "first_actual_critical": self.first_actual_critical,
            "critical_lead_samples": self.critical_lead,
            "events": self.events,
        }


@dataclass
class ReplayResult:
    steps: list[tuple[Forecast, EvalRow]]
    alarms: AlarmLog


def _first(indices: list[int]) -> int | None:
    return indices[0] if indices else None


def replay(series: ChartSeries, config: ModelConfig | None = None, min_train: int = 20,
           refit_stride: int = 1) -> ReplayResult:
    """Forecast each point from index ``min_train`` on using only earlier points.

    The model is refit whenever ``refit_stride`` new points have arrived
    since the last fit.  Indices in the alarm log refer to positions in
    ``series``.
    """
    n = len(series)
    if min_train < MIN_EVAL_POINTS or n <= min_train:
        raise TooFewPoints(
            f"chart {series.chart_id!r}: replay needs n > min_train >= {MIN_EVAL_POINTS} (n={n}, min_train={min_train})"
        )
    if refit_stride < 1:
        raise ValueError("refit_stride must be >= 1")

    limits = series.limits
    model = None
    fit_at = None
    n_fits = 0
    steps = []
    for i in range(min_train, n):
        if model is None or i - fit_at >= refit_stride:
            model = fit(series.slice(0, i), config)
            fit_at = i
            n_fits += 1
        yhat, lo, hi = predict_arrays(model, series.ds[i:i + 1])
        fc = Forecast(int(series.ds[i]), float(yhat[0]), float(lo[0]), float(hi[0]))
        row = build_rows(series.ds[i:i + 1], series.y[i:i + 1], yhat, limits)[0]
        steps.append((fc, row))

    pred_zones = [zone_from_label(r.prophet_decision) for _, r in steps]
    actual_zones = [zone_from_label(r.decision) for _, r in steps]
    idx = list(range(min_train, n))
    events = [
        {"index": i, "ds": format_timestamp(fc.ds), "y": row.y, "yhat": fc.yhat,
         "actual_zone": a.value, "predicted_zone": p.value}
        for i, (fc, row), a, p in zip(idx, steps, actual_zones, pred_zones)
        if a is not SpcZone.PASS or p is not SpcZone.PASS
    ]
    alarms = AlarmLog(
        chart_id=series.chart_id,
        min_train=min_train,
        refit_stride=refit_stride,
        n_steps=len(steps),
        n_fits=n_fits,
        zone_accuracy=sum(a is p for a, p in zip(actual_zones, pred_zones)) / len(steps),
        first_predicted_alarm=_first([i for i, z in zip(idx, pred_zones) if z is not SpcZone.PASS]),
        first_actual_alarm=_first([i for i, z in zip(idx, actual_zones) if z is not SpcZone.PASS]),
        first_predicted_critical=_first([i for i, z in zip(idx, pred_zones) if z.severity == 2]),
        first_actual_critical=_first([i for i, z in zip(idx, actual_zones) if z.severity == 2]),
        events=events,
    )
    return ReplayResult(steps, alarms)
