"""Time scaling, changepoint placement, and the regression design matrix."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .. import _kernels
from ..core import SECONDS_PER_DAY, ChartSeries
from .config import ModelConfig, SeasonalitySpec


def scale_time(ds, t_start: int, t_span: float):
    """Map timestamps to ``(ds - t_start) / t_span``; the training range becomes [0, 1]."""
    if not t_span > 0:
        raise ValueError("t_span must be positive")
    if np.ndim(ds) == 0:
        return (int(ds) - int(t_start)) / t_span
    return (np.asarray(ds, dtype=np.int64) - np.int64(t_start)) / t_span


def changepoint_indices(n_points: int, config: ModelConfig) -> list[int]:
    """Evenly spaced point indices inside the first ``changepoint_range`` of the history.

    With ``H = floor(range * n)`` and ``K = min(n_changepoints, floor(range * (n - 1)))``
    the indices are ``ceil(H * j / (K + 1))`` for ``j = 1..K``; they are
    distinct and never 0.
    """
    if n_points < 2:
        return []
    r = config.changepoint_range
    count = min(config.n_changepoints, math.floor(r * (n_points - 1)))
    if count <= 0:
        return []
    hist = math.floor(r * n_points)
    return [-((-hist * j) // (count + 1)) for j in range(1, count + 1)]


def place_changepoints(series: ChartSeries, config: ModelConfig) -> list[float]:
    idx = changepoint_indices(len(series), config)
    if not idx:
        return []
    t_start = int(series.ds[0])
    t_span = float(series.ds[-1] - series.ds[0])
    return [float(v) for v in scale_time(series.ds[idx], t_start, t_span)]


def _seasonal_arrays(seasonalities: Sequence[SeasonalitySpec]):
    periods = np.array([s.period_days for s in seasonalities], dtype=np.float64)
    orders = np.array([s.fourier_order for s in seasonalities], dtype=np.int64)
    return periods, orders


def design_matrix(t, t_days, changepoints, seasonalities: Sequence[SeasonalitySpec]) -> np.ndarray:
    periods, orders = _seasonal_arrays(seasonalities)
    return _kernels.design_matrix(
        np.atleast_1d(np.asarray(t, dtype=np.float64)),
        np.atleast_1d(np.asarray(t_days, dtype=np.float64)),
        np.asarray(changepoints, dtype=np.float64),
        periods,
        orders,
    )


def design_row(t: float, changepoints, seasonalities: Sequence[SeasonalitySpec], t_days: float) -> np.ndarray:
    """Feature vector for one scaled time ``t``.

    ``t_days`` is the unscaled time since the training start, in days; it
    drives the Fourier terms so seasonal phase is independent of ``t_span``.
    """
    return design_matrix([t], [t_days], changepoints, seasonalities)[0]


def days_since(ds, t_start: int):
    return (np.asarray(ds, dtype=np.int64) - np.int64(t_start)) / float(SECONDS_PER_DAY)
