"""Fit and evaluate the additive model ``y(t) = trend(t) + seasonal(t) + noise``.

The trend is continuous piecewise linear: ``m + k*t + sum_j delta_j * max(t - s_j, 0)``
on scaled time ``t``.  Each seasonality contributes ``sum_n a_n cos(2 pi n d / P) +
b_n sin(2 pi n d / P)`` with ``d`` the days elapsed since the first training
point.  With changepoints fixed the model is linear in every coefficient, so
fitting is a single penalized least-squares solve.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

from ..core import SECONDS_PER_DAY, ChartSeries, Forecast
from ..errors import SingularFit, TooFewPoints, UnfittedModel
from .config import ModelConfig, SeasonalitySpec
from .design import days_since, design_matrix, place_changepoints, scale_time

RIDGE_JITTER = 1e-8


@dataclass(frozen=True)
class FittedModel:
    t_start: int
    t_span: float
    y_offset: float
    y_scale: float
    changepoints: tuple[float, ...]
    k: float
    m: float
    delta: tuple[float, ...]
    beta: tuple[float, ...]
    sigma_resid: float
    config: ModelConfig
    disabled_seasonalities: tuple[str, ...] = ()
    _weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = np.array([self.m, self.k, *self.delta, *self.beta], dtype=np.float64)
        w.flags.writeable = False
        object.__setattr__(self, "_weights", w)
        expected = sum(2 * s.fourier_order for s in self.seasonalities)
        if len(self.delta) != len(self.changepoints) or len(self.beta) != expected:
            raise ValueError("coefficient vector lengths do not match the model structure")

    @property
    def seasonalities(self) -> tuple[SeasonalitySpec, ...]:
        """Seasonalities actually fitted (configured minus auto-disabled)."""
        return tuple(s for s in self.config.seasonalities if s.name not in self.disabled_seasonalities)

    @property
    def weights(self) -> np.ndarray:
        """Coefficients in design-matrix column order ``[m, k, delta..., beta...]``."""
        return self._weights

    @property
    def z(self) -> float:
        return NormalDist().inv_cdf((1.0 + self.config.interval_width) / 2.0)

    def design(self, timestamps) -> np.ndarray:
        ds = np.asarray(timestamps, dtype=np.int64)
        t = scale_time(ds, self.t_start, self.t_span)
        return design_matrix(t, days_since(ds, self.t_start), self.changepoints, self.seasonalities)

    def seasonal_blocks(self) -> list[tuple[str, slice]]:
        col = 2 + len(self.changepoints)
        blocks = []
        for s in self.seasonalities:
            blocks.append((s.name, slice(col, col + 2 * s.fourier_order)))
            col += 2 * s.fourier_order
        return blocks


def _check_model(model) -> FittedModel:
    if not isinstance(model, FittedModel):
        raise UnfittedModel(f"expected a FittedModel, got {type(model).__name__}")
    return model


def _solve_penalized(X: np.ndarray, y: np.ndarray, penalty: np.ndarray) -> np.ndarray | None:
    """Minimise ``|y - Xw|^2 + sum(penalty * w^2)`` by pivoted QR of the augmented system.

    Returns None when the augmented matrix is numerically rank deficient.
    """
    rows = np.flatnonzero(penalty > 0)
    A = X
    b = y
    if rows.size:
        P = np.zeros((rows.size, X.shape[1]))
        P[np.arange(rows.size), rows] = np.sqrt(penalty[rows])
        A = np.vstack([X, P])
        b = np.concatenate([y, np.zeros(rows.size)])
    if A.shape[0] < A.shape[1]:
        return None
    Q, R, piv = linalg.qr(A, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(R))
    tol = max(A.shape) * np.finfo(np.float64).eps * diag[0] if diag.size else 0.0
    if diag.size == 0 or diag[0] == 0 or diag[-1] <= tol:
        return None
    w = np.empty(A.shape[1])
    w[piv] = linalg.solve_triangular(R, Q.T @ b, check_finite=False)
    return w


def fit(series: ChartSeries, config: ModelConfig | None = None) -> FittedModel:
    """Fit one chart.

    ``y`` is standardized by the training mean and standard deviation before
    solving; seasonalities whose period exceeds the training span are
    dropped and listed in ``disabled_seasonalities``.
    """
    config = config or ModelConfig()
    n = len(series)
    if n < 2:
        raise TooFewPoints(f"chart {series.chart_id!r}: need >= 2 points to fit, got {n}")

    ds = series.ds
    t_start = int(ds[0])
    t_span = float(ds[-1] - ds[0])
    y = series.y
    y_offset = float(np.mean(y))
    y_std = float(np.std(y))
    y_scale = y_std if y_std > 1e-12 * abs(y_offset) and y_std > 0 else 1.0

    changepoints = tuple(place_changepoints(series, config))
    disabled = tuple(s.name for s in config.seasonalities if s.period_days * SECONDS_PER_DAY > t_span)
    enabled = [s for s in config.seasonalities if s.name not in disabled]

    t = scale_time(ds, t_start, t_span)
    X = design_matrix(t, days_since(ds, t_start), changepoints, enabled)
    y_tilde = (y - y_offset) / y_scale

    n_cp = len(changepoints)
    penalty = np.zeros(X.shape[1])
    penalty[2:2 + n_cp] = config.trend_penalty
    penalty[2 + n_cp:] = config.seasonal_penalty

    w = _solve_penalized(X, y_tilde, penalty)
    if w is None:
        w = _solve_penalized(X, y_tilde, penalty + RIDGE_JITTER)
    if w is None or not np.all(np.isfinite(w)):
        raise SingularFit(f"chart {series.chart_id!r}: least-squares solve failed")

    sigma = float(np.std(y_tilde - X @ w)) * y_scale
    return FittedModel(
        t_start=t_start,
        t_span=t_span,
        y_offset=y_offset,
        y_scale=y_scale,
        changepoints=changepoints,
        k=float(w[1]),
        m=float(w[0]),
        delta=tuple(float(v) for v in w[2:2 + n_cp]),
        beta=tuple(float(v) for v in w[2 + n_cp:]),
        sigma_resid=sigma,
        config=config,
        disabled_seasonalities=disabled,
    )


def predict_arrays(model: FittedModel, timestamps) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`predict`: returns ``(yhat, yhat_lower, yhat_upper)``."""
    model = _check_model(model)
    X = model.design(timestamps)
    yhat = model.y_offset + model.y_scale * (X @ model.weights)
    half = model.z * model.sigma_resid
    return yhat, yhat - half, yhat + half


def predict(model: FittedModel, timestamps: Iterable[int]) -> list[Forecast]:
    """Point forecasts and Gaussian residual intervals, in input order."""
    ds = [int(v) for v in timestamps]
    if not ds:
        _check_model(model)
        return []
    yhat, lo, hi = predict_arrays(model, ds)
    return [Forecast(d, float(a), float(b), float(c)) for d, a, b, c in zip(ds, yhat, lo, hi)]


def next_timestamp(series: ChartSeries) -> int:
    """Last timestamp plus the (lower) median gap between successive points."""
    return int(series.ds[-1]) + median_gap(series.ds)


def median_gap(ds: Sequence[int] | np.ndarray) -> int:
    gaps = np.sort(np.diff(np.asarray(ds, dtype=np.int64)))
    if gaps.size == 0:
        raise TooFewPoints("need >= 2 points to infer a sampling gap")
    return int(gaps[(gaps.size - 1) // 2])


@dataclass(frozen=True)
class Components:
    trend: float
    seasonal: dict[str, float]

    @property
    def total(self) -> float:
        return self.trend + sum(self.seasonal.values())


def components(model: FittedModel, timestamps) -> dict[str, np.ndarray]:
    """Trend and per-seasonality contributions (original units) at each timestamp."""
    model = _check_model(model)
    X = model.design(timestamps)
    w = model.weights
    n_trend = 2 + len(model.changepoints)
    out = {"trend": model.y_offset + model.y_scale * (X[:, :n_trend] @ w[:n_trend])}
    for name, block in model.seasonal_blocks():
        out[name] = model.y_scale * (X[:, block] @ w[block])
    return out


def decompose(model: FittedModel, ds: int) -> Components:
    parts = components(model, [int(ds)])
    trend = float(parts.pop("trend")[0])
    return Components(trend, {name: float(v[0]) for name, v in parts.items()})
