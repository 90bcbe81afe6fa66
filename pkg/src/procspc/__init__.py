"""Proactive statistical process control.

Forecast the next value of an irregularly sampled process chart with an
additive trend + seasonality model and classify it into SPC zones before the
measurement arrives.
"""
from ._kernels import BACKEND
from .core import ChartSeries, ControlLimits, DataPoint, Forecast, SpcZone, validate_limits
from .evaluation import EvalReport, EvalRow, evaluate_chart, metrics, replay, spc_decision_accuracy, split_chronological
from .forecaster import FittedModel, ModelConfig, SeasonalitySpec, decompose, fit, next_timestamp, predict
from .ingest import load_csv, parse_timestamp
from .spc import classify, classify_forecast, decision_label

__version__ = "0.1.0"
