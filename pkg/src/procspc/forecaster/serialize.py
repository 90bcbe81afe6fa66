"""Versioned JSON model documents.

Floats are written with ``repr`` precision by the json module, so a round
trip reproduces every coefficient exactly.
"""
from __future__ import annotations

import json
import math

from ..errors import MalformedModelError, SchemaVersionError
from .config import ModelConfig
from .model import FittedModel, _check_model

SCHEMA_VERSION = 1

_REQUIRED = (
    "t_start", "t_span", "y_offset", "y_scale", "changepoints", "k", "m",
    "delta", "beta", "sigma_resid", "config", "disabled_seasonalities",
)


def serialize_model(model: FittedModel) -> dict:
    model = _check_model(model)
    return {
        "version": SCHEMA_VERSION,
        "t_start": model.t_start,
        "t_span": model.t_span,
        "y_offset": model.y_offset,
        "y_scale": model.y_scale,
        "changepoints": list(model.changepoints),
        "k": model.k,
        "m": model.m,
        "delta": list(model.delta),
        "beta": list(model.beta),
        "sigma_resid": model.sigma_resid,
        "config": model.config.to_dict(),
        "disabled_seasonalities": list(model.disabled_seasonalities),
    }


def _real(doc, key):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedModelError(f"field {key!r} must be a finite number")
    return float(value)


def _reals(doc, key):
    value = doc[key]
    if not isinstance(value, list):
        raise MalformedModelError(f"field {key!r} must be a list")
    return tuple(_real({key: v}, key) for v in value)


def deserialize_model(doc: dict | str) -> FittedModel:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedModelError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedModelError("model document must be a JSON object")
    if "version" not in doc:
        raise MalformedModelError("model document has no version tag")
    if doc["version"] != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported model schema version {doc['version']!r}")
    missing = [key for key in _REQUIRED if key not in doc]
    if missing:
        raise MalformedModelError("model document missing fields: " + ", ".join(missing))
    t_start = doc["t_start"]
    if isinstance(t_start, bool) or not isinstance(t_start, int):
        raise MalformedModelError("field 't_start' must be an integer")
    try:
        config = ModelConfig.from_dict(doc["config"])
        return FittedModel(
            t_start=t_start,
            t_span=_real(doc, "t_span"),
            y_offset=_real(doc, "y_offset"),
            y_scale=_real(doc, "y_scale"),
            changepoints=_reals(doc, "changepoints"),
            k=_real(doc, "k"),
            m=_real(doc, "m"),
            delta=_reals(doc, "delta"),
            beta=_reals(doc, "beta"),
            sigma_resid=_real(doc, "sigma_resid"),
            config=config,
            disabled_seasonalities=tuple(str(s) for s in doc["disabled_seasonalities"]),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedModelError):
            raise
        raise MalformedModelError(str(exc)) from exc


def dumps(model: FittedModel) -> str:
    return json.dumps(serialize_model(model), indent=2, sort_keys=True)


def loads(text: str) -> FittedModel:
    return deserialize_model(text)
