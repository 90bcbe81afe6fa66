from .config import WEEKLY, YEARLY, ModelConfig, SeasonalitySpec
from .design import changepoint_indices, design_matrix, design_row, place_changepoints, scale_time
from .model import (
    Components,
    FittedModel,
    components,
    decompose,
    fit,
    median_gap,
    next_timestamp,
    predict,
    predict_arrays,
)
from .serialize import SCHEMA_VERSION, deserialize_model, dumps, loads, serialize_model

__all__ = [
    "WEEKLY", "YEARLY", "ModelConfig", "SeasonalitySpec",
    "changepoint_indices", "design_matrix", "design_row", "place_changepoints", "scale_time",
    "Components", "FittedModel", "components", "decompose", "fit", "median_gap",
    "next_timestamp", "predict", "predict_arrays",
    "SCHEMA_VERSION", "deserialize_model", "dumps", "loads", "serialize_model",
]
