"""The classifier suite behind one fit/predict contract."""

from .base import (
    ModelSpec,
    PredictionScores,
    TrainedModel,
    fit,
    known_algorithms,
)
from . import naive_bayes, neighbors, tree, forest, gradient_boost, linear, neural, ensemble  # noqa: F401  (registration)
from .persist import load_model, model_from_dict, model_to_dict, save_model

__all__ = [
    "ModelSpec",
    "PredictionScores",
    "TrainedModel",
    "fit",
    "known_algorithms",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
]
