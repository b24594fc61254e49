"""Model snapshots: versioned JSON that reloads to bit-identical predictions."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ValidationError
from .base import ModelSpec, TrainedModel, algorithm_class

FORMAT_VERSION = 1


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "spec": model.spec.to_dict(),
        "classes": list(model.classes),
        "n_features": model.n_features,
        "fingerprint": model.fingerprint,
        "warnings": list(model.warnings),
        "params": model.to_params(),
    }


def model_from_dict(data: dict) -> TrainedModel:
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(f"unsupported model snapshot version {version!r}")
    spec = ModelSpec.from_dict(data["spec"])
    cls = algorithm_class(spec.algorithm)
    model = cls.from_params(
        spec,
        tuple(data["classes"]),
        int(data["n_features"]),
        data["fingerprint"],
        data["params"],
    )
    model.warnings = tuple(data.get("warnings", []))
    return model


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> TrainedModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
