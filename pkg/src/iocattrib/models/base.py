"""Shared model machinery: specs, the trained-model contract, registry.

Every algorithm registers a class here.  ``fit`` canonicalizes the
training order (sort by label, then vector bytes) before any seeded
sampling, so fitted models are invariant to instance reordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..errors import ModelError, ValidationError
from ..featurize import Dataset, FeatureVector

ENSEMBLE_BASE_COUNTS = {
    "voting": (2, None),
    "stacking": (2, None),  # last base is the meta-learner
    "bagging": (1, 1),
    "adaboost": (1, 1),
}

_REGISTRY: dict[str, type["TrainedModel"]] = {}


def register(name: str):
    def deco(cls):
        cls.algorithm = name
        _REGISTRY[name] = cls
        return cls

    return deco


def algorithm_class(name: str) -> type["TrainedModel"]:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValidationError(
            f"unknown algorithm {name!r}; known: {', '.join(sorted(_REGISTRY))}"
        ) from None


def known_algorithms() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of a classifier, possibly a nested ensemble."""

    algorithm: str
    params: Mapping[str, Any] = field(default_factory=dict)
    bases: tuple["ModelSpec", ...] = ()
    seed: int = 0
    name: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "bases", tuple(self.bases))
        counts = ENSEMBLE_BASE_COUNTS.get(self.algorithm)
        if counts is None:
            if self.bases:
                raise ValidationError(f"{self.algorithm} takes no base models")
        else:
            low, high = counts
            if len(self.bases) < low or (high is not None and len(self.bases) > high):
                bound = f"exactly {low}" if high == low else f"at least {low}"
                raise ValidationError(f"{self.algorithm} requires {bound} base model(s)")

    @property
    def label(self) -> str:
        return self.name if self.name else self.describe()

    def describe(self) -> str:
        if self.bases:
            inner = ", ".join(b.describe() for b in self.bases)
            return f"{self.algorithm}({inner})"
        return self.algorithm

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "params": dict(self.params),
            "bases": [b.to_dict() for b in self.bases],
            "seed": self.seed,
            "name": self.name,
        }

    @staticmethod
    def from_dict(data: dict) -> "ModelSpec":
        return ModelSpec(
            algorithm=data["algorithm"],
            params=data.get("params", {}),
            bases=tuple(ModelSpec.from_dict(b) for b in data.get("bases", [])),
            seed=data.get("seed", 0),
            name=data.get("name"),
        )


@dataclass(frozen=True)
class PredictionScores:
    """Per-class scores; argmax ties resolve to the lowest class index."""

    classes: tuple[str, ...]
    scores: np.ndarray
    normalized: bool

    def argmax_label(self) -> str:
        return self.classes[int(np.argmax(self.scores))]

    def ranked(self) -> list[tuple[str, float]]:
        """Classes by descending score; ties keep canonical class order."""
        order = np.argsort(-self.scores, kind="stable")
        return [(self.classes[i], float(self.scores[i])) for i in order]


class TrainedModel:
    """Fitted, immutable classifier with a uniform scoring interface."""

    algorithm: str = ""
    probabilistic: bool = False
    supports_weights: bool = False

    def __init__(self, spec: ModelSpec, classes: tuple[str, ...], n_features: int, fingerprint: str):
        self.spec = spec
        self.classes = classes
        self.n_features = n_features
        self.fingerprint = fingerprint
        self.warnings: tuple[str, ...] = ()

    # -- implemented per algorithm -------------------------------------
    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        pass

    @classmethod
    def fit_arrays(
        cls,
        spec: ModelSpec,
        X: np.ndarray,
        y: np.ndarray,
        classes: tuple[str, ...],
        n_features: int,
        fingerprint: str,
        sample_weight: np.ndarray | None = None,
    ) -> "TrainedModel":
        raise NotImplementedError

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        """Raw per-class scores for a batch, one row per input row."""
        raise NotImplementedError

    def to_params(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params) -> "TrainedModel":
        raise NotImplementedError

    # -- shared surface -------------------------------------------------
    def _check_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ModelError(
                f"vector length {X.shape[1]} does not match the training "
                f"feature space ({self.n_features})"
            )
        return X.astype(np.float64)

    def predict_scores_matrix(self, X: np.ndarray) -> np.ndarray:
        return self.score_matrix(self._check_matrix(X))

    def predict_scores(self, vector) -> PredictionScores:
        bits = vector.bits if isinstance(vector, FeatureVector) else np.asarray(vector)
        scores = self.predict_scores_matrix(bits[None, :])[0]
        return PredictionScores(self.classes, scores, normalized=self.probabilistic)

    def predict_label(self, vector) -> str:
        return self.predict_scores(vector).argmax_label()

    def predict_labels(self, X: np.ndarray) -> list[str]:
        scores = self.predict_scores_matrix(X)
        return [self.classes[i] for i in np.argmax(scores, axis=1)]


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    np.exp(shifted, out=shifted)
    shifted /= shifted.sum(axis=1, keepdims=True)
    return shifted


def canonical_training_arrays(dataset: Dataset) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Arrays in canonical order: sorted by class index, then row bytes."""
    X, y, classes = dataset.to_arrays()
    order = sorted(range(len(y)), key=lambda i: (y[i], X[i].tobytes()))
    idx = np.array(order, dtype=np.int64)
    return np.ascontiguousarray(X[idx]), y[idx], classes


def fit(spec: ModelSpec, dataset: Dataset, sample_weight: np.ndarray | None = None) -> TrainedModel:
    """Fit a spec on a dataset; deterministic given (spec.seed, dataset)."""
    cls = algorithm_class(spec.algorithm)
    _validate_spec_tree(spec)
    classes = dataset.classes
    if len(classes) < 2:
        raise ModelError("training requires at least 2 distinct labels")
    X, y, classes = canonical_training_arrays(dataset)
    return cls.fit_arrays(
        spec,
        X.astype(np.float64),
        y,
        classes,
        dataset.space.size,
        dataset.space.fingerprint(),
        sample_weight,
    )


def _validate_spec_tree(spec: ModelSpec) -> None:
    algorithm_class(spec.algorithm).validate_params(spec)
    for base in spec.bases:
        _validate_spec_tree(base)


def fit_base_arrays(
    spec: ModelSpec,
    X: np.ndarray,
    y: np.ndarray,
    classes: tuple[str, ...],
    n_features: int,
    fingerprint: str,
    sample_weight: np.ndarray | None = None,
) -> TrainedModel:
    """Internal dispatch for ensembles fitting bases on prepared arrays."""
    return algorithm_class(spec.algorithm).fit_arrays(
        spec, X, y, classes, n_features, fingerprint, sample_weight
    )


def _positive_int(spec: ModelSpec, key: str, default: int, minimum: int = 1) -> int:
    value = spec.params.get(key, default)
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < minimum:
        raise ValidationError(f"{spec.algorithm}: {key} must be an integer >= {minimum}")
    return int(value)


def _positive_float(spec: ModelSpec, key: str, default: float, minimum: float = 0.0) -> float:
    value = spec.params.get(key, default)
    if not isinstance(value, (int, float, np.floating)) or isinstance(value, bool) or value <= minimum:
        raise ValidationError(f"{spec.algorithm}: {key} must be a number > {minimum}")
    return float(value)
