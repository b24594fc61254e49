"""Ensembles: hard voting, out-of-fold stacking, bagging, and SAMME boosting."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ModelError
from ..folds import stratified_assignment
from ..streams import keyed_stream
from .base import (
    ModelSpec,
    TrainedModel,
    fit_base_arrays,
    register,
    _positive_int,
)


def _vote_matrix(bases: list[TrainedModel], X: np.ndarray, n_classes: int) -> np.ndarray:
    votes = np.zeros((len(X), n_classes))
    for base in bases:
        labels = np.argmax(base.score_matrix(X), axis=1)
        votes[np.arange(len(X)), labels] += 1.0
    return votes


class _EnsembleBase(TrainedModel):
    def _serialize_bases(self, bases: list[TrainedModel]) -> list[dict]:
        from .persist import model_to_dict

        return [model_to_dict(base) for base in bases]

    @staticmethod
    def _deserialize_bases(blobs: list[dict]) -> list[TrainedModel]:
        from .persist import model_from_dict

        return [model_from_dict(blob) for blob in blobs]


@register("voting")
class VotingEnsemble(_EnsembleBase):
    """Unweighted majority over base argmax labels (hard voting)."""

    probabilistic = False

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        bases = [
            fit_base_arrays(b, X, y, classes, n_features, fingerprint, sample_weight)
            for b in spec.bases
        ]
        model = cls(spec, classes, n_features, fingerprint)
        model.bases = bases
        return model

    def score_matrix(self, X):
        return _vote_matrix(self.bases, X, len(self.classes)) / len(self.bases)

    def to_params(self):
        return {"bases": self._serialize_bases(self.bases)}

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.bases = cls._deserialize_bases(params["bases"])
        return model


@register("stacking")
class StackingEnsemble(_EnsembleBase):
    """The last base spec is the meta-learner; earlier bases feed it.

    Meta-training features are the bases' out-of-fold per-class scores,
    concatenated, so the meta-learner never sees a base's prediction on
    a point that base trained on.  Bases are refit on the full data for
    inference.
    """

    probabilistic = False

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "oof_folds", 5, minimum=2)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        base_specs, meta_spec = spec.bases[:-1], spec.bases[-1]
        n = len(y)
        k = min(int(spec.params.get("oof_folds", 5)), n)
        fold = stratified_assignment(y, k, keyed_stream(spec.seed, "oof"))
        n_classes = len(classes)
        meta_X = np.zeros((n, n_classes * len(base_specs)))
        for f in range(k):
            train = np.flatnonzero(fold != f)
            test = np.flatnonzero(fold == f)
            if len(test) == 0:
                continue
            if len(np.unique(y[train])) < 2:
                raise ModelError(
                    "stacking: an out-of-fold training split has fewer than 2 classes; "
                    "use more data or fewer oof_folds"
                )
            w = None if sample_weight is None else sample_weight[train]
            for b, base_spec in enumerate(base_specs):
                fitted = fit_base_arrays(
                    base_spec, X[train], y[train], classes, n_features, fingerprint, w
                )
                meta_X[test, b * n_classes : (b + 1) * n_classes] = fitted.score_matrix(X[test])

        bases = [
            fit_base_arrays(b, X, y, classes, n_features, fingerprint, sample_weight)
            for b in base_specs
        ]
        meta = fit_base_arrays(
            meta_spec, meta_X, y, classes, meta_X.shape[1], "meta:" + fingerprint, sample_weight
        )
        model = cls(spec, classes, n_features, fingerprint)
        model.bases = bases
        model.meta = meta
        return model

    def score_matrix(self, X):
        n_classes = len(self.classes)
        meta_X = np.zeros((len(X), n_classes * len(self.bases)))
        for b, base in enumerate(self.bases):
            meta_X[:, b * n_classes : (b + 1) * n_classes] = base.score_matrix(X)
        return self.meta.score_matrix(meta_X)

    def to_params(self):
        from .persist import model_to_dict

        return {"bases": self._serialize_bases(self.bases), "meta": model_to_dict(self.meta)}

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        from .persist import model_from_dict

        model = cls(spec, classes, n_features, fingerprint)
        model.bases = cls._deserialize_bases(params["bases"])
        model.meta = model_from_dict(params["meta"])
        return model


@register("bagging")
class BaggingEnsemble(_EnsembleBase):
    """Majority vote over one base fit per bootstrap resample."""

    probabilistic = False

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "n_resamples", 10)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        base_spec = spec.bases[0]
        n_resamples = int(spec.params.get("n_resamples", 10))
        n = len(y)
        bases = []
        for b in range(n_resamples):
            idx = keyed_stream(spec.seed, "resample", b).integers(0, n, size=n)
            w = None if sample_weight is None else sample_weight[idx]
            bases.append(
                fit_base_arrays(base_spec, X[idx], y[idx], classes, n_features, fingerprint, w)
            )
        model = cls(spec, classes, n_features, fingerprint)
        model.bases = bases
        return model

    def score_matrix(self, X):
        return _vote_matrix(self.bases, X, len(self.classes)) / len(self.bases)

    def to_params(self):
        return {"bases": self._serialize_bases(self.bases)}

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.bases = cls._deserialize_bases(params["bases"])
        return model


@register("adaboost")
class AdaBoostEnsemble(_EnsembleBase):
    """Multiclass SAMME over a single base spec.

    Bases that accept instance weights are fit with them directly;
    otherwise each round fits on a weighted bootstrap resample.  A round
    whose error reaches 1 - 1/C stops boosting; a zero-error round is
    kept and stops boosting.
    """

    probabilistic = False

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "n_rounds", 50)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        from .base import algorithm_class

        base_spec = spec.bases[0]
        base_cls = algorithm_class(base_spec.algorithm)
        n_rounds = int(spec.params.get("n_rounds", 50))
        n = len(y)
        n_classes = len(classes)
        w = np.full(n, 1.0 / n) if sample_weight is None else sample_weight / sample_weight.sum()

        bases: list[TrainedModel] = []
        alphas: list[float] = []
        warnings: list[str] = []
        for t in range(n_rounds):
            if base_cls.supports_weights:
                base = fit_base_arrays(base_spec, X, y, classes, n_features, fingerprint, w)
            else:
                idx = keyed_stream(spec.seed, "boost", t).choice(n, size=n, p=w)
                base = fit_base_arrays(base_spec, X[idx], y[idx], classes, n_features, fingerprint)
            pred = np.argmax(base.score_matrix(X), axis=1)
            miss = pred != y
            err = float(w[miss].sum())
            if err >= 1.0 - 1.0 / n_classes:
                if not bases:
                    bases.append(base)
                    alphas.append(1.0)
                    warnings.append("first boosting round was no better than random guessing")
                break
            floored = max(err, 1e-16)
            alphas.append(math.log((1.0 - floored) / floored) + math.log(n_classes - 1.0))
            bases.append(base)
            if err <= 0.0:
                break
            w = w * np.exp(alphas[-1] * miss)
            w = w / w.sum()

        model = cls(spec, classes, n_features, fingerprint)
        model.bases = bases
        model.alphas = alphas
        model.warnings = tuple(warnings)
        return model

    def score_matrix(self, X):
        n_classes = len(self.classes)
        scores = np.zeros((len(X), n_classes))
        for base, alpha in zip(self.bases, self.alphas):
            labels = np.argmax(base.score_matrix(X), axis=1)
            scores[np.arange(len(X)), labels] += alpha
        return scores / sum(self.alphas)

    def to_params(self):
        return {"bases": self._serialize_bases(self.bases), "alphas": list(self.alphas)}

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.bases = cls._deserialize_bases(params["bases"])
        model.alphas = [float(a) for a in params["alphas"]]
        return model
