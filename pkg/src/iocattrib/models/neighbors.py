"""k-nearest neighbors with Hamming distance on binary vectors."""

from __future__ import annotations

import numpy as np

from ..errors import ModelError
from .base import ModelSpec, TrainedModel, register, _positive_int


@register("knn")
class KNearestNeighbors(TrainedModel):
    """Stores the training set; votes among the k Hamming-closest rows.

    Distance ties resolve by canonical training index, vote ties by
    lowest class index.
    """

    probabilistic = False

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "k", 5)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        if not np.isin(X, (0.0, 1.0)).all():
            raise ModelError("knn uses Hamming distance and requires binary features")
        k = int(spec.params.get("k", 5))
        model = cls(spec, classes, n_features, fingerprint)
        model.X = X.astype(np.float64)
        model.y = y.copy()
        model.k = min(k, len(y))
        model.row_sums = model.X.sum(axis=1)
        return model

    def score_matrix(self, X):
        # Hamming distance via the binary identity |a| + |b| - 2 a.b
        query_sums = X.sum(axis=1)
        d = query_sums[:, None] + self.row_sums[None, :] - 2.0 * (X @ self.X.T)
        d = np.rint(d).astype(np.int64)
        neighbor_idx = np.argsort(d, axis=1, kind="stable")[:, : self.k]
        scores = np.zeros((len(X), len(self.classes)))
        for r, idx in enumerate(neighbor_idx):
            votes = np.bincount(self.y[idx], minlength=len(self.classes))
            scores[r] = votes / self.k
        return scores

    def to_params(self):
        return {
            "X": self.X.astype(np.uint8).tolist(),
            "y": self.y.tolist(),
            "k": self.k,
        }

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.X = np.array(params["X"], dtype=np.float64)
        model.y = np.array(params["y"], dtype=np.int64)
        model.k = int(params["k"])
        model.row_sums = model.X.sum(axis=1)
        return model
