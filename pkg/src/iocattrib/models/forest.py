"""Random forest: bagged Gini trees with per-split feature subsets."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ValidationError
from ..streams import keyed_stream
from .base import ModelSpec, TrainedModel, register, _positive_int
from .tree import TreeNode, grow_classification_tree, tree_score_matrix


@register("random_forest")
class RandomForest(TrainedModel):
    """Majority vote over trees grown on bootstrap resamples.

    Per-tree randomness comes from streams keyed by (seed, "tree", index),
    so the forest is identical however tree fits are scheduled.
    """

    probabilistic = False
    supports_weights = True

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "n_trees", 100)
        _positive_int(spec, "max_depth", 20, minimum=0)
        _positive_int(spec, "min_leaf", 1)
        max_features = spec.params.get("max_features", "sqrt")
        if max_features is not None and max_features != "sqrt" and (
            not isinstance(max_features, int) or max_features < 1
        ):
            raise ValidationError("random_forest: max_features must be 'sqrt', a positive int, or null")
        if not isinstance(spec.params.get("bootstrap", True), bool):
            raise ValidationError("random_forest: bootstrap must be a boolean")

    @classmethod
    def _resolve_max_features(cls, setting, n_features: int) -> int | None:
        if setting is None:
            return None
        if setting == "sqrt":
            return max(1, int(round(math.sqrt(n_features))))
        return min(int(setting), n_features)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        n_trees = int(spec.params.get("n_trees", 100))
        max_depth = int(spec.params.get("max_depth", 20))
        min_leaf = int(spec.params.get("min_leaf", 1))
        bootstrap = bool(spec.params.get("bootstrap", True))
        mtry = cls._resolve_max_features(spec.params.get("max_features", "sqrt"), X.shape[1])
        w = None if sample_weight is None else np.asarray(sample_weight, dtype=float)
        n = len(y)
        trees: list[TreeNode] = []
        for t in range(n_trees):
            rng = keyed_stream(spec.seed, "tree", t)
            if bootstrap:
                idx = rng.integers(0, n, size=n)
                Xt, yt = X[idx], y[idx]
                wt = None if w is None else w[idx]
            else:
                Xt, yt, wt = X, y, w
            trees.append(
                grow_classification_tree(
                    Xt, yt, len(classes), max_depth, min_leaf, wt, rng=rng, max_features=mtry
                )
            )
        model = cls(spec, classes, n_features, fingerprint)
        model.trees = trees
        return model

    def score_matrix(self, X):
        n_classes = len(self.classes)
        votes = np.zeros((len(X), n_classes))
        for tree in self.trees:
            labels = np.argmax(tree_score_matrix(tree, X, n_classes), axis=1)
            votes[np.arange(len(X)), labels] += 1.0
        return votes / len(self.trees)

    def to_params(self):
        return {"trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.trees = [TreeNode.from_dict(t) for t in params["trees"]]
        return model
