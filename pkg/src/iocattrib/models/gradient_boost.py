"""Gradient boosted trees: one-vs-rest additive logistic models."""

from __future__ import annotations

import numpy as np

from .base import ModelSpec, TrainedModel, register, _positive_float, _positive_int
from .tree import TreeNode, grow_regression_tree, tree_predict_values


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@register("gradient_boosted_trees")
class GradientBoostedTrees(TrainedModel):
    """Per class: M rounds of depth-limited regression trees on the
    logistic-loss gradient, with Newton leaf values and shrinkage."""

    probabilistic = True

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "n_rounds", 100)
        _positive_int(spec, "max_depth", 3)
        _positive_float(spec, "learning_rate", 0.1)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        rounds = int(spec.params.get("n_rounds", 100))
        depth = int(spec.params.get("max_depth", 3))
        lr = float(spec.params.get("learning_rate", 0.1))
        min_leaf = int(spec.params.get("min_leaf", 1))
        n = len(y)
        ensembles: list[list[TreeNode]] = []
        for c in range(len(classes)):
            target = (y == c).astype(np.float64)
            F = np.zeros(n)
            trees: list[TreeNode] = []
            for _ in range(rounds):
                p = _sigmoid(F)
                gradient = target - p
                hessian = p * (1.0 - p)
                tree = grow_regression_tree(X, gradient, hessian, depth, min_leaf)
                trees.append(tree)
                F += lr * tree_predict_values(tree, X)
            ensembles.append(trees)
        model = cls(spec, classes, n_features, fingerprint)
        model.ensembles = ensembles
        model.learning_rate = lr
        return model

    def score_matrix(self, X):
        raw = np.zeros((len(X), len(self.classes)))
        for c, trees in enumerate(self.ensembles):
            F = np.zeros(len(X))
            for tree in trees:
                F += self.learning_rate * tree_predict_values(tree, X)
            raw[:, c] = _sigmoid(F)
        return raw / raw.sum(axis=1, keepdims=True)

    def to_params(self):
        return {
            "ensembles": [[t.to_dict() for t in trees] for trees in self.ensembles],
            "learning_rate": self.learning_rate,
        }

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.ensembles = [
            [TreeNode.from_dict(t) for t in trees] for trees in params["ensembles"]
        ]
        model.learning_rate = float(params["learning_rate"])
        return model
