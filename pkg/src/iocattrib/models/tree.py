"""CART decision trees.

Classification trees split on Gini impurity; on binary data every split
is a presence test (x == 1), scanned for all candidate features at once
with a single matrix product.  Non-binary data (ensemble meta-features)
falls back to sorted threshold scans.  Ties resolve to the lowest
feature index and lowest threshold, so fits are deterministic.
"""

from __future__ import annotations

import numpy as np

from ..errors import ModelError
from .base import ModelSpec, TrainedModel, register, _positive_int

_EPS = 1e-12


class TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature=-1, threshold=0.5, left=None, right=None, value=None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value  # leaf payload: class distribution or scalar

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def to_dict(self) -> dict:
        if self.is_leaf:
            value = self.value.tolist() if isinstance(self.value, np.ndarray) else self.value
            return {"value": value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @staticmethod
    def from_dict(data: dict) -> "TreeNode":
        if "value" in data:
            value = data["value"]
            if isinstance(value, list):
                value = np.array(value, dtype=float)
            return TreeNode(value=value)
        return TreeNode(
            feature=data["feature"],
            threshold=data["threshold"],
            left=TreeNode.from_dict(data["left"]),
            right=TreeNode.from_dict(data["right"]),
        )


def _is_binary(X: np.ndarray) -> bool:
    return bool(np.isin(X, (0.0, 1.0)).all())


def grow_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    max_depth: int,
    min_leaf: int,
    sample_weight: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
    max_features: int | None = None,
) -> TreeNode:
    """Grow a Gini tree; rng/max_features enable per-split feature subsets."""
    n, n_feat = X.shape
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    # class weight columns plus a trailing sample-count column, so one
    # matrix product per node yields both the Gini sums and the counts
    Ywc = np.zeros((n, n_classes + 1))
    Ywc[np.arange(n), y] = w
    Ywc[:, -1] = 1.0
    binary = _is_binary(X)
    subset = max_features is not None and max_features < n_feat

    def leaf(total: np.ndarray) -> TreeNode:
        weight = total[:-1].sum()
        if weight <= 0:
            dist = np.full(n_classes, 1.0 / n_classes)
        else:
            dist = total[:-1] / weight
        return TreeNode(value=dist)

    def build(Xs: np.ndarray, Ys: np.ndarray, ys: np.ndarray, depth: int) -> TreeNode:
        total = Ys.sum(axis=0)
        if depth >= max_depth or len(ys) < 2 * min_leaf or (ys == ys[0]).all():
            return leaf(total)
        if subset:
            feats = np.sort(rng.choice(n_feat, size=max_features, replace=False))
        else:
            feats = None
        if binary:
            found = _best_binary_split(Xs, Ys, total, feats, min_leaf)
        else:
            found = _best_threshold_split(Xs, Ys, total, feats, min_leaf)
        if found is None:
            return leaf(total)
        feature, threshold = found
        right = Xs[:, feature] > threshold
        left = ~right
        node = TreeNode(feature=feature, threshold=threshold)
        node.left = build(Xs[left], Ys[left], ys[left], depth + 1)
        node.right = build(Xs[right], Ys[right], ys[right], depth + 1)
        return node

    return build(X, Ywc, y, 0)


def _side_score(side_wc: np.ndarray) -> np.ndarray:
    """sum_c w_c^2 / w_side per candidate (zero-weight sides score 0)."""
    w_side = side_wc.sum(axis=-1)
    return (side_wc * side_wc).sum(axis=-1) / np.maximum(w_side, 1e-300)


def _best_binary_split(Xs, Ys, total, feats, min_leaf):
    Xf = Xs if feats is None else Xs[:, feats]
    right_stats = Xf.T @ Ys
    right_wc = right_stats[:, :-1]
    n_right = right_stats[:, -1]
    left_wc = total[None, :-1] - right_wc
    n_left = total[-1] - n_right
    scores = _side_score(left_wc) + _side_score(right_wc)
    scores[(n_left < min_leaf) | (n_right < min_leaf)] = -np.inf
    parent = _side_score(total[None, :-1])[0]
    best = int(np.argmax(scores))
    if scores[best] <= parent + _EPS:
        return None
    return (best if feats is None else int(feats[best])), 0.5


def _best_threshold_split(Xs, Ys, total, feats, min_leaf):
    total_wc = total[:-1]
    parent = _side_score(total_wc[None, :])[0]
    m = len(Xs)
    best_score = parent + _EPS
    best = None
    for j in range(Xs.shape[1]) if feats is None else feats:
        values = Xs[:, int(j)]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        if sv[0] == sv[-1]:
            continue
        cum_wc = np.cumsum(Ys[order, :-1], axis=0)
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        cut = cut[(cut + 1 >= min_leaf) & (m - cut - 1 >= min_leaf)]
        if len(cut) == 0:
            continue
        left_wc = cum_wc[cut]
        right_wc = total_wc[None, :] - left_wc
        scores = _side_score(left_wc) + _side_score(right_wc)
        k = int(np.argmax(scores))
        if scores[k] > best_score:
            best_score = scores[k]
            best = (int(j), float((sv[cut[k]] + sv[cut[k] + 1]) / 2.0))
    return best


def tree_score_matrix(root: TreeNode, X: np.ndarray, n_classes: int) -> np.ndarray:
    """Leaf class distributions for every row, by index partitioning."""
    out = np.empty((len(X), n_classes))
    stack = [(root, np.arange(len(X)))]
    while stack:
        node, idx = stack.pop()
        if len(idx) == 0:
            continue
        if node.is_leaf:
            out[idx] = node.value
            continue
        right = X[idx, node.feature] > node.threshold
        stack.append((node.left, idx[~right]))
        stack.append((node.right, idx[right]))
    return out


def grow_regression_tree(
    X: np.ndarray,
    gradient: np.ndarray,
    hessian: np.ndarray,
    max_depth: int,
    min_leaf: int,
) -> TreeNode:
    """Squared-error splits on the gradient; Newton leaf values g/h.

    Binary features only (every split is a presence test).
    """
    if not _is_binary(X):
        raise ModelError("regression trees here expect binary features")
    gh = np.column_stack([gradient, hessian, np.ones(len(X))])

    def build(Xs: np.ndarray, GH: np.ndarray, depth: int) -> TreeNode:
        total_g, total_h, m = GH.sum(axis=0)
        if depth >= max_depth or m < 2 * min_leaf:
            return TreeNode(value=float(total_g / (total_h + _EPS)))
        right_stats = Xs.T @ GH
        sum_g_right = right_stats[:, 0]
        n_right = right_stats[:, 2]
        n_left = m - n_right
        sum_g_left = total_g - sum_g_right
        scores = sum_g_left**2 / np.maximum(n_left, _EPS) + sum_g_right**2 / np.maximum(
            n_right, _EPS
        )
        scores[(n_left < min_leaf) | (n_right < min_leaf)] = -np.inf
        parent = total_g**2 / m
        best = int(np.argmax(scores))
        if scores[best] <= parent + _EPS:
            return TreeNode(value=float(total_g / (total_h + _EPS)))
        right = Xs[:, best] > 0.5
        left = ~right
        node = TreeNode(feature=best, threshold=0.5)
        node.left = build(Xs[left], GH[left], depth + 1)
        node.right = build(Xs[right], GH[right], depth + 1)
        return node

    return build(X, gh, 0)


def tree_predict_values(root: TreeNode, X: np.ndarray) -> np.ndarray:
    """Scalar leaf values for every row (regression trees)."""
    out = np.empty(len(X))
    stack = [(root, np.arange(len(X)))]
    while stack:
        node, idx = stack.pop()
        if len(idx) == 0:
            continue
        if node.is_leaf:
            out[idx] = node.value
            continue
        right = X[idx, node.feature] > node.threshold
        stack.append((node.left, idx[~right]))
        stack.append((node.right, idx[right]))
    return out


@register("decision_tree")
class DecisionTree(TrainedModel):
    """Single CART tree; leaf label is the majority class."""

    probabilistic = False
    supports_weights = True

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "max_depth", 20, minimum=0)
        _positive_int(spec, "min_leaf", 1)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        max_depth = int(spec.params.get("max_depth", 20))
        min_leaf = int(spec.params.get("min_leaf", 1))
        model = cls(spec, classes, n_features, fingerprint)
        model.root = grow_classification_tree(
            X, y, len(classes), max_depth, min_leaf, sample_weight
        )
        return model

    def score_matrix(self, X):
        return tree_score_matrix(self.root, X, len(self.classes))

    def to_params(self):
        return {"root": self.root.to_dict()}

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.root = TreeNode.from_dict(params["root"])
        return model
