"""Bernoulli naive Bayes and its kernel-density variant."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ModelError, ValidationError
from .base import ModelSpec, TrainedModel, register, softmax_rows, _positive_float


def _class_weight_sums(y: np.ndarray, n_classes: int, w: np.ndarray) -> np.ndarray:
    return np.bincount(y, weights=w, minlength=n_classes)


def _weighted_one_counts(X: np.ndarray, y: np.ndarray, n_classes: int, w: np.ndarray) -> np.ndarray:
    """ones[c, j] = sum of weights of class-c samples with bit j set."""
    Yw = np.zeros((len(y), n_classes))
    Yw[np.arange(len(y)), y] = w
    return Yw.T @ X


@register("naive_bayes")
class BernoulliNaiveBayes(TrainedModel):
    """Bernoulli event model with Laplace smoothing, computed in log space."""

    probabilistic = True
    supports_weights = True

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_float(spec, "alpha", 1.0)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        alpha = float(spec.params.get("alpha", 1.0))
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        class_w = _class_weight_sums(y, len(classes), w)
        ones = _weighted_one_counts(X, y, len(classes), w)
        theta = (ones + alpha) / (class_w[:, None] + 2.0 * alpha)
        model = cls(spec, classes, n_features, fingerprint)
        total = class_w.sum()
        with np.errstate(divide="ignore"):
            model.log_prior = np.where(class_w > 0, np.log(class_w / total), -np.inf)
        model.log_theta = np.log(theta)
        model.log_one_minus_theta = np.log1p(-theta)
        return model

    def score_matrix(self, X):
        joint = (
            self.log_prior[None, :]
            + X @ self.log_theta.T
            + (1.0 - X) @ self.log_one_minus_theta.T
        )
        return softmax_rows(joint)

    def log_joint(self, X):
        """Unnormalized log posterior; exp of this gives prior * likelihood."""
        X = self._check_matrix(X)
        return (
            self.log_prior[None, :]
            + X @ self.log_theta.T
            + (1.0 - X) @ self.log_one_minus_theta.T
        )

    def to_params(self):
        return {
            "log_prior": [None if not np.isfinite(v) else v for v in self.log_prior.tolist()],
            "log_theta": self.log_theta.tolist(),
            "log_one_minus_theta": self.log_one_minus_theta.tolist(),
        }

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.log_prior = np.array(
            [-np.inf if v is None else v for v in params["log_prior"]], dtype=float
        )
        model.log_theta = np.array(params["log_theta"], dtype=float)
        model.log_one_minus_theta = np.array(params["log_one_minus_theta"], dtype=float)
        return model


@register("naive_bayes_kernel")
class KernelNaiveBayes(TrainedModel):
    """Per-feature per-class Gaussian KDE likelihoods.

    Training features must be binary; the KDE then reduces to a two-spike
    mixture per (class, feature), evaluated at 0 and 1.  The far spike
    contributes a vanishing but strictly positive density, which keeps
    log-likelihoods finite when a class never exhibits a feature value.
    """

    probabilistic = True
    supports_weights = True

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_float(spec, "bandwidth", 0.1)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        if not np.isin(X, (0.0, 1.0)).all():
            raise ModelError("naive_bayes_kernel requires binary training features")
        h = float(spec.params.get("bandwidth", 0.1))
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        class_w = _class_weight_sums(y, len(classes), w)
        ones = _weighted_one_counts(X, y, len(classes), w)
        zeros = class_w[:, None] - ones

        k_near = 1.0 / math.sqrt(2.0 * math.pi)
        k_far = k_near * math.exp(-0.5 / (h * h))
        denom = np.where(class_w > 0, class_w * h, 1.0)[:, None]
        with np.errstate(divide="ignore"):
            log_f1 = np.log(np.maximum(ones * k_near + zeros * k_far, 1e-300) / denom)
            log_f0 = np.log(np.maximum(zeros * k_near + ones * k_far, 1e-300) / denom)

        model = cls(spec, classes, n_features, fingerprint)
        total = class_w.sum()
        with np.errstate(divide="ignore"):
            model.log_prior = np.where(class_w > 0, np.log(class_w / total), -np.inf)
        model.log_f1 = log_f1
        model.log_f0 = log_f0
        return model

    def score_matrix(self, X):
        joint = self.log_prior[None, :] + X @ self.log_f1.T + (1.0 - X) @ self.log_f0.T
        return softmax_rows(joint)

    def to_params(self):
        return {
            "log_prior": [None if not np.isfinite(v) else v for v in self.log_prior.tolist()],
            "log_f1": self.log_f1.tolist(),
            "log_f0": self.log_f0.tolist(),
        }

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.log_prior = np.array(
            [-np.inf if v is None else v for v in params["log_prior"]], dtype=float
        )
        model.log_f1 = np.array(params["log_f1"], dtype=float)
        model.log_f0 = np.array(params["log_f0"], dtype=float)
        return model
