"""Multinomial logistic regression fitted by full-batch gradient descent."""

from __future__ import annotations

import numpy as np

from .base import ModelSpec, TrainedModel, register, softmax_rows, _positive_float, _positive_int


def glm_loss_and_grad(
    W: np.ndarray,
    A: np.ndarray,
    Y: np.ndarray,
    l2: float,
    sample_weight: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Penalized cross-entropy and its gradient.

    W is (d+1, C) with the bias in the last row; A is the design matrix
    with a trailing ones column.  The L2 penalty excludes the bias row.
    """
    n = len(A)
    if sample_weight is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(sample_weight, dtype=float)
        w = w / w.sum()
    logits = A @ W
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_norm[:, None]
    loss = -float((w * (log_probs * Y).sum(axis=1)).sum())
    penalty_block = W[:-1]
    loss += 0.5 * l2 * float((penalty_block * penalty_block).sum())
    P = softmax_rows(logits)
    grad = A.T @ ((P - Y) * w[:, None])
    grad[:-1] += l2 * penalty_block
    return loss, grad


@register("glm")
class GeneralizedLinearModel(TrainedModel):
    """Softmax regression with L2 penalty.

    Gradient descent uses backtracking on the step size, which makes the
    recorded loss history non-increasing by construction.  A model that
    hits the iteration cap is returned with a convergence warning.
    """

    probabilistic = True
    supports_weights = True

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_float(spec, "l2", 1e-3, minimum=-1e-18)
        _positive_float(spec, "tol", 1e-6)
        _positive_int(spec, "max_iter", 1000)
        _positive_float(spec, "step_size", 1.0)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        l2 = float(spec.params.get("l2", 1e-3))
        tol = float(spec.params.get("tol", 1e-6))
        max_iter = int(spec.params.get("max_iter", 1000))
        step = float(spec.params.get("step_size", 1.0))
        n_classes = len(classes)
        A = np.hstack([X, np.ones((len(X), 1))])
        Y = np.zeros((len(y), n_classes))
        Y[np.arange(len(y)), y] = 1.0
        W = np.zeros((X.shape[1] + 1, n_classes))

        history: list[float] = []
        loss, grad = glm_loss_and_grad(W, A, Y, l2, sample_weight)
        converged = False
        for _ in range(max_iter):
            history.append(loss)
            while step > 1e-14:
                candidate = W - step * grad
                new_loss, new_grad = glm_loss_and_grad(candidate, A, Y, l2, sample_weight)
                if new_loss <= loss:
                    break
                step *= 0.5
            else:
                converged = True
                break
            improvement = loss - new_loss
            W, loss, grad = candidate, new_loss, new_grad
            step = min(step * 1.25, 64.0)
            if improvement < tol:
                converged = True
                break
        history.append(loss)

        model = cls(spec, classes, n_features, fingerprint)
        model.W = W
        model.loss_history = history
        if not converged:
            model.warnings = ("glm did not converge within max_iter",)
        return model

    def score_matrix(self, X):
        A = np.hstack([X, np.ones((len(X), 1))])
        return softmax_rows(A @ self.W)

    def to_params(self):
        return {"W": self.W.tolist()}

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.W = np.array(params["W"], dtype=float)
        model.loss_history = []
        return model
