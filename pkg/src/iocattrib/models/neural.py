"""Multilayer perceptrons: sigmoid hidden layers, softmax output.

Two registered variants share the implementation: ``ann`` has exactly
one hidden layer, ``deep`` has two or more.  Training is plain
mini-batch gradient descent on cross-entropy; weight init and epoch
shuffles come from streams keyed by the spec seed.
"""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from ..streams import keyed_stream
from .base import ModelSpec, TrainedModel, register, softmax_rows, _positive_float, _positive_int


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def layer_sizes(n_in: int, hidden: list[int], n_out: int) -> list[tuple[int, int]]:
    dims = [n_in] + list(hidden) + [n_out]
    return list(zip(dims[:-1], dims[1:]))


def init_params(sizes: list[tuple[int, int]], seed: int) -> list[np.ndarray]:
    """Weights uniform in +/- 1/sqrt(fan_in); biases zero."""
    params: list[np.ndarray] = []
    for i, (fan_in, fan_out) in enumerate(sizes):
        stream = keyed_stream(seed, "layer", i)
        bound = 1.0 / np.sqrt(fan_in)
        params.append(stream.uniform(-bound, bound, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def flatten_params(params: list[np.ndarray]) -> np.ndarray:
    return np.concatenate([p.ravel() for p in params])


def unflatten_params(flat: np.ndarray, sizes: list[tuple[int, int]]) -> list[np.ndarray]:
    params = []
    pos = 0
    for fan_in, fan_out in sizes:
        params.append(flat[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out))
        pos += fan_in * fan_out
        params.append(flat[pos : pos + fan_out])
        pos += fan_out
    return params


def _forward(params: list[np.ndarray], X: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Returns hidden activations (including the input) and output probs."""
    activations = [X]
    h = X
    n_layers = len(params) // 2
    for layer in range(n_layers - 1):
        h = _sigmoid(h @ params[2 * layer] + params[2 * layer + 1])
        activations.append(h)
    logits = h @ params[-2] + params[-1]
    return activations, softmax_rows(logits)


def mlp_loss_and_grad(
    params: list[np.ndarray], X: np.ndarray, Y: np.ndarray, l2: float = 0.0
) -> tuple[float, list[np.ndarray]]:
    """Mean cross-entropy (plus optional weight decay) and its gradients.

    The decay term penalizes weight matrices only, never biases.
    """
    n = len(X)
    activations, P = _forward(params, X)
    loss = -float(np.sum(Y * np.log(np.maximum(P, 1e-300)))) / n
    grads: list[np.ndarray] = [np.empty(0)] * len(params)
    delta = (P - Y) / n
    n_layers = len(params) // 2
    for layer in range(n_layers - 1, -1, -1):
        h = activations[layer]
        grads[2 * layer] = h.T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ params[2 * layer].T) * h * (1.0 - h)
    if l2 > 0.0:
        for layer in range(n_layers):
            W = params[2 * layer]
            loss += 0.5 * l2 * float((W * W).sum())
            grads[2 * layer] += l2 * W
    return loss, grads


class _MLPBase(TrainedModel):
    probabilistic = True

    @classmethod
    def _hidden_layers(cls, spec: ModelSpec) -> list[int]:
        raise NotImplementedError

    @classmethod
    def validate_params(cls, spec: ModelSpec) -> None:
        _positive_int(spec, "epochs", 200)
        _positive_int(spec, "batch_size", 32)
        _positive_float(spec, "learning_rate", 0.01)
        _positive_float(spec, "l2", 0.0, minimum=-1e-18)
        decay = spec.params.get("lr_decay", 1.0)
        if not isinstance(decay, (int, float)) or not (0.0 < float(decay) <= 1.0):
            raise ValidationError(f"{spec.algorithm}: lr_decay must lie in (0, 1]")
        cls._hidden_layers(spec)

    @classmethod
    def fit_arrays(cls, spec, X, y, classes, n_features, fingerprint, sample_weight=None):
        hidden = cls._hidden_layers(spec)
        epochs = int(spec.params.get("epochs", 200))
        batch_size = int(spec.params.get("batch_size", 32))
        lr = float(spec.params.get("learning_rate", 0.01))
        l2 = float(spec.params.get("l2", 0.0))
        lr_decay = float(spec.params.get("lr_decay", 1.0))
        n, d = X.shape
        n_classes = len(classes)
        Y = np.zeros((n, n_classes))
        Y[np.arange(n), y] = 1.0
        sizes = layer_sizes(d, hidden, n_classes)
        params = init_params(sizes, spec.seed)

        initial_loss, _ = mlp_loss_and_grad(params, X, Y, l2)
        epoch_lr = lr
        for epoch in range(epochs):
            perm = keyed_stream(spec.seed, "epoch", epoch).permutation(n)
            for start in range(0, n, batch_size):
                batch = perm[start : start + batch_size]
                # gradients accumulate over the batch (sum reduction)
                _, grads = mlp_loss_and_grad(params, X[batch], Y[batch], l2)
                scale = epoch_lr * len(batch)
                for p, g in zip(params, grads):
                    p -= scale * g
            epoch_lr *= lr_decay
        final_loss, _ = mlp_loss_and_grad(params, X, Y, l2)

        model = cls(spec, classes, n_features, fingerprint)
        model.params = params
        model.sizes = sizes
        if final_loss >= initial_loss:
            model.warnings = ("training loss did not improve; model may not have converged",)
        return model

    def score_matrix(self, X):
        _, P = _forward(self.params, X)
        return P

    def to_params(self):
        return {
            "sizes": [list(s) for s in self.sizes],
            "values": [p.tolist() for p in self.params],
        }

    @classmethod
    def from_params(cls, spec, classes, n_features, fingerprint, params):
        model = cls(spec, classes, n_features, fingerprint)
        model.sizes = [tuple(s) for s in params["sizes"]]
        model.params = [np.array(v, dtype=float) for v in params["values"]]
        return model


@register("ann")
class NeuralNetwork(_MLPBase):
    """One hidden layer (default width 64)."""

    @classmethod
    def _hidden_layers(cls, spec: ModelSpec) -> list[int]:
        width = spec.params.get("hidden_width", 64)
        if not isinstance(width, int) or isinstance(width, bool) or width < 1:
            raise ValidationError("ann: hidden_width must be a positive integer")
        return [width]


@register("deep")
class DeepNetwork(_MLPBase):
    """Two or more hidden layers (default [128, 64])."""

    @classmethod
    def _hidden_layers(cls, spec: ModelSpec) -> list[int]:
        hidden = spec.params.get("hidden_layers", [128, 64])
        if (
            not isinstance(hidden, (list, tuple))
            or len(hidden) < 2
            or any(not isinstance(hs, int) or isinstance(hs, bool) or hs < 1 for hs in hidden)
        ):
            raise ValidationError("deep: hidden_layers must list at least 2 positive widths")
        return list(hidden)
