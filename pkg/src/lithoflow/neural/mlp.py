"""
Fully connected feed-forward network with analytic backpropagation.

Parameters are flattened layer by layer, first to last; within a layer the
weight matrix (shape ``(n_out, n_in)``) is laid out row-major, followed by
the bias vector.
"""
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from ..exceptions import NumericError, ValidationError

FORMAT_VERSION = 1


def tansig(v):
    # identical to (1 - e^{-2v}) / (1 + e^{-2v}) without the overflow
    return np.tanh(v)


def logsig(v):
    return expit(v)


def purelin(v):
    return v


ACTIVATIONS = {"tansig": tansig, "logsig": logsig, "purelin": purelin}


def _derivative(name, y):
    """Activation derivative expressed through the activation output."""
    if name == "tansig":
        return 1.0 - y * y
    if name == "logsig":
        return y * (1.0 - y)
    return np.ones_like(y)


@dataclass
class MlpModel:
    widths: list
    weights: list
    biases: list
    activations: list
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.widths = [int(w) for w in self.widths]
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        n_layers = len(self.widths) - 1
        if n_layers < 1 or len(self.weights) != n_layers or len(self.biases) != n_layers \
                or len(self.activations) != n_layers:
            raise ValidationError("layer count mismatch between widths, weights, biases and activations")
        for k in range(n_layers):
            if self.weights[k].shape != (self.widths[k + 1], self.widths[k]) \
                    or self.biases[k].shape != (self.widths[k + 1],):
                raise ValidationError(f"layer {k}: parameter shapes do not chain")
            if self.activations[k] not in ACTIVATIONS:
                raise ValidationError(f"unknown activation {self.activations[k]!r}")
        if not np.all(np.isfinite(self.get_params())):
            raise ValidationError("model parameters must be finite")

    @property
    def n_in(self):
        return self.widths[0]

    @property
    def n_out(self):
        return self.widths[-1]

    @property
    def n_params(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def get_params(self):
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)])

    def with_params(self, theta):
        """New model with the flat parameter vector ``theta``."""
        theta = np.asarray(theta, dtype=float)
        if theta.size != self.n_params:
            raise ValidationError(f"expected {self.n_params} parameters, got {theta.size}")
        ws, bs, pos = [], [], 0
        for w, b in zip(self.weights, self.biases):
            ws.append(theta[pos:pos + w.size].reshape(w.shape))
            pos += w.size
            bs.append(theta[pos:pos + b.size].copy())
            pos += b.size
        return MlpModel(self.widths, ws, bs, list(self.activations), self.seed, dict(self.meta))

    def predict(self, X):
        return forward(self, X)[0]

    def to_dict(self):
        return {
            "format": "lithoflow-mlp",
            "version": FORMAT_VERSION,
            "widths": self.widths,
            "activations": self.activations,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "seed": self.seed,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != "lithoflow-mlp" or d.get("version") != FORMAT_VERSION:
            raise ValidationError("not a version-1 lithoflow MLP document")
        return cls(d["widths"], d["weights"], d["biases"], d["activations"], d.get("seed", 0),
                   d.get("meta", {}))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def mlp_init(widths, activations=None, seed=0):
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.

    ``activations`` defaults to tansig on hidden layers and logsig on the
    output layer.
    """
    widths = [int(w) for w in widths]
    if len(widths) < 2 or min(widths) < 1:
        raise ValidationError(f"widths need at least two entries, all >= 1; got {widths}")
    n_layers = len(widths) - 1
    if activations is None:
        activations = ["tansig"] * (n_layers - 1) + ["logsig"]
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for k in range(n_layers):
        bound = 1.0 / np.sqrt(widths[k])
        weights.append(rng.uniform(-bound, bound, size=(widths[k + 1], widths[k])))
        biases.append(np.zeros(widths[k + 1]))
    return MlpModel(widths, weights, biases, list(activations), seed)


def forward(model, X):
    """Forward pass.

    Returns ``(output, layer_outputs)`` where ``layer_outputs[0]`` is the
    input and ``layer_outputs[-1]`` the output. A 1-D ``X`` is one sample.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_in:
        raise ValidationError(f"input must have {model.n_in} columns, got shape {X.shape}")
    outs = [X]
    y = X
    for W, b, act in zip(model.weights, model.biases, model.activations):
        y = ACTIVATIONS[act](y @ W.T + b)
        outs.append(y)
    return (y[0] if single else y), outs


def loss_and_gradient(model, X, D):
    """Half mean squared error summed over outputs, and its gradient.

    ``loss = sum((D - Y)^2) / (2 N)`` for ``N`` samples. The gradient is a
    flat vector in :meth:`MlpModel.get_params` order.
    """
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if model.n_in == 1 else X[None, :]
    if D.ndim == 1:
        D = D[:, None]
    n = X.shape[0]
    if n == 0:
        raise ValidationError("empty batch")
    if D.shape != (n, model.n_out):
        raise ValidationError(f"targets must have shape ({n}, {model.n_out}), got {D.shape}")
    Y, outs = forward(model, X)
    err = D - Y
    loss = 0.5 * float(np.sum(err * err)) / n
    if not np.isfinite(loss):
        raise NumericError("non-finite training loss")
    # local gradient of the output layer, then propagate backwards
    delta = -err * _derivative(model.activations[-1], Y) / n
    grads = []
    for k in range(len(model.weights) - 1, -1, -1):
        grads.append(np.sum(delta, axis=0))
        grads.append((delta.T @ outs[k]).ravel())
        if k:
            delta = (delta @ model.weights[k]) * _derivative(model.activations[k - 1], outs[k])
    grads.reverse()
    return loss, np.concatenate(grads)
