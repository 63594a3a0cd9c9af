"""Dense tanh regression network with hand-written reverse-mode gradients.

Layer ``l`` (1-based, ``l = 1..L``) computes ``W_l h + b_l`` with ``W_l`` of
shape ``(dims[l], dims[l-1])``. Hidden layers apply ``tanh``; the first layer
may use the identity instead (used when the penalty sits on layer 2). The
output layer is linear and one-dimensional.

Inputs are stored row-wise: ``X`` has shape ``(m, d)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidConfigurationError
from .rng import make_rng

ACTIVATIONS = ("tanh", "identity")


@dataclass(frozen=True)
class Architecture:
    layer_dims: tuple
    first_activation: str = "tanh"

    def __post_init__(self):
        dims = tuple(int(v) for v in self.layer_dims)
        object.__setattr__(self, "layer_dims", dims)
        if len(dims) < 2:
            raise InvalidConfigurationError("need at least one weight layer")
        if any(v <= 0 for v in dims):
            raise InvalidConfigurationError(f"layer sizes must be positive: {dims}")
        if dims[-1] != 1:
            raise InvalidConfigurationError("output dimension must be 1")
        if self.first_activation not in ACTIVATIONS:
            raise InvalidConfigurationError(
                f"first_activation must be one of {ACTIVATIONS}"
            )

    @classmethod
    def standard(cls, d: int, hidden: int = 20, n_hidden: int = 3, first_activation="tanh"):
        """``d -> hidden x n_hidden -> 1``; the default is three hidden layers of 20."""
        return cls((d,) + (hidden,) * n_hidden + (1,), first_activation)

    @property
    def n_layers(self) -> int:
        return len(self.layer_dims) - 1

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    def n_params(self) -> int:
        dims = self.layer_dims
        return sum(dims[i + 1] * (dims[i] + 1) for i in range(self.n_layers))

    def has_tanh(self, layer: int) -> bool:
        """Whether the output of 0-based ``layer`` goes through tanh."""
        if layer == self.n_layers - 1:
            return False
        return layer > 0 or self.first_activation == "tanh"

    def to_dict(self):
        return {"layer_dims": list(self.layer_dims), "first_activation": self.first_activation}


@dataclass
class MlpParams:
    weights: list
    biases: list = field(default_factory=list)

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def astype(self, dtype) -> "MlpParams":
        return MlpParams(
            [np.array(w, dtype=dtype) for w in self.weights],
            [np.array(b, dtype=dtype) for b in self.biases],
        )

    @property
    def dtype(self):
        return self.weights[0].dtype

    def arrays(self) -> list:
        """Weights followed by biases; the order used by flat views and Adam."""
        return list(self.weights) + list(self.biases)

    def flatten(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def unflatten(self, flat) -> "MlpParams":
        out, k = [], 0
        for a in self.arrays():
            out.append(np.asarray(flat[k : k + a.size], dtype=a.dtype).reshape(a.shape))
            k += a.size
        n = len(self.weights)
        return MlpParams(out[:n], out[n:])

    def check(self, arch: Architecture):
        dims = arch.layer_dims
        if len(self.weights) != arch.n_layers or len(self.biases) != arch.n_layers:
            raise InvalidConfigurationError("parameter count does not match architecture")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[i + 1], dims[i]) or b.shape != (dims[i + 1],):
                raise InvalidConfigurationError(
                    f"layer {i + 1}: got W{w.shape}, b{b.shape}, "
                    f"expected W{(dims[i + 1], dims[i])}, b{(dims[i + 1],)}"
                )


# gradients share the parameter layout
Gradients = MlpParams


def init_params(arch: Architecture, seed: int, dtype=np.float64) -> MlpParams:
    """Uniform fan-in/fan-out (Glorot) weights, zero biases."""
    rng = make_rng(seed)
    dims = arch.layer_dims
    weights, biases = [], []
    for i in range(arch.n_layers):
        fan_in, fan_out = dims[i], dims[i + 1]
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return MlpParams(weights, biases)


def _as_input(X, arch: Architecture, dtype) -> np.ndarray:
    X = np.asarray(X, dtype=dtype)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != arch.input_dim:
        raise InvalidConfigurationError(
            f"input has shape {X.shape}, expected (m, {arch.input_dim})"
        )
    return X


def _forward_cache(params: MlpParams, arch: Architecture, X) -> list:
    """Layer outputs ``[X, h_1, ..., h_L]``; ``h_l`` is post-activation."""
    acts = [X]
    h = X
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w.T
        z += b
        if arch.has_tanh(i):
            np.tanh(z, out=z)
        acts.append(z)
        h = z
    return acts


def forward(params: MlpParams, arch: Architecture, X) -> np.ndarray:
    params.check(arch)
    X = _as_input(X, arch, params.dtype)
    return _forward_cache(params, arch, X)[-1][:, 0]


def loss_mse(params: MlpParams, arch: Architecture, X, y) -> float:
    """Mean squared residual ``(1/m) sum (y_i - F(x_i))^2``."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise InvalidConfigurationError("empty data")
    pred = forward(params, arch, X)
    if pred.shape[0] != y.shape[0]:
        raise InvalidConfigurationError("X and y disagree on the number of samples")
    r = pred.astype(float) - y
    return float(np.dot(r, r) / y.size)


def loss_and_grad(params: MlpParams, arch: Architecture, X, y):
    """MSE and its exact gradient from a single forward/backward sweep.

    ``X`` and ``y`` are used as given (no dtype conversion or validation),
    which keeps the training loops free of per-iteration copies.
    """
    acts = _forward_cache(params, arch, X)
    m = y.shape[0]
    r = acts[-1][:, 0] - y
    loss = float(np.dot(r, r)) / m
    delta = (2.0 / m) * r[:, None]
    n = arch.n_layers
    gw, gb = [None] * n, [None] * n
    for i in range(n - 1, -1, -1):
        gw[i] = delta.T @ acts[i]
        gb[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ params.weights[i]
            if arch.has_tanh(i - 1):
                h = acts[i]
                delta *= 1.0 - h * h
    return loss, Gradients(gw, gb)


def backward(params: MlpParams, arch: Architecture, X, y) -> Gradients:
    params.check(arch)
    X = _as_input(X, arch, params.dtype)
    y = np.asarray(y, dtype=params.dtype).ravel()
    if X.shape[0] != y.shape[0]:
        raise InvalidConfigurationError("X and y disagree on the number of samples")
    if y.size == 0:
        raise InvalidConfigurationError("empty data")
    return loss_and_grad(params, arch, X, y)[1]


def column_norms(W) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->j", W, W, dtype=np.float64))


def truncate(W, threshold: float) -> np.ndarray:
    """Copy of ``W`` with entries below ``threshold`` in magnitude set to zero."""
    W = np.array(W, copy=True)
    W[np.abs(W) < threshold] = 0
    return W


def extract_support(params: MlpParams, penalized_layer: int = 1, threshold: float = 1e-4) -> frozenset:
    """1-based column indices of ``W_layer`` that survive truncation."""
    if penalized_layer not in (1, 2):
        raise InvalidConfigurationError("penalized_layer must be 1 or 2")
    if threshold < 0:
        raise InvalidConfigurationError("threshold must be nonnegative")
    W = truncate(params.weights[penalized_layer - 1], threshold)
    return frozenset(int(j) + 1 for j in np.flatnonzero(column_norms(W) > 0))


def params_to_dict(params: MlpParams, arch: Architecture, scales=None) -> dict:
    """JSON-ready document; weights are nested row-major lists."""
    out = {
        "architecture": arch.to_dict(),
        "weights": [w.astype(float).tolist() for w in params.weights],
        "biases": [b.astype(float).tolist() for b in params.biases],
    }
    if scales is not None:
        sigma, alpha = scales
        out["scales"] = {"sigma": [float(s) for s in sigma], "alpha": float(alpha)}
    return out


def params_from_dict(doc: dict):
    """Inverse of :func:`params_to_dict`; returns ``(params, arch, scales)``."""
    arch = Architecture(**doc["architecture"])
    params = MlpParams(
        [np.asarray(w, dtype=float) for w in doc["weights"]],
        [np.asarray(b, dtype=float) for b in doc["biases"]],
    )
    params.check(arch)
    scales = doc.get("scales")
    if scales is not None:
        scales = (np.asarray(scales["sigma"], dtype=float), float(scales["alpha"]))
    return params, arch, scales


def save_params(path, params: MlpParams, arch: Architecture, scales=None, **extra) -> Path:
    doc = params_to_dict(params, arch, scales)
    doc.update(extra)
    path = Path(path)
    path.write_text(json.dumps(doc))
    return path


def load_params(path):
    return params_from_dict(json.loads(Path(path).read_text()))
