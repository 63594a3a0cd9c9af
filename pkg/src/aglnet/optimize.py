"""Training loops: Adam for the unpenalized estimator, proximal gradient for
the (adaptive) group-Lasso fit.

One group is one column of the penalized weight matrix, i.e. every weight
leaving one input variable (layer 1) or one first-layer unit (layer 2). The
penalty is ``lam * sum_j w_j * ||W[:, j]||`` with ``w_j = 1 / ||W~[:, j]||^2``
from an unpenalized fit (adaptive) or ``w_j = 1`` (plain group Lasso). Both
variants run through :func:`fit_penalized`.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .datagen import Dataset
from .errors import DivergenceError, InvalidConfigurationError
from .network import (
    Architecture,
    MlpParams,
    column_norms,
    extract_support,
    init_params,
    loss_and_grad,
    loss_mse,
)

log = logging.getLogger(__name__)

DEFAULT_LR = 0.005
DEFAULT_THRESHOLD = 1e-4
# columns of the initial estimator below this norm get an infinite penalty
ELIMINATION_NORM = 1e-12


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0
    lr: float = DEFAULT_LR
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: MlpParams, **kw) -> "AdamState":
        arrays = params.arrays()
        return cls([np.zeros_like(a) for a in arrays], [np.zeros_like(a) for a in arrays], **kw)


def adam_step(params: MlpParams, grads: MlpParams, state: AdamState):
    """One bias-corrected Adam update, applied in place; returns ``(params, state)``."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    step = state.lr / (1.0 - b1**state.t)
    c2 = 1.0 - b2**state.t
    for p, g, m, v in zip(params.arrays(), grads.arrays(), state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= step * m / (np.sqrt(v / c2) + state.eps)
    return params, state


@dataclass
class FitResult:
    params: MlpParams
    support: frozenset
    loss_trace: np.ndarray
    lam: float = 0.0
    train_mse: float = float("nan")
    objective_trace: np.ndarray | None = None
    gamma: float | None = None
    retries: int = 0
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)
    seed: int | None = None

    def to_record(self, every: int = 50) -> dict:
        """Run record for logs: trace subsampled every ``every`` steps."""
        trace = np.asarray(self.loss_trace, dtype=float)
        return {
            "config": self.config,
            "seed": self.seed,
            "lambda": self.lam,
            "gamma": self.gamma,
            "retries": self.retries,
            "train_mse": self.train_mse,
            "loss_trace": [float(v) for v in trace[::every]],
            "support": sorted(self.support),
            "wall_time": self.wall_time,
        }


def _training_arrays(data: Dataset, dtype):
    return np.ascontiguousarray(data.X, dtype=dtype), np.ascontiguousarray(data.y, dtype=dtype)


@np.errstate(over="ignore", invalid="ignore")  # divergence is detected and raised
def _run_adam(params, arch, X, y, iters, lr, masks=None, label="adam"):
    """Full-batch Adam; ``masks`` maps layer index -> boolean column mask to keep."""
    state = AdamState.zeros_like(params, lr=lr)
    trace = np.empty(iters)
    frozen = {i: ~mask for i, mask in (masks or {}).items()}
    for i, cols in frozen.items():
        params.weights[i][:, cols] = 0
    for k in range(iters):
        loss, grads = loss_and_grad(params, arch, X, y)
        if not np.isfinite(loss):
            raise DivergenceError(f"{label}: non-finite loss at iteration {k}", step=k)
        trace[k] = loss
        for i, cols in frozen.items():
            grads.weights[i][:, cols] = 0
        adam_step(params, grads, state)
    return trace


def fit_initial(
    arch: Architecture,
    data: Dataset,
    iter_max: int = 10000,
    seed: int = 0,
    lr: float = DEFAULT_LR,
    dtype=np.float64,
) -> FitResult:
    """Unpenalized least-squares fit by full-batch Adam from a seeded init.

    The returned parameters are not truncated; they are the initial estimator
    that supplies adaptive weights (and the warm start of the penalized fit).
    """
    if data.m == 0:
        raise InvalidConfigurationError("empty training data")
    t_start = time.perf_counter()
    params = init_params(arch, seed, dtype)
    X, y = _training_arrays(data, dtype)
    trace = _run_adam(params, arch, X, y, iter_max, lr)
    return FitResult(
        params=params,
        support=extract_support(params, 1, 0.0),
        loss_trace=trace,
        train_mse=loss_mse(params, arch, X, y),
        wall_time=time.perf_counter() - t_start,
        config={"kind": "initial", "iter_max": iter_max, "lr": lr},
        seed=seed,
    )


def make_adaptive_weights(initial: MlpParams, penalized_layer: int = 1) -> np.ndarray:
    """``1 / ||W~[:, j]||^2`` per column; ``inf`` marks a pre-eliminated column."""
    norms = column_norms(initial.weights[penalized_layer - 1])
    w = np.full(norms.shape, np.inf)
    ok = norms >= ELIMINATION_NORM
    w[ok] = 1.0 / norms[ok] ** 2
    return w


def _shrink_factors(norms, thresholds):
    scale = np.zeros_like(norms)
    nz = norms > 0
    scale[nz] = np.maximum(0.0, norms[nz] - thresholds[nz]) / norms[nz]
    return scale


def _thresholds(weights, lam, gamma):
    w = np.asarray(weights, dtype=float)
    finite = np.isfinite(w)
    t = np.zeros_like(w)
    t[finite] = lam * gamma * w[finite]
    return t, ~finite


def group_prox(W, weights, lam: float, gamma: float) -> np.ndarray:
    """Column-wise group soft-thresholding.

    Column ``j`` becomes ``max(0, ||W_j|| - lam*gamma*w_j) / ||W_j|| * W_j``;
    columns with infinite weight, and zero columns, map to zero.
    """
    W = np.asarray(W)
    thr, eliminated = _thresholds(weights, lam, gamma)
    if thr.shape[0] != W.shape[1]:
        raise InvalidConfigurationError("one weight per column is required")
    scale = _shrink_factors(column_norms(W), thr)
    scale[eliminated] = 0.0
    return W * scale.astype(W.dtype)


def penalty(W, weights, lam: float) -> float:
    w = np.asarray(weights, dtype=float)
    norms = column_norms(W)
    finite = np.isfinite(w)
    return float(lam * np.dot(w[finite], norms[finite]))


@dataclass
class ProxConfig:
    lam: float
    gamma: float = DEFAULT_LR
    penalized_layer: int = 1
    weights: np.ndarray | None = None  # None -> plain group Lasso (all ones)
    epoch_max: int = 5000
    threshold: float = DEFAULT_THRESHOLD
    warm_start: bool = False
    refit_iters: int = 0
    refit_lr: float = DEFAULT_LR
    retry_factor: float = 0.2
    max_retries: int = 1

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidConfigurationError("lambda must be nonnegative")
        if not self.gamma > 0:
            raise InvalidConfigurationError("gamma must be positive")
        if self.penalized_layer not in (1, 2):
            raise InvalidConfigurationError("penalized_layer must be 1 or 2")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if np.any(w[np.isfinite(w)] <= 0) or np.any(np.isnan(w)):
                raise InvalidConfigurationError("group weights must be positive")

    def to_dict(self):
        return {
            "lambda": self.lam,
            "gamma": self.gamma,
            "penalized_layer": self.penalized_layer,
            "adaptive": self.weights is not None,
            "epoch_max": self.epoch_max,
            "threshold": self.threshold,
            "warm_start": self.warm_start,
            "refit_iters": self.refit_iters,
        }


def truncate_params(params: MlpParams, threshold: float) -> MlpParams:
    """Zero every weight (not bias) with magnitude below ``threshold``, in place."""
    for w in params.weights:
        w[np.abs(w) < threshold] = 0
    return params


@np.errstate(over="ignore", invalid="ignore")
def _prox_loop(arch, X, y, params, weights, lam, gamma, layer, epochs):
    W = params.weights[layer]
    thr, eliminated = _thresholds(weights, lam, gamma)
    finite_w = np.where(eliminated, 0.0, weights)
    W[:, eliminated] = 0
    loss_trace = np.empty(epochs)
    obj_trace = np.empty(epochs)
    for k in range(epochs):
        loss, grads = loss_and_grad(params, arch, X, y)
        if not np.isfinite(loss):
            raise DivergenceError(f"proximal loop: non-finite loss at epoch {k}", step=k)
        norms = column_norms(W)
        loss_trace[k] = loss
        obj_trace[k] = loss + lam * float(np.dot(finite_w, norms))
        for a, g in zip(params.arrays(), grads.arrays()):
            a -= gamma * g
        scale = _shrink_factors(column_norms(W), thr)
        scale[eliminated] = 0.0
        W *= scale.astype(W.dtype)
    return loss_trace, obj_trace


def refit_support(
    arch: Architecture,
    data: Dataset,
    params: MlpParams,
    penalized_layer: int = 1,
    iters: int = 2000,
    lr: float = DEFAULT_LR,
    dtype=None,
):
    """Adam on all parameters with the dropped penalized columns held at zero.

    Debiasing step: removes the shrinkage the penalty leaves on the surviving
    groups without letting eliminated groups back in. Works in place.
    """
    dtype = params.dtype if dtype is None else dtype
    X, y = _training_arrays(data, dtype)
    layer = penalized_layer - 1
    keep = column_norms(params.weights[layer]) > 0
    return _run_adam(params, arch, X, y, iters, lr, masks={layer: keep}, label="refit")


def fit_penalized(
    arch: Architecture,
    data: Dataset,
    initial: MlpParams | None,
    cfg: ProxConfig,
    seed: int = 0,
    dtype=None,
) -> FitResult:
    """Proximal-gradient group-Lasso fit.

    Each epoch takes a full-batch gradient step of size ``gamma`` on every
    parameter, then soft-thresholds the columns of the penalized layer. The
    run starts from ``initial`` when ``cfg.warm_start`` (else from a fresh
    seeded init), lasts ``cfg.epoch_max`` epochs, truncates all weights at
    ``cfg.threshold`` and optionally refits the surviving support with Adam.
    A divergent run is retried with ``gamma * retry_factor``.
    """
    if dtype is None:
        dtype = initial.dtype if initial is not None else np.float64
    layer = cfg.penalized_layer - 1
    n_groups = arch.layer_dims[layer]
    weights = np.ones(n_groups) if cfg.weights is None else np.asarray(cfg.weights, float)
    if weights.shape != (n_groups,):
        raise InvalidConfigurationError(
            f"expected {n_groups} group weights, got {weights.shape}"
        )
    if not cfg.warm_start or initial is None:
        if cfg.warm_start:
            log.debug("warm start requested without an initial estimator; using init")
        start = init_params(arch, seed, dtype)
    else:
        start = initial.astype(dtype)
    X, y = _training_arrays(data, dtype)

    t_start = time.perf_counter()
    gamma = cfg.gamma
    retries = 0
    while True:
        params = start.copy()
        try:
            loss_trace, obj_trace = _prox_loop(
                arch, X, y, params, weights, cfg.lam, gamma, layer, cfg.epoch_max
            )
            truncate_params(params, cfg.threshold)
            if cfg.refit_iters > 0:
                refit_trace = refit_support(
                    arch, data, params, cfg.penalized_layer, cfg.refit_iters, cfg.refit_lr
                )
                loss_trace = np.concatenate([loss_trace, refit_trace])
                truncate_params(params, cfg.threshold)
            break
        except DivergenceError:
            if retries >= cfg.max_retries:
                raise
            retries += 1
            gamma *= cfg.retry_factor
            log.warning("fit diverged at lambda=%g; retrying with gamma=%g", cfg.lam, gamma)

    train_mse = loss_mse(params, arch, X, y)
    if not np.isfinite(train_mse):
        raise DivergenceError("non-finite training loss after truncation", step=cfg.epoch_max)
    return FitResult(
        params=params,
        support=extract_support(params, cfg.penalized_layer, cfg.threshold),
        loss_trace=loss_trace,
        lam=cfg.lam,
        train_mse=train_mse,
        objective_trace=obj_trace,
        gamma=gamma,
        retries=retries,
        wall_time=time.perf_counter() - t_start,
        config=cfg.to_dict(),
        seed=seed,
    )
