"""Target functions, noisy training sets and standardized test sets.

All variable indices exposed by this module (``active_set``,
``Dataset.true_support``) are 1-based to match the usual ``x_1 ... x_d``
labelling; arrays are of course indexed from 0.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .errors import DegenerateDataError, InvalidConfigurationError
from .rng import derive_seed, make_rng

TARGET_KINDS = ("lorenz_rhs", "setting1", "setting2", "setting3", "linear_combo")

# 1-based variables used by the three non-polynomial settings
_SETTING_VARS = (16, 17, 18, 19)


def real_power(x, p: int, q: int):
    """``x ** (p/q)`` on the reals for odd ``q``: real q-th root, then power p."""
    if q % 2 == 0:
        raise InvalidConfigurationError(f"real root needs an odd denominator, got {q}")
    x = np.asarray(x, dtype=float)
    root = np.cbrt(x) if q == 3 else np.sign(x) * np.abs(x) ** (1.0 / q)
    return root**p


@dataclass(frozen=True)
class TargetFunction:
    """A scalar function of the d-dimensional state.

    ``kind`` is one of :data:`TARGET_KINDS`. ``index`` is the (1-based)
    equation number for ``lorenz_rhs``; ``combo_matrix`` is the k x d matrix
    for ``linear_combo``.
    """

    kind: str
    dim: int = 40
    index: int | None = None
    forcing: float = 8.0
    combo_matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise InvalidConfigurationError(f"unknown target kind {self.kind!r}")
        if self.kind == "lorenz_rhs":
            if self.index is None or not 1 <= self.index <= self.dim:
                raise InvalidConfigurationError(
                    f"lorenz_rhs needs an equation index in 1..{self.dim}"
                )
            if self.dim < 4:
                raise InvalidConfigurationError("lorenz_rhs needs dim >= 4")
        elif self.kind == "linear_combo":
            if self.combo_matrix is None:
                raise InvalidConfigurationError("linear_combo needs combo_matrix")
            A = np.asarray(self.combo_matrix, dtype=float)
            if A.ndim != 2 or A.shape[1] != self.dim or A.shape[0] < 4:
                raise InvalidConfigurationError(
                    f"combo_matrix must be k x {self.dim} with k >= 4, got {A.shape}"
                )
            object.__setattr__(self, "combo_matrix", A)
        elif self.dim < max(_SETTING_VARS):
            raise InvalidConfigurationError(f"{self.kind} needs dim >= 19")

    @property
    def name(self) -> str:
        if self.kind == "lorenz_rhs":
            return f"lorenz_rhs_{self.index}"
        return self.kind

    @property
    def active_set(self) -> frozenset:
        if self.kind == "lorenz_rhs":
            k, d = self.index, self.dim
            return frozenset(((k + s - 1) % d) + 1 for s in (-2, -1, 0, 1))
        if self.kind == "linear_combo":
            return frozenset()
        return frozenset(_SETTING_VARS)

    def __call__(self, x):
        return evaluate_target(self, x)


def evaluate_target(tf: TargetFunction, x) -> np.ndarray | float:
    """Evaluate ``tf`` at one state (shape ``(d,)``) or a batch (``(m, d)``)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != tf.dim:
        raise InvalidConfigurationError(f"expected {tf.dim} columns, got {X.shape[1]}")

    def col(j):  # 1-based
        return X[:, j - 1]

    if tf.kind == "lorenz_rhs":
        d, k = tf.dim, tf.index - 1
        xm2, xm1, x0, xp1 = (X[:, (k + s) % d] for s in (-2, -1, 0, 1))
        out = -xm2 * xm1 + xm1 * xp1 - x0 + tf.forcing
    elif tf.kind == "setting1":
        p = {j: real_power(col(j), 4, 3) for j in _SETTING_VARS}
        out = (p[19] - p[16]) * p[17] - p[18] + 8.0
    elif tf.kind == "setting2":
        e = {j: np.exp(col(j) / 50.0) for j in _SETTING_VARS}
        out = (e[19] - e[16]) * e[17] - e[18] + 8.0
    elif tf.kind == "setting3":
        out = (
            (np.exp(col(19) / 10.0) - real_power(col(16), 2, 3)) * col(17)
            - real_power(col(18), 4, 5)
            + 8.0
        )
    else:
        z = X @ tf.combo_matrix.T
        out = (z[:, 3] - z[:, 0]) * z[:, 1] - z[:, 2] + 8.0
    return float(out[0]) if single else out


def default_combo_matrix(dim: int = 40, seed: int = 0, rows: int = 4) -> np.ndarray:
    return make_rng(derive_seed(seed, "combo-matrix")).standard_normal((rows, dim))


def target_from_id(target_id: str, dim: int = 40, combo_seed: int = 0) -> TargetFunction:
    """Parse ids such as ``lorenz_rhs_25``, ``setting2`` or ``linear_combo``."""
    m = re.fullmatch(r"lorenz_rhs_(\d+)", target_id)
    if m:
        return TargetFunction("lorenz_rhs", dim=dim, index=int(m.group(1)))
    if target_id == "linear_combo":
        return TargetFunction(
            "linear_combo", dim=dim, combo_matrix=default_combo_matrix(dim, combo_seed)
        )
    return TargetFunction(target_id, dim=dim)


@dataclass(frozen=True)
class NoiseSpec:
    sigma_x: float = 0.0
    sigma_y: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_x < 0 or self.sigma_y < 0:
            raise InvalidConfigurationError("noise levels must be nonnegative")

    def to_dict(self):
        return {"sigma_x": self.sigma_x, "sigma_y": self.sigma_y, "seed": self.seed}


@dataclass
class Dataset:
    """Standardized regression data plus everything needed to undo the scaling.

    ``X = raw_X / sigma`` column-wise and ``y = raw_y / alpha``; no centering.
    """

    X: np.ndarray
    y: np.ndarray
    sigma: np.ndarray
    alpha: float
    true_support: frozenset
    raw_X: np.ndarray
    raw_y: np.ndarray
    times: np.ndarray | None = None
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    target: str = ""

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def scale_inputs(self, raw_X) -> np.ndarray:
        return np.asarray(raw_X, dtype=float) / self.sigma

    def unscale_outputs(self, y_std) -> np.ndarray:
        return np.asarray(y_std, dtype=float) * self.alpha

    @property
    def scales(self):
        return self.sigma, self.alpha


def standardize(raw_X, raw_y):
    """Divide by sample standard deviations (ddof=1); returns X, y, sigma, alpha."""
    raw_X = np.asarray(raw_X, dtype=float)
    raw_y = np.asarray(raw_y, dtype=float)
    if raw_X.shape[0] < 2:
        raise InvalidConfigurationError("need at least two samples to standardize")
    sigma = raw_X.std(axis=0, ddof=1)
    bad = np.flatnonzero(~(sigma > 0))
    if bad.size:
        raise DegenerateDataError(f"input column x{bad[0] + 1} has zero variance")
    alpha = float(raw_y.std(ddof=1))
    if not alpha > 0:
        raise DegenerateDataError("output column y has zero variance")
    return raw_X / sigma, raw_y / alpha, sigma, alpha


def _window_or_raise(traj: Trajectory, t_range) -> np.ndarray:
    t_a, t_b = t_range
    if not t_b > t_a:
        raise InvalidConfigurationError(f"empty time range {t_range}")
    idx = traj.window(t_a, t_b)
    if idx.size == 0:
        raise InvalidConfigurationError(f"no trajectory samples in ({t_a}, {t_b}]")
    return idx


def make_dataset(
    traj: Trajectory,
    tf: TargetFunction,
    noise: NoiseSpec,
    t_range=(0.0, 80.0),
    scale_window=None,
) -> Dataset:
    """Noisy training set on the samples with ``t_a < t <= t_b``.

    Inputs get ``sigma_x * M_x * N(0, I)`` and outputs ``sigma_y * M_y * N(0, 1)``
    where ``M_x`` (``M_y``) is the largest absolute noiseless input (output) on
    ``scale_window`` (defaults to ``t_range``). Output noise is added to
    ``f(clean state)``. The two noise streams come from separately derived
    seeds, so changing ``sigma_x`` never alters the output noise draw.
    """
    idx = _window_or_raise(traj, t_range)
    clean = traj.states[idx]
    f_clean = np.asarray(evaluate_target(tf, clean))

    if scale_window is None:
        clean_s, f_s = clean, f_clean
    else:
        sidx = _window_or_raise(traj, scale_window)
        clean_s = traj.states[sidx]
        f_s = np.asarray(evaluate_target(tf, clean_s))
    M_x = float(np.max(np.abs(clean_s)))
    M_y = float(np.max(np.abs(f_s)))

    raw_X = clean.copy()
    raw_y = f_clean.copy()
    if noise.sigma_x > 0:
        rng_x = make_rng(derive_seed(noise.seed, "input-noise"))
        raw_X += (noise.sigma_x * M_x) * rng_x.standard_normal(clean.shape)
    if noise.sigma_y > 0:
        rng_y = make_rng(derive_seed(noise.seed, "output-noise"))
        raw_y += (noise.sigma_y * M_y) * rng_y.standard_normal(raw_y.shape)

    X, y, sigma, alpha = standardize(raw_X, raw_y)
    return Dataset(
        X=X,
        y=y,
        sigma=sigma,
        alpha=alpha,
        true_support=tf.active_set,
        raw_X=raw_X,
        raw_y=raw_y,
        times=traj.times[idx].copy(),
        noise=noise,
        target=tf.name,
    )


def make_test_set(traj: Trajectory, tf: TargetFunction, scales, t_range=(80.0, 100.0)) -> Dataset:
    """Noiseless samples on ``(t_a, t_b]`` scaled with the *training* ``(sigma, alpha)``."""
    t_a, t_b = t_range
    if traj.times[-1] < t_b - 1e-9 * max(1.0, abs(t_b)):
        raise InvalidConfigurationError(
            f"trajectory ends at t={traj.times[-1]}, test window needs t={t_b}"
        )
    idx = _window_or_raise(traj, t_range)
    sigma, alpha = scales
    sigma = np.asarray(sigma, dtype=float)
    raw_X = traj.states[idx].copy()
    raw_y = np.asarray(evaluate_target(tf, raw_X))
    return Dataset(
        X=raw_X / sigma,
        y=raw_y / alpha,
        sigma=sigma,
        alpha=float(alpha),
        true_support=tf.active_set,
        raw_X=raw_X,
        raw_y=raw_y,
        times=traj.times[idx].copy(),
        noise=NoiseSpec(),
        target=tf.name,
    )


def save_dataset(ds: Dataset, path) -> Path:
    """Write raw (unscaled) values to ``path`` and metadata to ``path.json``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(1, ds.d + 1)] + ["y"])
        for row, yv in zip(ds.raw_X, ds.raw_y):
            writer.writerow([f"{v:.17g}" for v in row] + [f"{yv:.17g}"])
    meta = {
        "target": ds.target,
        "sigma": [float(s) for s in ds.sigma],
        "alpha": float(ds.alpha),
        "noise": ds.noise.to_dict(),
        "true_support": sorted(int(j) for j in ds.true_support),
        "times": None if ds.times is None else [float(t) for t in ds.times],
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=1))
    return path


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def load_dataset(path) -> Dataset:
    path = Path(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    meta = json.loads(sidecar_path(path).read_text())
    raw_X, raw_y = data[:, :-1].copy(), data[:, -1].copy()
    sigma = np.asarray(meta["sigma"], dtype=float)
    alpha = float(meta["alpha"])
    times = meta.get("times")
    return Dataset(
        X=raw_X / sigma,
        y=raw_y / alpha,
        sigma=sigma,
        alpha=alpha,
        true_support=frozenset(meta.get("true_support", ())),
        raw_X=raw_X,
        raw_y=raw_y,
        times=None if times is None else np.asarray(times, dtype=float),
        noise=NoiseSpec(**meta.get("noise", {})),
        target=meta.get("target", ""),
    )
