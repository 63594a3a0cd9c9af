"""Lorenz-96 vector field and a fixed-step RK4 integrator.

Variables are stored 0-based; the cyclic neighbours of component ``j`` are
``j-2, j-1, j+1`` modulo ``d``. Anything written to disk uses 1-based labels
(``x1 ... xd``).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DivergenceError, InvalidConfigurationError

_STEP_RTOL = 1e-9


def lorenz96_rhs(x: np.ndarray, forcing: float) -> np.ndarray:
    """Time derivative ``-x[j-2] x[j-1] + x[j-1] x[j+1] - x[j] + F``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 4:
        raise InvalidConfigurationError(
            f"Lorenz-96 needs a state vector of length >= 4, got shape {x.shape}"
        )
    return (np.roll(x, -1) - np.roll(x, 2)) * np.roll(x, 1) - x + forcing


@dataclass(frozen=True)
class OdeConfig:
    dim: int = 40
    forcing: float = 8.0
    dt: float = 0.01
    t0: float = 0.0
    t_final: float = 100.0
    x0: tuple = field(default=None)

    def __post_init__(self):
        if self.x0 is None:
            object.__setattr__(self, "x0", tuple(default_initial_state(self.dim)))
        else:
            object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        self.validate()

    @property
    def n_steps(self) -> int:
        return int(round((self.t_final - self.t0) / self.dt))

    def validate(self):
        if self.dim < 4:
            raise InvalidConfigurationError(f"dim must be >= 4, got {self.dim}")
        if len(self.x0) != self.dim:
            raise InvalidConfigurationError(
                f"x0 has length {len(self.x0)}, expected {self.dim}"
            )
        if not np.all(np.isfinite(self.x0)):
            raise InvalidConfigurationError("x0 must be finite")
        if not self.dt > 0:
            raise InvalidConfigurationError(f"dt must be positive, got {self.dt}")
        if self.t_final < self.t0:
            raise InvalidConfigurationError("t_final must not precede t0")
        ratio = (self.t_final - self.t0) / self.dt
        if abs(ratio - round(ratio)) > _STEP_RTOL * max(1.0, ratio):
            raise InvalidConfigurationError(
                f"(t_final - t0)/dt = {ratio!r} is not an integer"
            )


def default_initial_state(dim: int = 40, bump_index: int = 20, bump: float = 1.008):
    """All ones except ``x_{bump_index}`` (1-based), the standard perturbed start."""
    x0 = np.ones(dim)
    if 1 <= bump_index <= dim:
        x0[bump_index - 1] = bump
    return x0


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def dt(self) -> float:
        if len(self.times) < 2:
            return float("nan")
        return float(self.times[1] - self.times[0])

    def window(self, t_start: float, t_end: float) -> np.ndarray:
        """Row indices with ``t_start < t <= t_end`` (half-open on the left)."""
        tol = 1e-9 * max(1.0, abs(t_end))
        return np.flatnonzero((self.times > t_start + tol) & (self.times <= t_end + tol))


def rk4_step(x: np.ndarray, dt: float, forcing: float) -> np.ndarray:
    k1 = lorenz96_rhs(x, forcing)
    k2 = lorenz96_rhs(x + 0.5 * dt * k1, forcing)
    k3 = lorenz96_rhs(x + 0.5 * dt * k2, forcing)
    k4 = lorenz96_rhs(x + dt * k3, forcing)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(cfg: OdeConfig) -> Trajectory:
    """Classical RK4 at fixed step ``cfg.dt``; every step is kept."""
    cfg.validate()
    n = cfg.n_steps
    states = np.empty((n + 1, cfg.dim))
    x = np.asarray(cfg.x0, dtype=float)
    states[0] = x
    with np.errstate(over="ignore", invalid="ignore"):  # blow-up is reported below
        for i in range(1, n + 1):
            x = rk4_step(x, cfg.dt, cfg.forcing)
            if not np.all(np.isfinite(x)):
                raise DivergenceError(f"non-finite state at step {i}", step=i)
            states[i] = x
    times = cfg.t0 + cfg.dt * np.arange(n + 1)
    return Trajectory(times=times, states=states)


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    d = traj.states.shape[1]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{j}" for j in range(1, d + 1)])
        for t, row in zip(traj.times, traj.states):
            writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])
    return path


def read_trajectory_csv(path) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Trajectory(times=data[:, 0].copy(), states=data[:, 1:].copy())
