"""Regularization paths scored by the Bayesian information criterion."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import AglnetError, InvalidConfigurationError, SweepError

log = logging.getLogger(__name__)

DOF_CONVENTIONS = ("free-params", "selected-groups")


@dataclass(frozen=True)
class LambdaGrid:
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise InvalidConfigurationError("lambda grid is empty")
        if any(not v > 0 for v in vals):
            raise InvalidConfigurationError("lambda values must be positive")
        if any(a <= b for a, b in zip(vals, vals[1:])):
            raise InvalidConfigurationError("lambda grid must be strictly decreasing")

    @classmethod
    def logspace(cls, lo: float = 1e-5, hi: float = 1e1, n: int = 25) -> "LambdaGrid":
        return cls(tuple(np.logspace(np.log10(hi), np.log10(lo), n)))

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "LambdaGrid":
        return cls(tuple(sorted({float(v) for v in values}, reverse=True)))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass
class BicRecord:
    lam: float
    mse: float
    dof: int
    bic: float
    support: frozenset = field(default_factory=frozenset)
    degenerate: bool = False  # mse == 0, bic is -inf

    @property
    def support_size(self) -> int:
        return len(self.support)


def bic_score(mse: float, dof: int, m: int) -> float:
    """``m ln(mse) + dof ln(m)``; ``-inf`` for a perfect fit."""
    if m <= 0:
        raise InvalidConfigurationError("m must be positive")
    if dof < 0:
        raise InvalidConfigurationError("dof must be nonnegative")
    if mse < 0 or not np.isfinite(mse):
        raise InvalidConfigurationError(f"invalid mse {mse!r}")
    if mse == 0:
        return -math.inf
    return m * math.log(mse) + dof * math.log(m)


def network_dof(layer_dims, n_selected: int, penalized_layer: int = 1, convention="free-params") -> int:
    """Effective parameter count of a group-sparse network.

    ``free-params``: every weight of a surviving group, all other weight
    matrices, and all biases. ``selected-groups``: surviving group weights only.
    """
    if convention not in DOF_CONVENTIONS:
        raise InvalidConfigurationError(f"unknown dof convention {convention!r}")
    dims = tuple(layer_dims)
    k = penalized_layer - 1
    group_size = dims[k + 1]
    if convention == "selected-groups":
        return n_selected * group_size
    other_weights = sum(dims[i + 1] * dims[i] for i in range(len(dims) - 1) if i != k)
    biases = sum(dims[1:])
    return n_selected * group_size + other_weights + biases


@dataclass
class PathPoint:
    """What a fit procedure returns for one lambda."""

    mse: float
    dof: int
    support: frozenset
    payload: object = None


@dataclass
class SweepResult:
    chosen_lambda: float
    path: list
    chosen: PathPoint
    failures: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)


def choose_lambda(records: list) -> BicRecord:
    """Argmin BIC; ties go to the larger lambda (the sparser model)."""
    if not records:
        raise InvalidConfigurationError("no records to choose from")
    return min(records, key=lambda r: (r.bic, -r.lam))


def sweep(
    fit: Callable[[float], PathPoint],
    grid: LambdaGrid,
    m: int,
    map_fn: Callable = map,
) -> SweepResult:
    """Fit every lambda independently and keep the BIC minimizer.

    ``fit(lam)`` returns a :class:`PathPoint`. ``map_fn`` lets a caller run the
    grid on a pool; it must preserve order. A fit raising an
    :class:`AglnetError` is recorded as a failure; if every fit fails a
    :class:`SweepError` lists them.
    """

    def guarded(lam):
        try:
            return lam, fit(lam), None
        except AglnetError as exc:
            return lam, None, exc

    points, failures = {}, {}
    for lam, point, err in map_fn(guarded, list(grid)):
        if err is not None:
            log.warning("fit at lambda=%g failed: %s", lam, err)
            failures[lam] = err
        else:
            points[lam] = point
    return reduce_path(points, m, failures)


def reduce_path(points: dict, m: int, failures=None) -> SweepResult:
    """Score already-computed fits (``{lam: PathPoint}``) and pick the BIC minimizer."""
    failures = dict(failures or {})
    records = [
        BicRecord(
            lam=lam,
            mse=p.mse,
            dof=p.dof,
            bic=bic_score(p.mse, p.dof, m),
            support=frozenset(p.support),
            degenerate=p.mse == 0,
        )
        for lam, p in sorted(points.items(), key=lambda kv: -kv[0])
    ]
    if not records:
        raise SweepError("every fit on the lambda grid failed", failures)
    best = choose_lambda(records)
    return SweepResult(
        chosen_lambda=best.lam,
        path=records,
        chosen=points[best.lam],
        failures=failures,
        points=dict(points),
    )


def write_path_csv(records: list, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "mse", "dof", "bic", "support_size", "support"])
        for r in sorted(records, key=lambda r: -r.lam):
            writer.writerow(
                [
                    f"{r.lam:.17g}",
                    f"{r.mse:.17g}",
                    r.dof,
                    f"{r.bic:.17g}",
                    r.support_size,
                    " ".join(str(j) for j in sorted(r.support)),
                ]
            )
    return path
