"""Variable-selection and prediction-quality metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigurationError, UndefinedMetricError


@dataclass(frozen=True)
class SelectionReport:
    sensitivity: float
    specificity: float
    selected: frozenset
    truth: frozenset


def selection_metrics(selected, truth, d: int) -> SelectionReport:
    """Sensitivity = TP / |truth|, specificity = TN / (d - |truth|).

    Indices are 1-based variable labels.
    """
    selected, truth = frozenset(int(j) for j in selected), frozenset(int(j) for j in truth)
    universe = range(1, d + 1)
    for name, s in (("selected", selected), ("truth", truth)):
        if any(j not in universe for j in s):
            raise InvalidConfigurationError(f"{name} has indices outside 1..{d}")
    if not truth or len(truth) == d:
        raise UndefinedMetricError(
            "truth must be a nonempty proper subset of the variables"
        )
    true_pos = len(selected & truth)
    true_neg = d - len(selected | truth)
    return SelectionReport(
        sensitivity=true_pos / len(truth),
        specificity=true_neg / (d - len(truth)),
        selected=selected,
        truth=truth,
    )


def relative_test_error(f_true, f_hat) -> float:
    """``sqrt(sum (f - f_hat)^2 / sum f^2)`` in original output units."""
    f_true = np.asarray(f_true, dtype=float).ravel()
    f_hat = np.asarray(f_hat, dtype=float).ravel()
    if f_true.shape != f_hat.shape:
        raise InvalidConfigurationError(
            f"length mismatch: {f_true.shape[0]} vs {f_hat.shape[0]}"
        )
    denom = float(np.dot(f_true, f_true))
    if not denom > 0:
        raise UndefinedMetricError("reference values are all zero")
    diff = f_true - f_hat
    return float(np.sqrt(np.dot(diff, diff) / denom))
