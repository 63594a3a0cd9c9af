"""Sparse regression on a monomial dictionary (the polynomial baseline).

Columns are all monomials of total degree <= ``degree`` in graded
lexicographic order: ``1, x1, ..., xd, x1^2, x1 x2, ..., xd^2, ...``.
Coefficients solve ``(1/m)||Phi c - y||^2 + lam ||c||_1`` by ISTA, are
truncated at ``1e-4`` and then refit by least squares on the surviving
columns.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from pathlib import Path

import numpy as np

from .errors import InvalidConfigurationError, ResourceError

DEFAULT_MAX_BYTES = 1.5e9


def monomial_combos(d: int, degree: int) -> list:
    """Variable-index tuples (0-based, nondecreasing) of every monomial."""
    combos = []
    for k in range(degree + 1):
        combos.extend(itertools.combinations_with_replacement(range(d), k))
    return combos


def _features(X, combos) -> np.ndarray:
    m = X.shape[0]
    Phi = np.empty((m, len(combos)))
    for p, c in enumerate(combos):
        if not c:
            Phi[:, p] = 1.0
        else:
            col = X[:, c[0]].copy()
            for j in c[1:]:
                col *= X[:, j]
            Phi[:, p] = col
    return Phi


@dataclass
class Dictionary:
    degree: int
    combos: list
    Phi: np.ndarray = field(repr=False)
    d: int = 0

    @property
    def n_terms(self) -> int:
        return len(self.combos)

    @cached_property
    def exponents(self) -> np.ndarray:
        E = np.zeros((self.n_terms, self.d), dtype=int)
        for p, c in enumerate(self.combos):
            for j in c:
                E[p, j] += 1
        return E

    @cached_property
    def gram(self) -> np.ndarray:
        return self.Phi.T @ self.Phi / self.Phi.shape[0]

    @cached_property
    def lipschitz(self) -> float:
        """Lipschitz constant of the gradient ``2 (G c - q)``."""
        return 2.0 * largest_eigenvalue(self.gram)

    def features(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise InvalidConfigurationError(f"expected (m, {self.d}) inputs, got {X.shape}")
        return _features(X, self.combos)

    def term_names(self) -> list:
        names = []
        for c in self.combos:
            if not c:
                names.append("1")
                continue
            parts = []
            for j, grp in itertools.groupby(c):
                k = len(list(grp))
                parts.append(f"x{j + 1}" if k == 1 else f"x{j + 1}^{k}")
            names.append("*".join(parts))
        return names


def build_dictionary(X, degree: int = 2, max_bytes: float = DEFAULT_MAX_BYTES) -> Dictionary:
    X = np.asarray(X, dtype=float)
    if degree < 1:
        raise InvalidConfigurationError("degree must be >= 1")
    if X.ndim != 2:
        raise InvalidConfigurationError("X must be a matrix")
    m, d = X.shape
    P = comb(d + degree, degree)
    need = 8.0 * (m * P + P * P)
    if need > max_bytes:
        raise ResourceError(
            f"degree-{degree} dictionary on {d} variables has {P} terms; "
            f"feature and Gram matrices need {need / 1e9:.2f} GB (budget {max_bytes / 1e9:.2f} GB)"
        )
    combos = monomial_combos(d, degree)
    return Dictionary(degree=degree, combos=combos, Phi=_features(X, combos), d=d)


def largest_eigenvalue(G, n_iter: int = 1000, tol: float = 1e-10, seed: int = 0) -> float:
    """Power iteration for the top eigenvalue of a symmetric PSD matrix."""
    v = np.random.default_rng(seed).standard_normal(G.shape[0])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(n_iter):
        w = G @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
        new = float(v @ G @ v)
        if abs(new - est) <= tol * max(1.0, abs(new)):
            est = new
            break
        est = new
    return est


def soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def lasso_ista(gram, q, lam: float, n_iter: int = 20000, step=None, tol: float = 1e-12, c0=None):
    """ISTA on ``c' G c - 2 q' c + lam ||c||_1`` (the lasso objective up to a constant).

    With ``G = Phi'Phi/m`` and ``q = Phi'y/m`` this is
    ``(1/m)||Phi c - y||^2 + lam ||c||_1``. Stops after ``n_iter`` steps or
    once the largest coefficient change falls below ``tol``.
    Returns ``(c, iterations_used)``.
    """
    if lam < 0:
        raise InvalidConfigurationError("lambda must be nonnegative")
    if step is None:
        L = 2.0 * largest_eigenvalue(gram) * 1.01
        step = 1.0 / L if L > 0 else 1.0
    c = np.zeros(gram.shape[0]) if c0 is None else np.array(c0, dtype=float)
    k = 0
    for k in range(1, n_iter + 1):
        grad = 2.0 * (gram @ c - q)
        c_new = soft_threshold(c - step * grad, step * lam)
        delta = np.max(np.abs(c_new - c)) if c.size else 0.0
        c = c_new
        if delta <= tol:
            break
    return c, k


@dataclass
class SparseCoefficients:
    c: np.ndarray
    lam: float
    support: frozenset  # column indices into the dictionary
    threshold: float = 1e-4
    rank_deficient: bool = False
    lasso_c: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0
    train_mse: float = float("nan")

    @property
    def n_active(self) -> int:
        return len(self.support)


def sparse_solve(
    dic: Dictionary,
    y,
    lam: float,
    n_iter: int = 20000,
    threshold: float = 1e-4,
    tol: float = 1e-12,
    refit: bool = True,
) -> SparseCoefficients:
    """Lasso by ISTA, hard truncation at ``threshold``, then a least-squares refit."""
    y = np.asarray(y, dtype=float).ravel()
    Phi = dic.Phi
    if Phi.shape[0] != y.shape[0]:
        raise InvalidConfigurationError("dictionary rows and y length differ")
    q = Phi.T @ y / y.shape[0]
    step = 1.0 / (1.01 * dic.lipschitz) if dic.lipschitz > 0 else 1.0
    raw, used = lasso_ista(dic.gram, q, lam, n_iter=n_iter, step=step, tol=tol)
    c = raw.copy()
    c[np.abs(c) < threshold] = 0.0
    rank_deficient = False
    if refit:
        S = np.flatnonzero(c)
        c = np.zeros_like(raw)
        if S.size:
            sol, _, rank, _ = np.linalg.lstsq(Phi[:, S], y, rcond=None)
            rank_deficient = bool(rank < S.size)
            c[S] = sol
        c[np.abs(c) < threshold] = 0.0
    r = Phi @ c - y
    return SparseCoefficients(
        c=c,
        lam=lam,
        support=frozenset(int(p) for p in np.flatnonzero(c)),
        threshold=threshold,
        rank_deficient=rank_deficient,
        lasso_c=raw,
        iterations=used,
        train_mse=float(np.dot(r, r) / y.shape[0]),
    )


def dict_support_variables(sc: SparseCoefficients, dic: Dictionary) -> frozenset:
    """1-based variables appearing in at least one surviving monomial."""
    return frozenset(j + 1 for p in sc.support for j in dic.combos[p])


def predict(sc: SparseCoefficients, dic: Dictionary, X_std) -> np.ndarray:
    """Prediction in standardized output units for standardized inputs."""
    S = sorted(sc.support)
    if not S:
        return np.zeros(np.asarray(X_std).shape[0])
    return _features(np.asarray(X_std, dtype=float), [dic.combos[p] for p in S]) @ sc.c[S]


def destandardize(sc: SparseCoefficients, dic: Dictionary, sigma, alpha) -> np.ndarray:
    """Coefficients for raw inputs/outputs: ``alpha * c_p / prod_j sigma_j^e_pj``."""
    sigma = np.asarray(sigma, dtype=float)
    E = dic.exponents
    denom = np.prod(sigma[None, :] ** E, axis=1)
    return alpha * sc.c / denom


def coefficients_to_dict(sc: SparseCoefficients, dic: Dictionary, scales=None) -> dict:
    """JSON-ready summary keeping only surviving terms."""
    S = sorted(sc.support)
    E = dic.exponents
    names = dic.term_names()
    out = {
        "degree": dic.degree,
        "d": dic.d,
        "lambda": sc.lam,
        "threshold": sc.threshold,
        "terms": [
            {"exponents": E[p].tolist(), "name": names[p], "coef_standardized": float(sc.c[p])}
            for p in S
        ],
        "diagnostics": {
            "rank_deficient": sc.rank_deficient,
            "ista_iterations": sc.iterations,
            "train_mse": sc.train_mse,
            "n_terms_total": dic.n_terms,
        },
    }
    if scales is not None:
        raw = destandardize(sc, dic, *scales)
        for term, p in zip(out["terms"], S):
            term["coef_original"] = float(raw[p])
        out["scales"] = {"sigma": [float(s) for s in scales[0]], "alpha": float(scales[1])}
    return out


def save_coefficients(path, sc: SparseCoefficients, dic: Dictionary, scales=None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(coefficients_to_dict(sc, dic, scales), indent=1))
    return path


def predict_from_dict(doc: dict, X_raw) -> np.ndarray:
    """Original-unit predictions from a saved coefficient document."""
    X_raw = np.asarray(X_raw, dtype=float)
    out = np.zeros(X_raw.shape[0])
    for term in doc["terms"]:
        e = np.asarray(term["exponents"])
        out += term["coef_original"] * np.prod(X_raw ** e[None, :], axis=1)
    return out
