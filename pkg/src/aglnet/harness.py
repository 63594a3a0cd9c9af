"""Seeded, replicated method comparisons and their CSV/JSON outputs.

A run integrates one Lorenz-96 trajectory, then for each replicate draws a
fresh noisy training set (only the noise differs between replicates), fits
every requested method and scores it on the shared noiseless test window.

Seeds are derived with :func:`aglnet.rng.derive_seed` from
``(base_seed, replicate, label, purpose)``; the data seed does not involve the
method, so adding or removing a method never changes another method's data.

Work is split into tasks (one initial fit per replicate, one penalized fit per
``(replicate, method, lambda)``, one dictionary path per replicate) that can
run on a process pool; a single reducer assembles the reports.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import dictionary as dct
from .datagen import NoiseSpec, make_dataset, make_test_set, save_dataset, target_from_id
from .dynamics import OdeConfig, default_initial_state, integrate
from .errors import AglnetError, AglnetIOError, InvalidConfigurationError, UndefinedMetricError
from .metrics import relative_test_error, selection_metrics
from .network import Architecture, extract_support, forward, save_params
from .optimize import (
    FitResult,
    ProxConfig,
    fit_initial,
    fit_penalized,
    make_adaptive_weights,
    truncate_params,
)
from .rng import derive_seed, make_rng
from .selection import LambdaGrid, PathPoint, network_dof, reduce_path, write_path_csv

log = logging.getLogger(__name__)

ADAPTIVE = "adaptive_gl"
GROUP = "group_lasso"
PLAIN = "plain_nn"
DICTIONARY = "dictionary"
METHODS = (ADAPTIVE, GROUP, PLAIN, DICTIONARY)
NN_METHODS = (ADAPTIVE, GROUP, PLAIN)
PENALIZED = (ADAPTIVE, GROUP)

ENV_OUTPUT_DIR = "AGLNET_OUTPUT_DIR"
ENV_WORKERS = "AGLNET_WORKERS"

DEFAULT_GRID = LambdaGrid.logspace().values


class ExperimentAborted(AglnetError):
    kind = "experiment-aborted"


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    target: str = "lorenz_rhs_25"
    sigma_x: float = 0.02
    sigma_y: float = 0.02
    dim: int = 40
    forcing: float = 8.0
    dt: float = 0.01
    train_range: tuple = (0.0, 80.0)
    test_range: tuple = (80.0, 100.0)
    scale_window: tuple | None = None
    hidden: int = 20
    n_hidden: int = 3
    first_activation: str = "tanh"
    penalized_layer: int = 1
    methods: tuple = METHODS
    replicates: int = 100
    base_seed: int = 0
    lambda_grid: tuple = DEFAULT_GRID
    dict_lambda_grid: tuple = DEFAULT_GRID
    iter_max: int = 10000
    epoch_max: int = 5000
    lr: float = 0.005
    gamma: float = 0.005
    refit_iters: int = 0
    warm_start: bool = False
    threshold: float = 1e-4
    dictionary_degree: int = 2
    dictionary_iters: int = 20000
    dof_convention: str = "free-params"
    dtype: str = "float32"
    vary_trajectory: bool = False
    trajectory_perturbation: float = 1e-3
    combo_seed: int = 0
    max_failure_fraction: float = 0.2
    output_dir: str = "results"
    workers: int = 1
    save_models: bool = True

    def __post_init__(self):
        self.train_range = tuple(float(v) for v in self.train_range)
        self.test_range = tuple(float(v) for v in self.test_range)
        if self.scale_window is not None:
            self.scale_window = tuple(float(v) for v in self.scale_window)
        self.methods = tuple(self.methods)
        self.lambda_grid = LambdaGrid.from_values(self.lambda_grid).values
        self.dict_lambda_grid = LambdaGrid.from_values(self.dict_lambda_grid).values
        self.validate()

    def validate(self):
        if self.replicates < 1:
            raise InvalidConfigurationError("replicates must be >= 1")
        if not self.methods:
            raise InvalidConfigurationError("at least one method is required")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise InvalidConfigurationError(f"unknown methods {bad}; choose from {METHODS}")
        if self.penalized_layer not in (1, 2):
            raise InvalidConfigurationError("penalized_layer must be 1 or 2")
        if self.penalized_layer == 2 and self.n_hidden < 2:
            raise InvalidConfigurationError("penalizing layer 2 needs >= 2 hidden layers")
        if self.dtype not in ("float32", "float64"):
            raise InvalidConfigurationError("dtype must be float32 or float64")
        if self.workers < 1:
            raise InvalidConfigurationError("workers must be >= 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    @property
    def np_dtype(self):
        return np.dtype(self.dtype)

    def architecture(self) -> Architecture:
        return Architecture.standard(self.dim, self.hidden, self.n_hidden, self.first_activation)

    def ode_config(self, replicate: int | None = None) -> OdeConfig:
        x0 = default_initial_state(self.dim)
        if self.vary_trajectory and replicate is not None:
            rng = make_rng(derive_seed(self.base_seed, replicate, "trajectory"))
            x0 = x0 + self.trajectory_perturbation * rng.standard_normal(self.dim)
        t_final = max(self.train_range[1], self.test_range[1])
        return OdeConfig(self.dim, self.forcing, self.dt, 0.0, t_final, tuple(x0))


def load_config(path) -> ExperimentConfig:
    """Read a YAML/JSON config; env vars override output dir and worker count."""
    import yaml

    doc = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(doc, dict):
        raise InvalidConfigurationError("config file must hold a mapping")
    return apply_env_overrides(ExperimentConfig.from_dict(doc))


def apply_env_overrides(cfg: ExperimentConfig, environ=None) -> ExperimentConfig:
    environ = os.environ if environ is None else environ
    changes = {}
    if environ.get(ENV_OUTPUT_DIR):
        changes["output_dir"] = environ[ENV_OUTPUT_DIR]
    if environ.get(ENV_WORKERS):
        try:
            changes["workers"] = int(environ[ENV_WORKERS])
        except ValueError as exc:
            raise InvalidConfigurationError(f"{ENV_WORKERS} must be an integer") from exc
    return replace(cfg, **changes) if changes else cfg


# ---------------------------------------------------------------- presets

# grid used by the desk-scale presets: spans the range where the penalized
# fits move from full support to a handful of variables
DESK_GRID = (1.0, 0.3, 0.1, 0.03)
DESK_DICT_GRID = tuple(np.logspace(0, -5, 11))


def _preset_table():
    return {
        "table1": [dict(name="table1", target="lorenz_rhs_25", sigma_x=0.02, sigma_y=0.02)],
        "noiseless": [
            dict(name="noiseless", target="lorenz_rhs_10", sigma_x=0.0, sigma_y=0.0)
        ],
        "noise-0.04": [
            dict(name="noise-0.04", target="lorenz_rhs_10", sigma_x=0.04, sigma_y=0.04)
        ],
        "noise-sweep": [
            dict(name=f"noise-{s:.2f}", target="lorenz_rhs_10", sigma_x=s, sigma_y=s)
            for s in (0.02, 0.03, 0.04, 0.05)
        ],
        "nonpoly-1": [
            dict(name="nonpoly-1", target="setting1", sigma_x=0.0, sigma_y=0.02,
                 methods=(ADAPTIVE, DICTIONARY))
        ],
        "nonpoly-2": [
            dict(name="nonpoly-2", target="setting2", sigma_x=0.02, sigma_y=0.0,
                 methods=(ADAPTIVE, DICTIONARY))
        ],
        "nonpoly-3": [
            dict(name="nonpoly-3", target="setting3", sigma_x=0.02, sigma_y=0.02,
                 methods=(ADAPTIVE, DICTIONARY))
        ],
        "linear-combo": [
            dict(name="linear-combo", target="linear_combo", sigma_x=0.0, sigma_y=0.02,
                 first_activation="identity", penalized_layer=2,
                 methods=(ADAPTIVE, DICTIONARY))
        ],
    }


PRESETS = tuple(_preset_table())


def get_preset(name: str, desk: bool = False, **overrides) -> list:
    """Named experiment configs; ``desk=True`` uses 10 replicates and short grids."""
    table = _preset_table()
    if name not in table:
        raise InvalidConfigurationError(f"unknown preset {name!r}; available: {sorted(table)}")
    out = []
    for doc in table[name]:
        doc = dict(doc)
        if desk:
            doc.update(replicates=10, lambda_grid=DESK_GRID, dict_lambda_grid=DESK_DICT_GRID)
        doc.update(overrides)
        out.append(ExperimentConfig(**doc))
    return out


# ---------------------------------------------------------------- reports


@dataclass
class RunReport:
    method: str
    replicate: int
    seed: int
    sensitivity: float | None
    specificity: float | None
    relative_test_error: float
    chosen_lambda: float | None
    support: tuple
    train_mse: float | None = None
    wall_time: float | None = None

    def to_dict(self, timing: bool = False) -> dict:
        """``timing=False`` drops the wall time so serialized runs are reproducible."""
        out = asdict(self)
        out["support"] = list(self.support)
        if not timing:
            out.pop("wall_time")
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        doc = dict(doc)
        doc["support"] = tuple(doc["support"])
        return cls(**doc)

    @property
    def sort_key(self):
        return (self.method, self.replicate)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    reports: list
    summary: list
    failures: list = field(default_factory=list)
    curves: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    fit_records: list = field(default_factory=list)
    timings: list = field(default_factory=list)
    models: dict = field(default_factory=dict)
    test_set: object = None

    def by_method(self, method: str) -> list:
        return [r for r in self.reports if r.method == method]

    def mean(self, method: str, metric: str) -> float:
        vals = [getattr(r, metric) for r in self.by_method(method)]
        vals = [v for v in vals if v is not None]
        return float(np.mean(vals)) if vals else float("nan")


# ---------------------------------------------------------------- tasks


@lru_cache(maxsize=8)
def _trajectory(ode_cfg: OdeConfig):
    return integrate(ode_cfg)


def data_seed(cfg: ExperimentConfig, replicate: int) -> int:
    return derive_seed(cfg.base_seed, replicate, "data")


def init_seed(cfg: ExperimentConfig, replicate: int, label: str) -> int:
    return derive_seed(cfg.base_seed, replicate, label, "init")


def replicate_data(cfg: ExperimentConfig, replicate: int):
    """``(train, test)`` for one replicate; the test set uses training scales."""
    traj = _trajectory(cfg.ode_config(replicate if cfg.vary_trajectory else None))
    tf = target_from_id(cfg.target, cfg.dim, cfg.combo_seed)
    noise = NoiseSpec(cfg.sigma_x, cfg.sigma_y, data_seed(cfg, replicate))
    train = make_dataset(traj, tf, noise, cfg.train_range, cfg.scale_window)
    test = make_test_set(traj, tf, train.scales, cfg.test_range)
    return train, test


def _task_initial(cfg: ExperimentConfig, replicate: int) -> FitResult:
    train, _ = replicate_data(cfg, replicate)
    return fit_initial(
        cfg.architecture(),
        train,
        iter_max=cfg.iter_max,
        seed=init_seed(cfg, replicate, "initial"),
        lr=cfg.lr,
        dtype=cfg.np_dtype,
    )


def prox_config(cfg: ExperimentConfig, method: str, lam: float, initial) -> ProxConfig:
    weights = None
    if method == ADAPTIVE:
        weights = make_adaptive_weights(initial.params, cfg.penalized_layer)
    return ProxConfig(
        lam=lam,
        gamma=cfg.gamma,
        penalized_layer=cfg.penalized_layer,
        weights=weights,
        epoch_max=cfg.epoch_max,
        threshold=cfg.threshold,
        warm_start=cfg.warm_start,
        refit_iters=cfg.refit_iters,
        refit_lr=cfg.lr,
    )


def _task_penalized(cfg: ExperimentConfig, replicate: int, method: str, lam: float, initial):
    train, _ = replicate_data(cfg, replicate)
    arch = cfg.architecture()
    fit = fit_penalized(
        arch,
        train,
        initial.params,
        prox_config(cfg, method, lam, initial),
        seed=init_seed(cfg, replicate, method),
        dtype=cfg.np_dtype,
    )
    dof = network_dof(arch.layer_dims, len(fit.support), cfg.penalized_layer, cfg.dof_convention)
    return PathPoint(mse=fit.train_mse, dof=dof, support=fit.support, payload=fit)


def _task_dictionary(cfg: ExperimentConfig, replicate: int):
    t_start = time.perf_counter()
    train, _ = replicate_data(cfg, replicate)
    dic = dct.build_dictionary(train.X, cfg.dictionary_degree)
    points, failures = {}, {}
    for lam in cfg.dict_lambda_grid:
        try:
            sc = dct.sparse_solve(dic, train.y, lam, n_iter=cfg.dictionary_iters,
                                  threshold=cfg.threshold)
        except AglnetError as exc:
            failures[lam] = exc
            continue
        points[lam] = PathPoint(mse=sc.train_mse, dof=sc.n_active, support=sc.support, payload=sc)
    # the feature matrix is large; keep only what prediction needs
    dic.Phi = None
    dic.__dict__.pop("gram", None)
    return dic, points, failures, time.perf_counter() - t_start


def _guard(fn, *args):
    try:
        return fn(*args), None
    except AglnetError as exc:
        return None, exc


def _run_tasks(tasks, workers: int):
    """Evaluate ``[(fn, args), ...]`` in order; errors are returned, not raised."""
    if workers <= 1 or len(tasks) <= 1:
        return [_guard(fn, *args) for fn, args in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_guard, fn, *args) for fn, args in tasks]
        return [f.result() for f in futures]


# ---------------------------------------------------------------- driver


def _selection(truth, selected, d):
    try:
        rep = selection_metrics(selected, truth, d)
    except UndefinedMetricError:
        return None, None
    return rep.sensitivity, rep.specificity


def _nn_prediction(cfg, params, test):
    arch = cfg.architecture()
    return forward(params, arch, test.X.astype(cfg.np_dtype)).astype(float) * test.alpha


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every replicate and method of ``cfg``; see the module docstring."""
    cfg.validate()
    t_run = time.perf_counter()
    reps = range(cfg.replicates)
    wants_nn = any(m in NN_METHODS for m in cfg.methods)
    penalized = [m for m in cfg.methods if m in PENALIZED]

    # phase 1: unpenalized initial estimators and dictionary paths
    tasks, keys = [], []
    if wants_nn:
        tasks += [(_task_initial, (cfg, r)) for r in reps]
        keys += [("initial", r) for r in reps]
    if DICTIONARY in cfg.methods:
        tasks += [(_task_dictionary, (cfg, r)) for r in reps]
        keys += [("dictionary", r) for r in reps]
    phase1 = dict(zip(keys, _run_tasks(tasks, cfg.workers)))

    # phase 2: one penalized fit per (replicate, method, lambda)
    tasks, keys = [], []
    for r in reps:
        if not wants_nn:
            break
        initial, err = phase1[("initial", r)]
        if err is not None:
            continue
        for method in penalized:
            for lam in cfg.lambda_grid:
                tasks.append((_task_penalized, (cfg, r, method, lam, initial)))
                keys.append((r, method, lam))
    phase2 = dict(zip(keys, _run_tasks(tasks, cfg.workers)))

    # reduce
    reports, failures, curves, paths, fit_records, models = [], [], {}, {}, [], {}
    test_r0 = None
    for r in reps:
        train, test = replicate_data(cfg, r)
        if test_r0 is None:
            test_r0 = test
        truth = train.true_support
        seed = data_seed(cfg, r)
        initial = None
        if wants_nn:
            initial, err = phase1[("initial", r)]
            if err is not None:
                for method in cfg.methods:
                    if method in NN_METHODS:
                        failures.append({"method": method, "replicate": r, **err.to_dict()})
            else:
                fit_records.append({"method": "initial", "replicate": r, **initial.to_record()})

        for method in cfg.methods:
            if method in NN_METHODS and initial is None:
                continue
            try:
                if method == PLAIN:
                    params = truncate_params(initial.params.copy(), cfg.threshold)
                    support = extract_support(params, cfg.penalized_layer, cfg.threshold)
                    pred = _nn_prediction(cfg, params, test)
                    lam, mse, model = None, initial.train_mse, params
                    wall = initial.wall_time
                elif method in PENALIZED:
                    points = {}
                    errs = {}
                    for lam in cfg.lambda_grid:
                        point, err = phase2[(r, method, lam)]
                        if err is None:
                            points[lam] = point
                            fit_records.append(
                                {"method": method, "replicate": r, **point.payload.to_record()}
                            )
                        else:
                            errs[lam] = err
                    result = reduce_path(points, train.m, errs)
                    paths[(method, r)] = result.path
                    fit = result.chosen.payload
                    support, lam, mse, model = fit.support, result.chosen_lambda, fit.train_mse, fit.params
                    pred = _nn_prediction(cfg, fit.params, test)
                    wall = initial.wall_time + sum(p.payload.wall_time for p in points.values())
                else:
                    out, err = phase1[("dictionary", r)]
                    if err is not None:
                        raise err
                    dic, points, errs, wall = out
                    result = reduce_path(points, train.m, errs)
                    paths[(method, r)] = result.path
                    sc = result.chosen.payload
                    support = dct.dict_support_variables(sc, dic)
                    lam, mse = result.chosen_lambda, sc.train_mse
                    pred = dct.predict(sc, dic, test.X) * test.alpha
                    model = (sc, dic)
            except AglnetError as exc:
                failures.append({"method": method, "replicate": r, **exc.to_dict()})
                continue

            variables_selected = method == DICTIONARY or cfg.penalized_layer == 1
            sens, spec = _selection(truth, support, cfg.dim) if variables_selected else (None, None)
            reports.append(
                RunReport(
                    method=method,
                    replicate=r,
                    seed=seed,
                    sensitivity=sens,
                    specificity=spec,
                    relative_test_error=relative_test_error(test.raw_y, pred),
                    chosen_lambda=lam,
                    support=tuple(sorted(support)),
                    train_mse=mse,
                    wall_time=wall,
                )
            )
            if method not in curves:
                curves[method] = (r, test.times, test.raw_y, pred)
            models[(method, r)] = (model, train.scales)

    failed_reps = {f["replicate"] for f in failures}
    if len(failed_reps) > cfg.max_failure_fraction * cfg.replicates:
        raise ExperimentAborted(
            f"{len(failed_reps)} of {cfg.replicates} replicates failed: "
            + "; ".join(f"{f['method']}#{f['replicate']}: {f['message']}" for f in failures[:5])
        )

    reports.sort(key=lambda rep: rep.sort_key)
    log.info("experiment %s finished in %.1fs", cfg.name, time.perf_counter() - t_run)
    timings = [
        {"method": rec["method"], "replicate": rec["replicate"], "lambda": rec.get("lambda"),
         "wall_time": rec["wall_time"]}
        for rec in fit_records
    ]
    timings += [
        {"method": rep.method, "replicate": rep.replicate, "total": True, "wall_time": rep.wall_time}
        for rep in reports
    ]
    return ExperimentResult(
        config=cfg,
        reports=reports,
        summary=summarize(reports, cfg, failures),
        failures=failures,
        curves=curves,
        paths=paths,
        fit_records=fit_records,
        timings=timings,
        models=models,
        test_set=test_r0,
    )


def _mean_std(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    mean = math.fsum(vals) / len(vals)
    std = float(np.std(vals, ddof=1)) if len(vals) > 1 else None
    return mean, std


SUMMARY_METRICS = ("sensitivity", "specificity", "relative_test_error")


def summarize(reports, cfg: ExperimentConfig, failures=()) -> list:
    rows = []
    for method in cfg.methods:
        mine = [r for r in reports if r.method == method]
        row = {
            "method": method,
            "target": cfg.target,
            "sigma_x": cfg.sigma_x,
            "sigma_y": cfg.sigma_y,
            "R": len(mine),
            "exclusions": sum(1 for f in failures if f["method"] == method),
        }
        for metric in SUMMARY_METRICS:
            mean, std = _mean_std([getattr(r, metric) for r in mine])
            row[f"{metric}_mean"] = mean
            row[f"{metric}_std"] = std
        row["support_size_mean"], _ = _mean_std([len(r.support) for r in mine])
        rows.append(row)
    return rows


# ---------------------------------------------------------------- outputs


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(path, rows, header):
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row.get(h)) for h in header])


def reports_to_jsonl(reports) -> str:
    ordered = sorted(reports, key=lambda rep: rep.sort_key)
    return "".join(json.dumps(rep.to_dict(), sort_keys=True) + "\n" for rep in ordered)


def read_runs_jsonl(path) -> list:
    lines = Path(path).read_text().splitlines()
    return [RunReport.from_dict(json.loads(line)) for line in lines if line.strip()]


def emit_tables(result: ExperimentResult, outdir=None) -> Path:
    """Write summary.csv, runs.jsonl, curves.csv and supporting files."""
    if not result.reports:
        raise InvalidConfigurationError("no reports to write")
    outdir = Path(outdir if outdir is not None else result.config.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise AglnetIOError(f"cannot create output directory {outdir}: {exc}") from exc
    cfg = result.config

    header = ["method", "target", "sigma_x", "sigma_y", "R", "exclusions"]
    for metric in SUMMARY_METRICS:
        header += [f"{metric}_mean", f"{metric}_std"]
    header.append("support_size_mean")
    _write_csv(outdir / "summary.csv", result.summary, header)

    (outdir / "runs.jsonl").write_text(reports_to_jsonl(result.reports))

    curve_rows = []
    for method in cfg.methods:
        if method not in result.curves:
            continue
        r, times, f_true, f_hat = result.curves[method]
        for i, (t, ft, fh) in enumerate(zip(times, f_true, f_hat)):
            curve_rows.append(
                {"method": method, "replicate": r, "index": i, "t": float(t),
                 "f_true": float(ft), "f_hat": float(fh)}
            )
    _write_csv(outdir / "curves.csv", curve_rows,
               ["method", "replicate", "index", "t", "f_true", "f_hat"])

    path_rows = []
    for (method, r), records in sorted(result.paths.items()):
        for rec in records:
            path_rows.append(
                {"method": method, "replicate": r, "lambda": rec.lam, "mse": rec.mse,
                 "dof": rec.dof, "bic": rec.bic, "support_size": rec.support_size,
                 "support": " ".join(str(j) for j in sorted(rec.support))}
            )
    _write_csv(outdir / "paths.csv", path_rows,
               ["method", "replicate", "lambda", "mse", "dof", "bic", "support_size", "support"])

    with (outdir / "fits.jsonl").open("w") as fh:
        for rec in result.fit_records:
            fh.write(json.dumps(rec) + "\n")
    with (outdir / "timings.jsonl").open("w") as fh:
        for rec in result.timings:
            fh.write(json.dumps(rec) + "\n")
    with (outdir / "failures.jsonl").open("w") as fh:
        for rec in result.failures:
            fh.write(json.dumps(rec, default=str) + "\n")
    (outdir / "config.json").write_text(json.dumps(cfg.to_dict(), indent=1))

    if cfg.save_models:
        _save_models(result, outdir)
    return outdir


def _save_models(result: ExperimentResult, outdir: Path):
    cfg = result.config
    mdir = outdir / "models"
    mdir.mkdir(exist_ok=True)
    arch = cfg.architecture()
    for (method, r), (model, scales) in sorted(result.models.items()):
        stem = mdir / f"{method}_r{r}.json"
        if method == DICTIONARY:
            sc, dic = model
            doc = dct.coefficients_to_dict(sc, dic, scales)
            doc["kind"] = "dictionary"
            stem.write_text(json.dumps(doc, indent=1))
        else:
            save_params(stem, model, arch, scales, kind="network", method=method, replicate=r,
                        penalized_layer=cfg.penalized_layer)
    if result.test_set is not None:
        ddir = outdir / "data"
        ddir.mkdir(exist_ok=True)
        save_dataset(result.test_set, ddir / "test.csv")


def run_sweep(cfg: ExperimentConfig, method: str = ADAPTIVE, replicate: int = 0):
    """Regularization path of one method on one replicate (no test scoring)."""
    if method not in PENALIZED + (DICTIONARY,):
        raise InvalidConfigurationError(f"method {method!r} has no lambda path")
    train, _ = replicate_data(cfg, replicate)
    if method == DICTIONARY:
        _, points, errs, _ = _task_dictionary(cfg, replicate)
        return reduce_path(points, train.m, errs)
    initial = _task_initial(cfg, replicate)
    tasks = [(_task_penalized, (cfg, replicate, method, lam, initial)) for lam in cfg.lambda_grid]
    points, errs = {}, {}
    for lam, (point, err) in zip(cfg.lambda_grid, _run_tasks(tasks, cfg.workers)):
        if err is None:
            points[lam] = point
        else:
            errs[lam] = err
    return reduce_path(points, train.m, errs)


__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "RunReport",
    "run_experiment",
    "emit_tables",
    "get_preset",
    "load_config",
    "read_runs_jsonl",
    "run_sweep",
    "write_path_csv",
]
