"""Command line entry point: ``aglnet {simulate,run,sweep,eval}``.

Errors are reported as one JSON object on stderr with a nonzero exit code.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import AglnetError, AglnetIOError, InvalidConfigurationError

EXIT_ERROR = 1
EXIT_USAGE = 2


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise InvalidConfigurationError(f"not a comma-separated list of numbers: {text!r}") from exc


def _load_configs(source: str, desk: bool) -> list:
    from . import harness

    if Path(source).is_file():
        return [harness.load_config(source)]
    if source in harness.PRESETS:
        return [harness.apply_env_overrides(c) for c in harness.get_preset(source, desk=desk)]
    raise InvalidConfigurationError(
        f"{source!r} is neither a config file nor a preset ({', '.join(harness.PRESETS)})"
    )


def _overrides(args) -> dict:
    out = {}
    for key in ("replicates", "workers", "base_seed", "iter_max", "epoch_max", "refit_iters"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    if getattr(args, "output", None):
        out["output_dir"] = args.output
    if getattr(args, "lambdas", None):
        out["lambda_grid"] = _floats(args.lambdas)
    if getattr(args, "dict_lambdas", None):
        out["dict_lambda_grid"] = _floats(args.dict_lambdas)
    return out


def cmd_simulate(args) -> dict:
    from .dynamics import OdeConfig, integrate, write_trajectory_csv

    cfg = OdeConfig(dim=args.dim, forcing=args.forcing, dt=args.dt, t_final=args.t_final)
    traj = integrate(cfg)
    try:
        write_trajectory_csv(traj, args.out)
    except OSError as exc:
        raise AglnetIOError(f"cannot write {args.out}: {exc}") from exc
    return {"out": str(args.out), "steps": int(traj.states.shape[0])}


def cmd_run(args) -> dict:
    from . import harness

    written = []
    configs = _load_configs(args.config, args.desk)
    for cfg in configs:
        cfg = replace(cfg, **_overrides(args))
        outdir = Path(cfg.output_dir)
        if len(configs) > 1:
            outdir = outdir / cfg.name
        result = harness.run_experiment(cfg)
        harness.emit_tables(result, outdir)
        written.append({"name": cfg.name, "output_dir": str(outdir), "summary": result.summary})
    return {"experiments": written}


def cmd_sweep(args) -> dict:
    from . import harness

    cfg = replace(_load_configs(args.config, args.desk)[0], **_overrides(args))
    result = harness.run_sweep(cfg, args.method, args.replicate)
    out = Path(args.out)
    try:
        harness.write_path_csv(result.path, out)
    except OSError as exc:
        raise AglnetIOError(f"cannot write {out}: {exc}") from exc
    return {"out": str(out), "chosen_lambda": result.chosen_lambda,
            "support": sorted(result.chosen.support)}


def evaluate_saved(model_path, data_path) -> dict:
    """Relative error (and selection metrics when defined) of a saved model."""
    from . import dictionary as dct
    from .datagen import load_dataset
    from .metrics import relative_test_error, selection_metrics
    from .errors import UndefinedMetricError
    from .network import extract_support, forward, params_from_dict

    doc = json.loads(Path(model_path).read_text())
    data = load_dataset(data_path)
    if doc.get("kind") == "dictionary":
        pred = dct.predict_from_dict(doc, data.raw_X)
        selected = {j + 1 for t in doc["terms"] for j, e in enumerate(t["exponents"]) if e}
        layer = 1
    else:
        params, arch, scales = params_from_dict(doc)
        if scales is None:
            raise InvalidConfigurationError("network model has no input/output scales")
        sigma, alpha = scales
        pred = forward(params, arch, data.raw_X / sigma) * alpha
        layer = doc.get("penalized_layer", 1)
        selected = extract_support(params, layer)
    out = {
        "relative_test_error": relative_test_error(data.raw_y, pred),
        "support": sorted(int(j) for j in selected),
    }
    if layer == 1:
        try:
            rep = selection_metrics(selected, data.true_support, data.d)
            out.update(sensitivity=rep.sensitivity, specificity=rep.specificity)
        except UndefinedMetricError:
            pass
    return out


def cmd_eval(args) -> dict:
    return evaluate_saved(args.model, args.data)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aglnet", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="integrate Lorenz-96 and write the trajectory CSV")
    s.add_argument("--out", required=True)
    s.add_argument("--dim", type=int, default=40)
    s.add_argument("--forcing", type=float, default=8.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--t-final", type=float, default=100.0)
    s.set_defaults(func=cmd_simulate)

    def experiment_args(sp):
        sp.add_argument("config", help="YAML/JSON config file or preset name")
        sp.add_argument("--desk", action="store_true", help="preset at desk scale")
        sp.add_argument("--replicates", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--base-seed", type=int)
        sp.add_argument("--iter-max", type=int)
        sp.add_argument("--epoch-max", type=int)
        sp.add_argument("--refit-iters", type=int)
        sp.add_argument("--lambdas", help="comma-separated network lambda grid")
        sp.add_argument("--dict-lambdas", help="comma-separated dictionary lambda grid")

    r = sub.add_parser("run", help="run a full replicated experiment")
    experiment_args(r)
    r.add_argument("--output", help="output directory")
    r.set_defaults(func=cmd_run)

    w = sub.add_parser("sweep", help="lambda path of one method on one replicate")
    experiment_args(w)
    w.add_argument("--method", default="adaptive_gl",
                   choices=("adaptive_gl", "group_lasso", "dictionary"))
    w.add_argument("--replicate", type=int, default=0)
    w.add_argument("--out", default="path.csv")
    w.set_defaults(func=cmd_sweep)

    e = sub.add_parser("eval", help="score a saved model on a saved dataset")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.set_defaults(func=cmd_eval)
    return p


def _fail(kind: str, message: str, code: int = EXIT_ERROR) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _fail("usage", "invalid command line arguments", EXIT_USAGE)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        out = args.func(args)
    except AglnetError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), default=str) + "\n")
        return EXIT_ERROR
    except FileNotFoundError as exc:
        return _fail("io", str(exc))
    except (OSError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc))
    sys.stdout.write(json.dumps(out, default=_json_default, indent=1) + "\n")
    return 0


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return str(obj)


if __name__ == "__main__":
    sys.exit(main())
