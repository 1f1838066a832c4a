"""Command-line entry point: ``simulate``, ``adjust``, ``evaluate``, ``benchmark``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure (non-convergence under ``--strict``).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .benchmark import BenchmarkConfig, run_benchmark, write_benchmark
from .errors import (
    DegenerateDirectionError,
    InputError,
    OrthoGroupsError,
    ParameterError,
    RankError,
    SpanCollapseError,
)
from .metrics import classification_metrics, group_dependence, regression_metrics
from .og import constraint_violation, encode_group, fit_og
from .predict import fit_linear, fit_logistic, predict
from .simulate import ScenarioSpec, generate
from .sog import fit_sog

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

# relative bound for the error-gap identity check in reports
IDENTITY_RTOL = 1e-8


class ConfigError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits unsigned")
    return v


def _k_grid(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k grid {text!r}") from None
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("k grid entries must be positive")
    return ks


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", type=int, choices=(1, 2, 3, 4), default=1)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--p", type=_positive_int)
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--seed", type=_seed, default=0)


def _add_sog_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t", type=float, help="l1 bound for SOG loadings (default sqrt(p))")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=_positive_int, default=500)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthogroups", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic scenario to CSV")
    _add_scenario_args(p)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("adjust", help="adjust a data matrix against a group variable")
    p.add_argument("--x", type=Path, required=True, help="CSV data matrix")
    p.add_argument("--z", type=Path, required=True, help="CSV group column(s)")
    p.add_argument("--method", choices=("og", "sog"), default="og")
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--scheme", choices=("auto", "categorical", "numeric"), default="auto")
    _add_sog_args(p)
    p.add_argument("--strict", action="store_true", help="fail on SOG non-convergence")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("evaluate", help="fit a learner on (adjusted) data and report metrics")
    p.add_argument("--x", type=Path, required=True)
    p.add_argument("--y", type=Path, required=True)
    p.add_argument("--z", type=Path, required=True)
    p.add_argument("--x-test", type=Path)
    p.add_argument("--y-test", type=Path)
    p.add_argument("--z-test", type=Path)
    p.add_argument("--task", choices=("regression", "classification"), default="regression")
    p.add_argument("--ridge", type=float)
    p.add_argument("--out", type=Path, required=True, help="JSON report path")

    p = sub.add_parser("benchmark", help="repeated train/test comparison of svd, og and sog")
    _add_scenario_args(p)
    p.add_argument("--n-splits", type=_positive_int, default=50)
    p.add_argument("--split-ratio", type=float, default=0.75)
    _add_sog_args(p)
    p.add_argument("--k-grid", type=_k_grid)
    p.add_argument("--mode", choices=("refit", "basis_reuse"), default="refit")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", type=Path, required=True)
    return parser


def _check_sog_args(args) -> None:
    if args.t is not None and not (math.isfinite(args.t) and args.t >= 1):
        raise ConfigError(f"--t must be a finite number >= 1, got {args.t}")
    if not (math.isfinite(args.tol) and args.tol > 0):
        raise ConfigError(f"--tol must be positive, got {args.tol}")


def _spec(args, **extra) -> ScenarioSpec:
    try:
        return ScenarioSpec(scenario=args.scenario, n=args.n, p=args.p, k=args.k, seed=args.seed, **extra)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def cmd_simulate(args) -> None:
    spec = _spec(args)
    data = generate(spec)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    io.write_matrix(out / "X.csv", data.X, prefix="x")
    io.write_matrix(out / "Y.csv", data.Y, header=["y"])
    io.write_matrix(out / "Z.csv", data.Z, header=["z"])
    io.write_json(
        out / "manifest.json",
        {"command": "simulate", "spec": spec.to_dict(), "files": ["X.csv", "Y.csv", "Z.csv"]},
    )


def cmd_adjust(args) -> None:
    _check_sog_args(args)
    X = io.read_matrix(args.x)
    design = encode_group(io.read_groups(args.z), args.scheme)
    if design.n != X.shape[0]:
        raise InputError(f"X has {X.shape[0]} rows, Z has {design.n}")
    n, p = X.shape
    k = args.k if args.k is not None else min(n, p, 30)

    og_model = fit_og(X, design, k)
    report = {
        "command": "adjust",
        "method": args.method,
        "k": k,
        "n": n,
        "p": p,
        "err_og": og_model.err_og,
        "err_svd": og_model.err_svd,
        "gap": og_model.gap,
        "identity_residual": og_model.identity_residual(),
        "identity_check": og_model.identity_residual() <= IDENTITY_RTOL * max(1.0, og_model.err_og),
    }
    if args.method == "og":
        x_tilde = og_model.x_tilde
    else:
        t = args.t if args.t is not None else math.sqrt(p)
        model = fit_sog(X, design, k, t=t, tol=args.tol, max_iter=args.max_iter)
        x_tilde = model.x_tilde
        report.update(
            t=t,
            k_returned=model.k,
            truncated=model.truncated,
            converged=list(model.converged),
            n_iter=list(model.n_iter),
            d=model.d.tolist(),
        )
        if args.strict and not all(model.converged):
            raise NumericalFailure(f"SOG did not converge within {args.max_iter} iterations")
    report["err_adjusted"] = float(np.sum((X - x_tilde) ** 2))
    report["max_abs_zaug_xtilde"] = constraint_violation(x_tilde, design).tolist()
    report["x_norm"] = float(np.linalg.norm(X))

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    io.write_matrix(out / "X_tilde.csv", x_tilde, prefix="x")
    io.write_json(out / "report.json", report)


def cmd_evaluate(args) -> None:
    X, Y = io.read_matrix(args.x), io.read_vector(args.y)
    z = io.read_groups(args.z)
    z_num = encode_group(z).augmented[:, 1]
    test = [args.x_test, args.y_test, args.z_test]
    if any(test) and not all(test):
        raise ConfigError("--x-test, --y-test and --z-test must be given together")

    if args.task == "regression":
        model = fit_linear(X, Y)
        report = {"task": "regression", "train": regression_metrics(predict(model, X), Y)}
        index_train = predict(model, X)
    else:
        model = fit_logistic(X, Y, ridge=args.ridge)
        proba, _ = predict(model, X)
        report = {
            "task": "classification",
            "threshold": model.threshold,
            "converged": model.converged,
            "train": classification_metrics(proba, Y, model.threshold),
        }
        index_train = X @ model.weights + model.intercept
    report["train"]["corr_group"] = group_dependence(index_train, z_num).corr

    if all(test):
        Xt, Yt = io.read_matrix(args.x_test), io.read_vector(args.y_test)
        zt = encode_group(io.read_groups(args.z_test)).augmented[:, 1]
        if args.task == "regression":
            yhat = predict(model, Xt)
            report["test"] = regression_metrics(yhat, Yt)
            report["test"]["corr_group"] = group_dependence(yhat, zt).corr
        else:
            proba, _ = predict(model, Xt)
            report["test"] = classification_metrics(proba, Yt, model.threshold)
            report["test"]["corr_group"] = group_dependence(Xt @ model.weights + model.intercept, zt).corr
    args.out.parent.mkdir(parents=True, exist_ok=True)
    io.write_json(args.out, {"command": "evaluate", **report})


def cmd_benchmark(args) -> None:
    _check_sog_args(args)
    spec = _spec(args, n_splits=args.n_splits, split_ratio=args.split_ratio)
    config = BenchmarkConfig(
        spec=spec,
        t=args.t,
        tol=args.tol,
        max_iter=args.max_iter,
        k_grid=args.k_grid,
        mode=args.mode,
        jobs=args.jobs,
    )
    cap = min(spec.n - spec.n_train, spec.p) - 2
    if spec.k > cap or max(config.grid()) > min(spec.n_train, spec.p) - 2:
        raise ConfigError(f"rank k={spec.k} (or k grid) too large for the split sizes")
    write_benchmark(run_benchmark(config), args.out)


COMMANDS = {
    "simulate": cmd_simulate,
    "adjust": cmd_adjust,
    "evaluate": cmd_evaluate,
    "benchmark": cmd_benchmark,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ConfigError, ParameterError, RankError) as exc:
        print(f"orthogroups {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, SpanCollapseError, DegenerateDirectionError) as exc:
        print(f"orthogroups {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OrthoGroupsError, OSError) as exc:
        print(f"orthogroups {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
