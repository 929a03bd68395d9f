"""Command-line front end.

Subcommands: ``simulate`` (synthetic scenario to CSV), ``fit`` (estimate
edge sets from data CSVs), ``roc`` (replicated ROC/AUC sweep), ``bench``
(per-iteration timing table), and ``rerun`` (re-execute a recorded
manifest). Every command writes a ``manifest.json`` capturing the resolved
configuration, seed, and generator identifier; re-running from a manifest
reproduces the data outputs byte-for-byte.

Exit codes: 0 on success, 2 on a reported error (a machine-readable
category is printed to stderr as JSON), 3 when outputs were written but
some solve did not converge, 1 on unexpected failure.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .errors import DimensionError, NotConverged, SnselError
from .io import (
    read_manifest,
    read_matrix_csv,
    sha256_file,
    write_edges_csv,
    write_manifest,
    write_matrix_csv,
)
from .jgl import jgl_pipeline, precision_supports
from .linalg import center_scale
from .pipeline import SnsConfig, assemble_edges, ins_fit, sns_fit
from .runs import (
    ROC_METHODS,
    lambda_grid,
    run_bench,
    run_roc,
    write_bench_outputs,
    write_roc_outputs,
)
from .simulate import PRNG_ID, SimulationSpec, simulate_dataset

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_ERROR = 2
EXIT_NOT_CONVERGED = 3


def _default_threads():
    env = os.environ.get("SNS_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _out_dir(config):
    out = Path(config["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(command, config, seed, inputs, wall_time, **extra):
    m = {
        "command": command,
        "config": config,
        "seed": seed,
        "prng": PRNG_ID,
        "version": __version__,
        "inputs": inputs,
        "wall_time_s": wall_time,
    }
    m.update(extra)
    return m


def _run_simulate(config):
    out = _out_dir(config)
    start = time.perf_counter()
    spec = SimulationSpec(
        p=config["p"], K=config["k"], n=config["n"],
        s=config["s"], rho=config["rho"], seed=config["seed"],
    )
    truth, raws = simulate_dataset(spec)
    for k in range(spec.K):
        write_matrix_csv(out / f"data_{k + 1}.csv", raws[k])
        write_edges_csv(out / f"truth_edges_{k + 1}.csv", truth.edge_sets[k])
        write_matrix_csv(out / f"omega_{k + 1}.csv", truth.precisions[k])
    wall = time.perf_counter() - start
    write_manifest(
        out / "manifest.json",
        _manifest("simulate", config, config["seed"], {}, wall),
    )
    return EXIT_OK


def _load_subpopulations(paths):
    raws = [read_matrix_csv(p) for p in paths]
    p0 = raws[0].shape[1]
    for path, raw in zip(paths, raws):
        if raw.shape[1] != p0:
            raise DimensionError(
                f"{path}: {raw.shape[1]} columns, expected {p0} as in {paths[0]}"
            )
    return [center_scale(raw) for raw in raws]


def _run_fit(config):
    out = _out_dir(config)
    start = time.perf_counter()
    paths = config["data"]
    data = _load_subpopulations(paths)
    method = config["method"]
    lam = config["lam"]
    converged = True

    if method == "jgl":
        precisions = jgl_pipeline(
            data, lam,
            lambda_init=config["lambda_init"], b=config["b"],
            tol_primal=config["tol"], tol_dual=config["tol"],
            max_iter=config["max_iter"],
        )
        theta = precision_supports(precisions)
        mats_out = precisions
    else:
        if method == "ins":
            theta = ins_fit(
                data, lam, b=config["b"],
                tol_primal=config["tol"], tol_dual=config["tol"],
                max_iter=config["max_iter"],
            )
        elif method == "sns":
            sns_cfg = SnsConfig(
                lam=lam,
                lambda_init=config["lambda_init"],
                lla_steps=config["lla_steps"],
                edge_rule=config["edge_rule"],
                b=config["b"],
                tol_primal=config["tol"],
                tol_dual=config["tol"],
                max_iter=config["max_iter"],
            )
            theta = sns_fit(data, sns_cfg)
        else:
            raise ValueError(f"unknown method {method!r}")
        converged = theta.converged
        mats_out = theta.matrices

    edges = assemble_edges(theta, config["edge_rule"])
    for k in range(theta.K):
        write_edges_csv(out / f"edges_{k + 1}.csv", edges.edge_sets[k])
        write_matrix_csv(out / f"theta_{k + 1}.csv", mats_out[k])
    wall = time.perf_counter() - start
    inputs = {str(p): sha256_file(p) for p in paths}
    write_manifest(
        out / "manifest.json",
        _manifest("fit", config, None, inputs, wall, converged=converged),
    )
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _run_roc(config):
    out = _out_dir(config)
    start = time.perf_counter()
    spec = SimulationSpec(
        p=config["p"], K=config["k"], n=config["n"],
        s=config["s"], rho=config["rho"], seed=config["seed"],
    )
    grid = lambda_grid(config["grid_start"], config["grid_end"], config["grid_points"])
    result = run_roc(
        spec,
        config["methods"],
        grid,
        replicates=config["replicates"],
        lambda_init=config["lambda_init"],
        tol=config["tol"],
        max_iter=config["max_iter"],
        threads=config["threads"],
    )
    write_roc_outputs(out, result)
    wall = time.perf_counter() - start
    inputs = dict(config.get("inputs", {}))
    write_manifest(
        out / "manifest.json",
        _manifest(
            "roc", config, config["seed"], inputs, wall,
            converged=result.converged,
            auc={m: result.aucs[m] for m in result.methods},
            tolerances={"tol": config["tol"], "max_iter": config["max_iter"]},
        ),
    )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _run_bench(config):
    out = _out_dir(config)
    start = time.perf_counter()
    records, slopes = run_bench(
        config["p_list"], config["n"],
        seed=config["seed"], b=config["b"], iterations=config["iterations"],
    )
    write_bench_outputs(out, records, slopes)
    wall = time.perf_counter() - start
    write_manifest(
        out / "manifest.json",
        _manifest("bench", config, config["seed"], {}, wall, slopes=slopes),
    )
    return EXIT_OK


_RUNNERS = {
    "simulate": _run_simulate,
    "fit": _run_fit,
    "roc": _run_roc,
    "bench": _run_bench,
}


def _run_rerun(manifest_path, out_dir=None):
    manifest = read_manifest(manifest_path)
    command = manifest["command"]
    if command not in _RUNNERS:
        raise ValueError(f"manifest records unknown command {command!r}")
    config = dict(manifest["config"])
    if out_dir is not None:
        config["out_dir"] = str(out_dir)
    return _RUNNERS[command](config)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="snsel",
        description="Joint graphical-model edge estimation by simultaneous "
        "neighborhood selection.",
    )
    parser.add_argument("--version", action="version", version=f"snsel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic scenario")
    sim.add_argument("--p", type=int, required=True, help="number of variables")
    sim.add_argument("--k", type=int, default=2, help="number of subpopulations")
    sim.add_argument("--n", type=int, required=True, help="samples per subpopulation")
    sim.add_argument("--s", type=float, required=True,
                     help="common edges as a proportion of C(p,2)")
    sim.add_argument("--rho", type=float, default=0.0,
                     help="individual edges as a proportion of the common count")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out-dir", required=True)

    fit = sub.add_parser("fit", help="fit edge sets from data CSVs")
    fit.add_argument("--method", choices=("sns", "ins", "jgl"), required=True)
    fit.add_argument("--lambda", dest="lam", type=float, required=True)
    fit.add_argument("--lambda-init", type=float, default=0.05)
    fit.add_argument("--edge-rule", choices=("and", "or"), default="and")
    fit.add_argument("--lla-steps", type=int, default=1)
    fit.add_argument("--b", type=float, default=1.0, help="ADMM step size")
    fit.add_argument("--tol", type=float, default=1e-6)
    fit.add_argument("--max-iter", type=int, default=10000)
    fit.add_argument(
        "--data", required=True,
        help="comma-separated data CSVs, one per subpopulation, ordered by k",
    )
    fit.add_argument("--out-dir", required=True)

    roc = sub.add_parser("roc", help="replicated ROC/AUC sweep over a λ grid")
    roc.add_argument("--truth-dir",
                     help="directory of a previous simulate run; supplies the scenario")
    roc.add_argument("--p", type=int)
    roc.add_argument("--k", type=int, default=2)
    roc.add_argument("--n", type=int)
    roc.add_argument("--s", type=float)
    roc.add_argument("--rho", type=float, default=0.0)
    roc.add_argument("--methods", default="sns,ins",
                     help=f"comma list from {','.join(ROC_METHODS)}")
    roc.add_argument("--grid-start", type=float, default=1e-5)
    roc.add_argument("--grid-end", type=float, default=1.0)
    roc.add_argument("--grid-points", type=int, default=100)
    roc.add_argument("--replicates", type=int, default=5)
    roc.add_argument("--lambda-init", type=float, default=0.05)
    roc.add_argument("--tol", type=float, default=1e-5)
    roc.add_argument("--max-iter", type=int, default=50000)
    roc.add_argument("--seed", type=int, default=None)
    roc.add_argument("--threads", type=int, default=None)
    roc.add_argument("--out-dir", required=True)

    bench = sub.add_parser("bench", help="per-iteration ADMM timing table")
    bench.add_argument("--p-list", default="64,128,256,512")
    bench.add_argument("--n", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--b", type=float, default=1.0)
    bench.add_argument("--iterations", type=int, default=5)
    bench.add_argument("--out-dir", required=True)

    rerun = sub.add_parser("rerun", help="re-execute a recorded manifest")
    rerun.add_argument("manifest")
    rerun.add_argument("--out-dir", default=None,
                       help="redirect outputs (defaults to the recorded directory)")

    return parser


def _config_from_args(args):
    if args.command == "simulate":
        return {
            "p": args.p, "k": args.k, "n": args.n, "s": args.s,
            "rho": args.rho, "seed": args.seed, "out_dir": args.out_dir,
        }
    if args.command == "fit":
        return {
            "method": args.method, "lam": args.lam,
            "lambda_init": args.lambda_init, "edge_rule": args.edge_rule,
            "lla_steps": args.lla_steps, "b": args.b, "tol": args.tol,
            "max_iter": args.max_iter,
            "data": [tok for tok in args.data.split(",") if tok],
            "out_dir": args.out_dir,
        }
    if args.command == "roc":
        config = {
            "k": args.k, "rho": args.rho,
            "methods": [m for m in args.methods.split(",") if m],
            "grid_start": args.grid_start, "grid_end": args.grid_end,
            "grid_points": args.grid_points, "replicates": args.replicates,
            "lambda_init": args.lambda_init, "tol": args.tol,
            "max_iter": args.max_iter,
            "threads": args.threads or _default_threads(),
            "out_dir": args.out_dir,
        }
        if args.truth_dir:
            manifest_path = Path(args.truth_dir) / "manifest.json"
            src = read_manifest(manifest_path)
            if src.get("command") != "simulate":
                raise ValueError(f"{args.truth_dir}: manifest is not from a simulate run")
            sc = src["config"]
            config.update({"p": sc["p"], "k": sc["k"], "n": sc["n"],
                           "s": sc["s"], "rho": sc["rho"], "seed": sc["seed"]})
            config["inputs"] = {str(manifest_path): sha256_file(manifest_path)}
        if args.seed is not None:
            config["seed"] = args.seed
        config.setdefault("seed", 0)
        for field in ("p", "n", "s"):
            arg = getattr(args, field)
            if arg is not None:
                config[field] = arg
            elif field not in config:
                raise ValueError(f"--{field} is required without --truth-dir")
        return config
    if args.command == "bench":
        return {
            "p_list": [int(tok) for tok in args.p_list.split(",") if tok],
            "n": args.n, "seed": args.seed, "b": args.b,
            "iterations": args.iterations, "out_dir": args.out_dir,
        }
    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "rerun":
            return _run_rerun(args.manifest, args.out_dir)
        config = _config_from_args(args)
        return _RUNNERS[args.command](config)
    except SnselError as exc:
        print(json.dumps({"error": exc.category, "message": str(exc)}), file=sys.stderr)
        return EXIT_NOT_CONVERGED if isinstance(exc, NotConverged) else EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": "invalid-input", "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
