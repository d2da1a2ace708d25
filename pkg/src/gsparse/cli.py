"""Command line interface.

Subcommands: solve, sparsity, nsp check, reg eval, dist verify, sweep.
Reports are printed (or written) as JSON.  Exit codes: 0 on success, 2 on
validation errors, 3 on numerical failures.  The environment variable
GSPARSE_SEED overrides the sweep base seed and the default of every --seed
option.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import io as gio
from . import nsp as nsp_mod
from . import sparsity as sparsity_mod
from .distributions import DiscreteMixing, verify_cl_in_cg, verify_laplace_identity
from .errors import DimensionMismatch, NumericalError, ValidationError
from .solvers import GirlsConfig, SensingProblem, g_irls
from .sweep import SweepConfig, run_sweep


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and obj.__class__.__module__.startswith("gsparse"):
        return obj.value
    return obj


def _emit(data, path=None):
    text = json.dumps(_jsonable(data), indent=2)
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _env_seed(default: int) -> int:
    raw = os.environ.get("GSPARSE_SEED")
    return int(raw) if raw else default


def _cmd_solve(args) -> int:
    A = gio.read_matrix_csv(args.matrix)
    y = gio.read_vector_csv(args.y)
    if y.shape[0] != A.shape[0]:
        raise DimensionMismatch("y length must equal the row count of the matrix")
    reg = gio.regularizer_from_spec(args.spec, n=A.shape[1])
    problem = SensingProblem(A=A, y=y)
    config = GirlsConfig(
        K=args.K, eps_bar=args.eps_bar, max_iter=args.max_iter,
        eps0=args.eps0, spd_jitter=args.spd_jitter,
        record_trace=args.trace is not None,
    )
    result = g_irls(problem, reg, config)
    feas = float(np.max(np.abs(A @ result.c_bar - y)))
    _emit({
        "c_bar": result.c_bar,
        "iterations": result.iterations,
        "eps_final": result.eps_final,
        "termination": result.termination.value,
        "feasibility_residual": feas,
    }, args.out)
    if args.trace is not None:
        _emit({"trace": [
            {"c": e.c, "w": e.w, "eps": e.eps, "loss": e.loss,
             "feasibility_residual": e.feasibility_residual}
            for e in result.trace
        ]}, args.trace)
    return 0


def _cmd_sparsity(args) -> int:
    x = gio.read_vector_csv(args.x)
    reg = gio.regularizer_from_spec(args.spec, n=x.shape[0])
    report = sparsity_mod.analyze(reg, x, args.K, args.eps)
    payload = _jsonable(report)
    payload["rearranged_value"] = sparsity_mod.rearranged_value(
        reg.component_values(x), args.K
    )
    _emit(payload)
    return 0


def _cmd_nsp_check(args) -> int:
    A = gio.read_matrix_csv(args.matrix)
    reg = gio.regularizer_from_spec(args.spec, n=A.shape[1])
    radii = (
        tuple(float(r) for r in args.radii.split(","))
        if args.radii else nsp_mod.DEFAULT_RADII
    )
    sampling = nsp_mod.NspSampling(
        count=args.samples, radii=radii, seed=_env_seed(args.seed),
        grid_points=args.grid_points,
    )
    query = nsp_mod.NspQuery(K=args.K, gamma=args.gamma, delta=args.delta)
    _emit(nsp_mod.check_nsp(A, reg, query, sampling))
    return 0


def _cmd_reg_eval(args) -> int:
    x = gio.read_vector_csv(args.x)
    reg = gio.regularizer_from_spec(args.spec, n=x.shape[0])
    comps = reg.component_values(x)
    _emit({"value": float(comps.sum()), "components": comps})
    return 0


def _cmd_dist_verify(args) -> int:
    seed = _env_seed(args.seed)
    if args.identity == "laplace":
        report = verify_laplace_identity(args.sigma, args.lam, args.n, seed)
    else:
        atoms = tuple(float(a) for a in args.atoms.split(","))
        weights = tuple(float(w) for w in args.weights.split(","))
        mixing = DiscreteMixing(atoms=atoms, weights=weights)
        report = verify_cl_in_cg(mixing, args.sigma, args.lam, args.n, seed)
    _emit(report)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        data = json.load(fh)
    config = SweepConfig.from_dict(data)
    env = os.environ.get("GSPARSE_SEED")
    if env:
        config = dataclasses.replace(config, base_seed=int(env))
    run_sweep(config, out_path=args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsparse",
        description="Generalized-sparsity solvers, diagnostics, and experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run generalized IRLS on A, y")
    p.add_argument("--matrix", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--spec", required=True, help="regularizer spec JSON")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--eps-bar", type=float, default=1e-9, dest="eps_bar")
    p.add_argument("--max-iter", type=int, default=1000, dest="max_iter")
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--spd-jitter", type=float, default=0.0, dest="spd_jitter")
    p.add_argument("--trace", default=None, help="write the iteration trace here")
    p.add_argument("--out", default=None, help="write the result JSON here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sparsity", help="sparsity report for a vector")
    p.add_argument("--spec", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_sparsity)

    p_nsp = sub.add_parser("nsp", help="weak null space property tools")
    nsp_sub = p_nsp.add_subparsers(dest="nsp_command", required=True)
    p = nsp_sub.add_parser("check", help="falsify a (K, gamma, delta) query")
    p.add_argument("--matrix", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radii", default=None, help="comma-separated radii")
    p.add_argument("--grid-points", type=int, default=0, dest="grid_points")
    p.set_defaults(func=_cmd_nsp_check)

    p_reg = sub.add_parser("reg", help="regularizer tools")
    reg_sub = p_reg.add_subparsers(dest="reg_command", required=True)
    p = reg_sub.add_parser("eval", help="evaluate R(x) and per-component values")
    p.add_argument("--spec", required=True)
    p.add_argument("--x", required=True)
    p.set_defaults(func=_cmd_reg_eval)

    p_dist = sub.add_parser("dist", help="distribution tools")
    dist_sub = p_dist.add_subparsers(dest="dist_command", required=True)
    p = dist_sub.add_parser("verify", help="Monte Carlo check of a mixture identity")
    p.add_argument("--identity", choices=["laplace", "cl-cg"], required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--lambda", type=float, required=True, dest="lam")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--atoms", default="1.0", help="mixing atoms (cl-cg only)")
    p.add_argument("--weights", default="1.0", help="mixing weights (cl-cg only)")
    p.set_defaults(func=_cmd_dist_verify)

    p = sub.add_parser("sweep", help="run a recovery-rate sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
