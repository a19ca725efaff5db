"""Command-line harness.

Subcommands: generate, solve, certify, compare, experiment signal-recovery.
Reports are JSON, trajectories and signal panels are CSV. Exit codes form a
stable contract: 0 certified success, 2 not converged / failed certificate,
1 usage or I/O error. NEUROLASSO_THREADS caps the linear-algebra thread
pool when threadpoolctl is available.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import BaselineConfig, fista_solve, ista_solve, sign_pattern_oracle
from .certification import certify, fixed_point_residual
from .dynamics import SolveResult, SolveStatus, SolverConfig, solve
from .errors import NeuroLassoError
from .matio import load_matrix, load_vector, save_matrix, save_vector
from .problem import build_instance, primal_objective
from .synth import ExperimentSpec, generate, least_norm_solution, recovery_metrics

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2

SOLVERS = ("neural", "ista", "fista", "oracle")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; remap to the documented 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, SolveStatus):
        return o.value
    raise TypeError(f"not JSON serializable: {type(o)}")


def _emit(report: dict, output: str | None) -> None:
    text = json.dumps(report, indent=2, default=_json_default)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def _ext(binary: bool) -> str:
    return ".bin" if binary else ".csv"


def _load_instance(path):
    """Read an instance directory written by `generate`.

    Returns (A, b, lam, meta, x0 or None)."""
    d = Path(path)
    if not d.is_dir():
        raise FileNotFoundError(f"instance directory not found: {d}")
    meta = json.loads((d / "meta.json").read_text())
    A = load_matrix(_find(d, "A"))
    b = load_vector(_find(d, "b"))
    x0_path = None
    for ext in (".csv", ".bin"):
        if (d / f"x0{ext}").exists():
            x0_path = d / f"x0{ext}"
            break
    x0 = load_vector(x0_path) if x0_path else None
    return A, b, float(meta["lam"]), meta, x0


def _find(d: Path, stem: str) -> Path:
    for ext in (".csv", ".bin"):
        p = d / f"{stem}{ext}"
        if p.exists():
            return p
    raise FileNotFoundError(f"{d}: no {stem}.csv or {stem}.bin")


def _solve_result_summary(res: SolveResult) -> dict:
    return {
        "status": res.status.value,
        "converged": res.converged,
        "steps": res.steps_taken,
        "final_residual": res.final_residual,
        "objective": res.objective,
        "step_size": res.step_size,
        "elapsed_seconds": res.elapsed,
    }


def _run_solver(name, inst, cache, args, record_trajectory=False):
    if name == "neural":
        cfg = SolverConfig(
            integrator=args.integrator,
            step_size=args.step_size,
            tol=args.tol,
            max_steps=args.max_steps,
            record_trajectory=record_trajectory,
        )
        return solve(inst, cache, cfg), {
            "integrator": cfg.integrator,
            "step_size": cfg.step_size,
            "tol": cfg.tol,
            "max_steps": cfg.max_steps,
        }
    if name in ("ista", "fista"):
        cfg = BaselineConfig(
            method=name,
            step=args.step_size,
            tol=args.tol,
            max_iters=args.max_steps,
            record_trajectory=record_trajectory,
        )
        fn = ista_solve if name == "ista" else fista_solve
        return fn(inst, cache, cfg), {
            "step": cfg.step,
            "tol": cfg.tol,
            "max_iters": cfg.max_iters,
        }
    if name == "oracle":
        t0 = time.perf_counter()
        x = sign_pattern_oracle(inst, cache)
        elapsed = time.perf_counter() - t0
        res = SolveResult(
            x=x,
            status=SolveStatus.CONVERGED,
            steps_taken=0,
            final_residual=fixed_point_residual(inst, cache, x),
            objective=primal_objective(inst, x),
            step_size=0.0,
            elapsed=elapsed,
        )
        return res, {"enumeration": "sign patterns"}
    raise ValueError(f"unknown solver {name!r}")


def cmd_generate(args) -> int:
    spec = ExperimentSpec.from_json(Path(args.config).read_text())
    if args.seed is not None:
        spec = ExperimentSpec(**{**json.loads(spec.to_json()), "seed": args.seed})
    x0, A, b, lam = generate(spec)
    out = Path(args.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    ext = _ext(args.binary)
    save_matrix(out / f"A{ext}", A)
    save_vector(out / f"b{ext}", b)
    save_vector(out / f"x0{ext}", x0)
    meta = {
        "lam": lam,
        "spec": json.loads(spec.to_json()),
        "seed": spec.seed,
        "version": __version__,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(
        f"generated instance: n={spec.n} l={spec.l} spikes={spec.spikes} "
        f"sigma={spec.sigma} seed={spec.seed} lam={lam:.6g} -> {out}"
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    A, b, lam, meta, x0 = _load_instance(args.instance)
    inst, cache = build_instance(A, b, lam, matrix_free=args.matrix_free)
    res, solver_cfg = _run_solver(
        args.solver, inst, cache, args, record_trajectory=bool(args.trajectory)
    )
    if args.trajectory and res.trajectory is not None:
        res.trajectory.to_csv(args.trajectory)
    cert = certify(inst, cache, res.x, tol=args.tol)
    report = {
        "command": "solve",
        "instance": str(args.instance),
        "seed": meta.get("seed"),
        "solver": args.solver,
        "solver_config": solver_cfg,
        "result": _solve_result_summary(res),
        "certificate": cert.as_dict(),
        "version": __version__,
    }
    if x0 is not None:
        report["recovery"] = recovery_metrics(x0, res.x).as_dict()
    if args.solution:
        save_vector(args.solution, res.x)
    _emit(report, args.output)
    if not res.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if cert.passed else EXIT_NOT_CONVERGED


def cmd_certify(args) -> int:
    A, b, lam, meta, _ = _load_instance(args.instance)
    inst, cache = build_instance(A, b, lam, matrix_free=args.matrix_free)
    x = load_vector(args.solution)
    cert = certify(inst, cache, x, tol=args.tol)
    report = {
        "command": "certify",
        "instance": str(args.instance),
        "solution": str(args.solution),
        "certificate": cert.as_dict(),
        "version": __version__,
    }
    _emit(report, args.output)
    return EXIT_OK if cert.passed else EXIT_NOT_CONVERGED


def cmd_compare(args) -> int:
    names = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if len(names) < 2:
        _usage_error("compare needs at least 2 solvers (comma separated)")
    A, b, lam, meta, _ = _load_instance(args.instance)
    inst, cache = build_instance(A, b, lam, matrix_free=args.matrix_free)
    rows = []
    results = {}
    for name in names:
        res, _cfg = _run_solver(name, inst, cache, args)
        results[name] = res
        rows.append(
            {
                "solver": name,
                "objective": res.objective,
                "residual": res.final_residual,
                "iterations": res.steps_taken,
                "elapsed_seconds": res.elapsed,
                "status": res.status.value,
            }
        )
    flags = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            oi, oj = results[names[i]].objective, results[names[j]].objective
            denom = max(abs(oi), abs(oj), 1e-300)
            rel = abs(oi - oj) / denom
            if rel > 1e-5:
                flags.append(
                    {"pair": [names[i], names[j]], "relative_gap": rel}
                )
    report = {
        "command": "compare",
        "instance": str(args.instance),
        "seed": meta.get("seed"),
        "table": rows,
        "disagreement_flags": flags,
        "version": __version__,
    }
    _emit(report, args.output)
    if args.output:
        csv_path = Path(args.output).with_suffix(".csv")
        with open(csv_path, "w") as fh:
            fh.write("solver,objective,residual,iterations,elapsed_seconds,status\n")
            for r in rows:
                fh.write(
                    f"{r['solver']},{r['objective']:.17g},{r['residual']:.17g},"
                    f"{r['iterations']},{r['elapsed_seconds']:.6g},{r['status']}\n"
                )
    return EXIT_OK if not flags else EXIT_NOT_CONVERGED


def cmd_experiment_signal_recovery(args) -> int:
    spec = ExperimentSpec.from_json(Path(args.config).read_text())
    if args.seed is not None:
        spec = ExperimentSpec(**{**json.loads(spec.to_json()), "seed": args.seed})
    t0 = time.perf_counter()
    x0, A, b, lam = generate(spec)
    inst, cache = build_instance(A, b, lam, matrix_free=args.matrix_free)
    res, solver_cfg = _run_solver(
        args.solver, inst, cache, args, record_trajectory=bool(args.trajectory)
    )
    if args.trajectory and res.trajectory is not None:
        res.trajectory.to_csv(args.trajectory)
    cert = certify(inst, cache, res.x, tol=args.tol)
    x_ln = least_norm_solution(A, b)
    rec = recovery_metrics(x0, res.x)
    rec_ln = recovery_metrics(x0, x_ln)
    elapsed = time.perf_counter() - t0

    signals_path = args.signals or (
        str(Path(args.output).with_suffix(".signals.csv")) if args.output else "signals.csv"
    )
    with open(signals_path, "w") as fh:
        fh.write("index,x0,least_norm,recovered\n")
        for i in range(spec.l):
            fh.write(f"{i},{x0[i]:.17g},{x_ln[i]:.17g},{res.x[i]:.17g}\n")

    report = {
        "command": "experiment signal-recovery",
        "spec": json.loads(spec.to_json()),
        "seed": spec.seed,
        "lam": lam,
        "solver": args.solver,
        "solver_config": solver_cfg,
        "result": _solve_result_summary(res),
        "certificate": cert.as_dict(),
        "recovery": rec.as_dict(),
        "least_norm_recovery": rec_ln.as_dict(),
        "signals_csv": str(signals_path),
        "elapsed_seconds": elapsed,
        "version": __version__,
    }
    _emit(report, args.output)
    if not res.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if cert.passed else EXIT_NOT_CONVERGED


def _usage_error(message: str):
    sys.stderr.write(f"error: {message}\n")
    raise SystemExit(EXIT_USAGE)


def _add_solver_flags(p: argparse.ArgumentParser, with_solver=True):
    if with_solver:
        p.add_argument("--solver", choices=SOLVERS, default="neural")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--step-size", dest="step_size", type=float, default=None)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=500_000)
    p.add_argument("--integrator", choices=("euler", "rk4", "adaptive"), default="euler")
    p.add_argument("--matrix-free", action="store_true")
    p.add_argument("--trajectory", default=None, help="write per-step CSV here")
    p.add_argument("--output", default=None, help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="neurolasso", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="draw a synthetic instance from a JSON spec")
    g.add_argument("--config", required=True)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--output", default=None, help="instance directory")
    g.add_argument("--binary", action="store_true", help="write binary matrices")
    g.set_defaults(fn=cmd_generate)

    s = sub.add_parser("solve", help="run a solver on a stored instance")
    s.add_argument("instance", help="instance directory from `generate`")
    _add_solver_flags(s)
    s.add_argument("--solution", default=None, help="write the solution vector here")
    s.set_defaults(fn=cmd_solve)

    c = sub.add_parser("certify", help="certify a stored solution vector")
    c.add_argument("instance")
    c.add_argument("solution", help="solution vector file")
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--matrix-free", action="store_true")
    c.add_argument("--output", default=None)
    c.set_defaults(fn=cmd_certify)

    m = sub.add_parser("compare", help="run several solvers and compare objectives")
    m.add_argument("instance")
    m.add_argument("--solvers", required=True, help="comma-separated list, e.g. neural,ista")
    _add_solver_flags(m, with_solver=False)
    m.set_defaults(fn=cmd_compare)

    e = sub.add_parser("experiment", help="end-to-end experiment pipelines")
    esub = e.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    er = esub.add_parser(
        "signal-recovery", help="generate, solve, certify, and score one spec"
    )
    er.add_argument("--config", required=True)
    er.add_argument("--seed", type=int, default=None)
    _add_solver_flags(er)
    er.add_argument("--signals", default=None, help="three-panel CSV path")
    er.set_defaults(fn=cmd_experiment_signal_recovery)

    return parser


def _thread_cap():
    raw = os.environ.get("NEUROLASSO_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        _usage_error(f"NEUROLASSO_THREADS must be an integer, got {raw!r}")
    if n < 1:
        _usage_error("NEUROLASSO_THREADS must be at least 1")
    return n


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cap = _thread_cap()
    try:
        if cap is not None:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=cap):
                return args.fn(args)
        return args.fn(args)
    except (NeuroLassoError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
