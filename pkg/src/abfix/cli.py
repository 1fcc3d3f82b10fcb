"""Command line front end: ``abfix run <file>`` and ``abfix schema``.

Every run writes a JSON summary with a fixed set of top-level keys::

    version, task, seed, inputs, status, error, result, constants, K,
    termination, n_iter, final_residual, bound_available, warnings

Keys that do not apply to a task are null.  Iterative tasks also write a
trace CSV (``iteration, residual, a_priori_bound``) and grid tasks a
solution CSV (``node, value``).

Exit status: 0 success, 2 invalid problem file, 3 solver divergence or a
failed strict precondition, 4 evaluation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import builtins, fredholm, ode
from .contraction import check_condition, derived_rate, estimate_constants
from .errors import ClosureError, EvaluationError, InfeasibleError, SolverError
from .grid import GridFunction, uniform_grid
from .iterate import FixedPointResult, StoppingRule, picard, write_trace_csv
from .metric import (AlphaBetaParams, FiniteSet, GridSpace, Interval, RealLine,
                     builtin_space, classify_space, verify_axioms)
from .problem import ProblemFile, ProblemFileError, parse_problem_file, problem_schema

log = logging.getLogger("abfix")

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED, EXIT_EVALUATION = 0, 2, 3, 4

SUMMARY_KEYS = ("version", "task", "seed", "inputs", "status", "error", "result",
                "constants", "K", "termination", "n_iter", "final_residual",
                "bound_available", "warnings")

MAX_LISTED_VIOLATIONS = 20


def build_space(spec):
    domain = None
    d = spec.domain
    if d is not None:
        if d.kind == "interval":
            domain = Interval(d.lower, d.upper)
        elif d.kind == "real-line":
            domain = RealLine(d.scale)
        elif d.kind == "points":
            domain = FiniteSet(tuple(d.points))
        else:
            domain = GridSpace(uniform_grid(d.lower, d.upper, d.intervals), d.value_range)
    space = builtin_space(spec.name, domain)
    if spec.alpha is not None or spec.beta is not None:
        claimed = space.params or AlphaBetaParams()
        params = AlphaBetaParams(spec.alpha if spec.alpha is not None else claimed.alpha,
                                 spec.beta if spec.beta is not None else claimed.beta)
        space = type(space)(space.domain, space.distance, params, space.name)
    return space


def _stop(block) -> StoppingRule:
    return StoppingRule(block.tol, block.max_iter, block.mode)


def _axiom_summary(report, witness_report) -> dict:
    out = report.to_dict()
    listed = out.pop("violations")
    out["violations_total"] = len(listed)
    worst = {}
    for v in listed:
        best = worst.get(v["axiom"])
        if best is None or v["lhs"] - v["rhs"] > best["lhs"] - best["rhs"]:
            worst[v["axiom"]] = v
    out["worst_by_axiom"] = worst
    out["witness_violations"] = (
        witness_report.to_dict()["violations"][:MAX_LISTED_VIOLATIONS]
        if witness_report else [])
    return out


def _run_verify(block, seed, out):
    space = build_space(block.space)
    params = AlphaBetaParams(block.alpha, block.beta)
    witnesses = [tuple(w) for w in block.witnesses]
    report = verify_axioms(space, params, n_triples=block.n_triples, seed=seed,
                           witnesses=witnesses)
    witness_report = verify_axioms(space, params, triples=witnesses) if witnesses else None
    out["result"] = _axiom_summary(report, witness_report)


def _run_classify(block, seed, out):
    space = build_space(block.space)
    cls = classify_space(space, n_triples=block.n_triples, seed=seed,
                         witnesses=[tuple(w) for w in block.witnesses])
    out["result"] = cls.to_dict()


def _run_estimate(block, seed, out):
    space = build_space(block.space)
    fmap = builtins.lookup(builtins.MAPS, block.map, "map")
    witnesses = [tuple(w) for w in block.witnesses]
    try:
        spec = estimate_constants(block.kind, fmap, space, n_pairs=block.n_pairs,
                                  seed=seed, witnesses=witnesses)
    except InfeasibleError as exc:
        out["result"] = {"feasible": False, "reason": str(exc), "estimate": exc.estimate}
        return
    check = check_condition(spec, fmap, space, n_pairs=block.n_pairs, seed=seed,
                            witnesses=witnesses)
    out["result"] = {"feasible": True, "check": check.to_dict()}
    out["constants"] = spec.as_dict()
    out["K"] = derived_rate(spec)


def _fill_iteration(out, result: FixedPointResult):
    out["termination"] = result.termination
    out["n_iter"] = result.n_iter
    out["final_residual"] = result.final_residual
    out["bound_available"] = result.bound_available
    out["warnings"] = list(result.warnings)


def _write_solution(path, fn: GridFunction):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "value"])
        for s, v in zip(fn.nodes, fn.values):
            w.writerow([repr(float(s)), repr(float(v))])


def _run_solve_map(block, seed, out, paths):
    space = build_space(block.space)
    fmap = builtins.lookup(builtins.MAPS, block.map, "map")
    spec = block.spec()
    result = picard(fmap, space, block.x0, spec, _stop(block))
    out["constants"] = spec.as_dict()
    out["K"] = derived_rate(spec)
    out["result"] = {"fixed_point": result.fixed_point,
                     "planned_iterations": result.planned_iterations,
                     "alpha": result.params.alpha, "beta": result.params.beta}
    _fill_iteration(out, result)
    write_trace_csv(result, paths["trace"])


def _grid_result(result, out, paths, extra):
    fp = result.fixed_point
    out["K"] = result.rate
    out["result"] = {"nodes": int(fp.nodes.size),
                     "max_abs_value": float(np.max(np.abs(fp.values))),
                     "planned_iterations": result.planned_iterations,
                     "solution_csv": paths["solution"].name, **extra}
    _fill_iteration(out, result)
    write_trace_csv(result, paths["trace"])
    _write_solution(paths["solution"], fp)


def _run_fredholm(block, seed, out, paths, strict):
    kernel = builtins.lookup(builtins.KERNELS, block.kernel, "kernel")
    problem = fredholm.FredholmProblem(kernel, block.m, block.n, block.lipschitz)
    lam = block.lipschitz
    if lam is None:
        lam = fredholm.estimate_kernel_lipschitz(problem, seed=seed)
    problem = fredholm.FredholmProblem(kernel, block.m, block.n, lam if lam > 0 else None)
    out["constants"] = {"lipschitz": lam, "contraction_factor": lam * problem.length}
    result = fredholm.solve(problem, block.M, block.quadrature, _stop(block),
                            strict=strict, x0=block.x0, seed=seed)
    _grid_result(result, out, paths, {"quadrature": block.quadrature})


def _run_ode(block, seed, out, paths, strict):
    rhs = builtins.lookup(builtins.RHS, block.rhs, "rhs")
    problem = ode.OdeProblem(rhs, block.s0, block.r0, block.h, block.lipschitz)
    lam = block.lipschitz
    if lam is None:
        lam = ode.estimate_lipschitz(problem, seed=seed)
    problem = ode.OdeProblem(rhs, block.s0, block.r0, block.h, lam if lam > 0 else None)
    out["constants"] = {"lipschitz": lam, "contraction_factor": lam * problem.h}
    result = ode.solve_ivp(problem, block.nodes_per_side, _stop(block),
                           strict=strict, seed=seed)
    _grid_result(result, out, paths, {})


def run(problem: ProblemFile, out_dir=".", *, strict: bool = False,
        seed=None) -> int:
    """Execute ``problem`` and write its outputs into ``out_dir``.

    Returns the process exit status.
    """
    seed = problem.seed if seed is None else seed
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {k: out_dir / getattr(problem.output, k) for k in ("summary", "trace", "solution")}
    block = problem.block
    out = dict.fromkeys(SUMMARY_KEYS)
    out.update(version=problem.version, task=problem.task, seed=seed,
               inputs=block.model_dump(mode="json", by_alias=True, exclude_none=True),
               status="ok", warnings=[])

    status = EXIT_OK
    try:
        if problem.task == "verify-metric":
            _run_verify(block, seed, out)
        elif problem.task == "classify":
            _run_classify(block, seed, out)
        elif problem.task == "estimate-contraction":
            _run_estimate(block, seed, out)
        elif problem.task == "solve-map":
            _run_solve_map(block, seed, out, paths)
        elif problem.task == "solve-fredholm":
            _run_fredholm(block, seed, out, paths, strict)
        else:
            _run_ode(block, seed, out, paths, strict)
    except SolverError as exc:
        out.update(status="diverged", error=str(exc))
        out["result"] = {"factor": getattr(exc, "factor", None)}
        status = EXIT_DIVERGED
    except (EvaluationError, ClosureError) as exc:
        out.update(status="evaluation-error", error=str(exc))
        status = EXIT_EVALUATION

    with open(paths["summary"], "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return status


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, GridFunction):
        return obj.values.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="abfix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a problem file")
    p_run.add_argument("file")
    p_run.add_argument("--seed", type=int, default=None, help="override the file's seed")
    p_run.add_argument("--out-dir", default=".", help="directory for outputs")
    mode = p_run.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true",
                      help="fail when a contraction precondition does not hold")
    mode.add_argument("--best-effort", dest="strict", action="store_false",
                      help="warn and keep iterating (default)")
    sub.add_parser("schema", help="print the problem-file JSON schema")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "schema":
        json.dump(problem_schema(), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return EXIT_OK
    if args.seed is not None and args.seed < 0:
        print("abfix: --seed must be nonnegative", file=sys.stderr)
        return EXIT_INVALID
    try:
        problem = parse_problem_file(args.file)
    except (ProblemFileError, OSError) as exc:
        print(f"abfix: {exc}", file=sys.stderr)
        return EXIT_INVALID
    status = run(problem, args.out_dir, strict=args.strict, seed=args.seed)
    if status != EXIT_OK:
        print(f"abfix: task {problem.task} ended with status {status}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
