"""Command-line front end.

Subcommands: ``generate``, ``solve``, ``experiment``, ``bounds``. Failures
exit nonzero after printing a single line ``error: <Category>: <message>``
to stderr.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .errors import KaczmarzError, OracleUnavailable
from .experiment import (
    DEFAULT_ORACLE_CAP,
    ExperimentConfig,
    Problem,
    compatibility_warning,
    load_problem_reference,
    run_experiment,
)
from .linalg import as_vector
from .problemgen import GenSpec, generate_problem
from .solvers import ALGORITHMS, Tracker, run


def _add_problem_args(p, with_algorithm=True):
    if with_algorithm:
        p.add_argument("--algorithm", choices=ALGORITHMS, default="rdk")
    g = p.add_argument_group("generated problem")
    g.add_argument("--m", type=int, default=100)
    g.add_argument("--n", type=int, default=50)
    g.add_argument("--rank", type=int, default=30)
    g.add_argument("--kappa", type=float, default=1.0)
    cons = g.add_mutually_exclusive_group()
    cons.add_argument("--consistent", dest="consistent", action="store_true", default=None,
                      help="c in ran(A^T) (default unless --algorithm rtk)")
    cons.add_argument("--inconsistent", dest="consistent", action="store_false",
                      help="c outside ran(A^T) (default for --algorithm rtk)")
    g.add_argument("--gen-seed", type=int, default=None,
                   help="generation seed (default: --seed)")
    f = p.add_argument_group("problem from files")
    f.add_argument("--matrix", type=Path, help="Matrix Market file for A")
    f.add_argument("--b", type=Path, help="vector file for b")
    f.add_argument("--c", type=Path, help="vector file for c (default: zeros)")
    p.add_argument("--seed", type=int, default=0)


def _gen_spec(args, algorithm):
    consistent = args.consistent
    if consistent is None:
        consistent = algorithm != "rtk"
    seed = args.seed if args.gen_seed is None else args.gen_seed
    return GenSpec(m=args.m, n=args.n, r=args.rank, kappa=args.kappa, seed=seed, consistent=consistent)


def _load_problem(args, algorithm):
    """Return (problem, spec or None)."""
    if args.matrix is None:
        if args.b is not None or args.c is not None:
            raise SystemExit("error: Usage: --b/--c need --matrix")
        spec = _gen_spec(args, algorithm)
        return generate_problem(spec), spec
    if args.b is None:
        raise SystemExit("error: Usage: --matrix needs --b")
    A = io.read_matrix_market(args.matrix)
    b = as_vector(io.read_vector(args.b), A.m, "b")
    c = np.zeros(A.n) if args.c is None else as_vector(io.read_vector(args.c), A.n, "c")
    return Problem(A=A, b=b, c=c, source=str(args.matrix)), None


def cmd_generate(args):
    algorithm = "rtk" if args.consistent is False else "rdk"
    spec = _gen_spec(args, algorithm)
    prob = generate_problem(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    note = (f"m={spec.m} n={spec.n} rank={spec.r} kappa={spec.kappa!r} seed={spec.seed} "
            f"consistent={str(spec.consistent).lower()}")
    io.write_matrix_market(out / "A.mtx", prob.A, note)
    io.write_vector(out / "b.mtx", prob.b, note)
    io.write_vector(out / "c.mtx", prob.c, note)
    for name in ("A.mtx", "b.mtx", "c.mtx"):
        print(out / name)
    return 0


def _warn(msg):
    if msg:
        print(f"warning: {msg}", file=sys.stderr)


def cmd_solve(args):
    prob, _ = _load_problem(args, args.algorithm)
    A, b, c = prob.A, prob.b, prob.c
    ref = load_problem_reference(A, b, c, args.algorithm, args.oracle_cap)
    tracker = None
    if ref is not None:
        _warn(compatibility_warning(args.algorithm, ref, A, b))
        tracker = Tracker.from_reference(ref, args.algorithm, stride=max(args.iters, 1))
    state, trace = run(
        args.algorithm, A, b, c, iters=args.iters, seed=args.seed, tracker=tracker,
        check_every=args.check_every, tol=args.tol,
    )
    x = state.x
    E = A.entries
    cc = np.zeros(A.n) if args.algorithm == "rk" else c
    resid = E.T @ (E @ x) - E.T @ b + cc
    print(f"algorithm={args.algorithm}")
    print(f"iterations={trace.iterations_run}")
    print(f"stopped_early={str(trace.stopped_early).lower()}")
    print(f"normal_residual={io.format_float(np.linalg.norm(resid))}")
    print(f"ls_stationarity={io.format_float(np.linalg.norm(E.T @ (E @ resid)))}")
    if ref is not None:
        print(f"rho={io.format_float(ref.rho)}")
        print(f"sq_error={io.format_float(trace.sq_error[-1])}")
        print(f"bound={io.format_float(trace.bound[-1])}")
    else:
        print("oracle=skipped")
    if args.out:
        io.write_vector(args.out, x, f"{args.algorithm} iters={trace.iterations_run} seed={args.seed}")
    return 0


def cmd_experiment(args):
    prob, spec = _load_problem(args, args.algorithm)
    cfg = ExperimentConfig(
        algorithm=args.algorithm,
        spec=spec,
        problem=None if spec is not None else prob,
        trials=args.trials,
        iters=args.iters,
        base_seed=args.seed,
        track_stride=args.track_stride,
        workers=args.workers,
        oracle_cap=args.oracle_cap,
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = run_experiment(cfg)
    for w in caught:
        _warn(str(w.message))
    io.write_csv(res, args.out)
    ratio = res.mean_sq_error[-1] / res.bound[-1] if res.bound[-1] > 0 else float("nan")
    print(f"wrote {args.out} ({len(res.tracked_iterations)} rows, {res.wall_time:.2f} s)")
    print(f"final k={int(res.tracked_iterations[-1])} mean_sq_error={res.mean_sq_error[-1]:.6g} "
          f"bound={res.bound[-1]:.6g} ratio={ratio:.4f}")
    return 0


def cmd_bounds(args):
    prob, _ = _load_problem(args, args.algorithm)
    ref = load_problem_reference(prob.A, prob.b, prob.c, args.algorithm, args.oracle_cap)
    if ref is None:
        raise OracleUnavailable(f"min(m, n) exceeds the oracle cap {args.oracle_cap}")
    ks = np.arange(0, args.iters + 1, args.track_stride)
    if ks[-1] != args.iters:
        ks = np.append(ks, args.iters)
    bound = ref.bound(args.algorithm, ks)
    lines = [f"# algorithm: {args.algorithm}", f"# rho: {ref.rho!r}", "k,bound"]
    lines += [f"{int(k)},{io.format_float(v)}" for k, v in zip(ks, bound)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extkaczmarz",
        description="Randomized Kaczmarz solvers for A^T A x = A^T b - c.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write A, b, c for a synthetic problem")
    _add_problem_args(p, with_algorithm=False)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="single run; report residuals and write x")
    _add_problem_args(p)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--check-every", type=int, default=None,
                   help="evaluate the full residual every N iterations (two passes over A each)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.add_argument("--out", help="Matrix Market file for the final x")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="multi-trial mean error curve with bound column")
    _add_problem_args(p)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--track-stride", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bounds", help="convergence bound curve only")
    _add_problem_args(p)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--track-stride", type=int, default=1)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KaczmarzError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: InvalidArgument: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
