"""Command-line entry point.

Exit codes: 0 success, 1 numerical failure, 2 stability condition violated
while enforcement was requested (argparse also uses 2 for usage errors).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import harness
from .conditions import check_problem, eigenvalue_check
from .problems import ProblemSpec, ProblemSpec2D, RemarkMatrices, get_problem, load_problem_config
from .solver1d import ConditionViolation, Grid1D, LinearSolveError, SolveOptions, solve_1d
from .solver2d import make_grid, solve_2d_adi
from .spectral import ConvergenceError, generating_function_profile

log = logging.getLogger("fracwsgd")

EXIT_OK, EXIT_NUMERICAL, EXIT_CONDITION = 0, 1, 2


class NumericalFailure(RuntimeError):
    pass


def _step(text: str) -> float:
    """Accept ``0.03125`` or ``1/32``."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a step size: {text!r}") from None


def _load_problem(args):
    if args.config is not None:
        problem = load_problem_config(args.config)
    elif getattr(args, "problem", None):
        problem = get_problem(args.problem)
    else:
        raise ValueError("give a problem label or --config FILE")
    alpha = getattr(args, "alpha", None)
    beta = getattr(args, "beta", None)
    if isinstance(problem, ProblemSpec) and alpha is not None:
        problem = problem.with_alpha(alpha)
    elif isinstance(problem, ProblemSpec2D) and (alpha is not None or beta is not None):
        problem = problem.with_orders(
            problem.alpha if alpha is None else alpha, problem.beta if beta is None else beta
        )
    elif isinstance(problem, RemarkMatrices) and alpha is not None:
        problem = RemarkMatrices(problem.dplus, problem.dminus, alpha, problem.m, problem.expected_real_parts)
    return problem


def _snapshot_steps(text, n_steps: int) -> tuple:
    if not text:
        return (n_steps,)
    if text == "all":
        return tuple(range(n_steps + 1))
    steps = tuple(int(s) for s in text.split(","))
    if any(s < 0 or s > n_steps for s in steps):
        raise ValueError(f"snapshot steps must lie in 0..{n_steps}")
    return steps


def _snapshot_path(out: str, n: int, several: bool) -> Path:
    path = Path(out)
    if not several:
        return path
    return path.with_name(f"{path.stem}_n{n}{path.suffix or '.csv'}")


def _require_finite(u) -> None:
    if not np.all(np.isfinite(u)):
        raise NumericalFailure("solution contains non-finite values")


# --- subcommands ---


def cmd_check(args) -> int:
    problem = _load_problem(args)
    if isinstance(problem, RemarkMatrices):
        report = eigenvalue_check(problem.dplus, problem.dminus, problem.alpha, problem.m)
        if args.json:
            print(json.dumps({
                "eigenvalues": [[float(z.real), float(z.imag)] for z in report.eigenvalues],
                "unstable": report.unstable.tolist(),
            }))
        else:
            print(report.format_text())
        return EXIT_CONDITION if args.enforce and not report.stable else EXIT_OK
    reports = check_problem(problem, n=args.samples, assert_shape=args.assert_shape)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2, default=float))
    else:
        print(f"problem {problem.label}")
        print("\n\n".join(r.format_text() for r in reports))
    ok = all(r.satisfied for r in reports)
    return EXIT_CONDITION if args.enforce and not ok else EXIT_OK


def _solve_options(args, n_steps: int) -> SolveOptions:
    return SolveOptions(
        method="krylov" if getattr(args, "krylov", False) else "auto",
        rtol=getattr(args, "rtol", 1e-12),
        require_condition=args.enforce,
        assert_shape=args.assert_shape,
        snapshot_steps=_snapshot_steps(args.snapshots, n_steps),
    )


def cmd_solve1d(args) -> int:
    problem = _load_problem(args)
    if not isinstance(problem, ProblemSpec):
        raise ValueError(f"{problem.label} is not a 1D problem")
    options = _solve_options(args, args.n)
    grid = Grid1D(problem.x_left, problem.x_right, args.m)
    acc = harness.E2Accumulator(problem.exact, (grid.nodes,), grid.h) if problem.has_exact else None
    options.observer = acc
    result = solve_1d(problem, args.m, args.n, options)
    _require_finite(result.u_final)
    tau = problem.T / args.n
    if args.out:
        several = len(result.snapshots) > 1
        for n, u in result.snapshots:
            path = _snapshot_path(args.out, n, several)
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["x", "u"])
                writer.writerows(zip(grid.nodes.tolist(), u.tolist()))
            log.info("wrote t=%g to %s", n * tau, path)
    summary = {
        "problem": problem.label, "alpha": problem.alpha, "m": args.m, "n": args.n,
        "linear_solver": result.diagnostics.get("linear_solver"), "wall_seconds": result.wall_time,
    }
    if acc is not None:
        summary["E2"] = acc.value
    print(json.dumps(summary))
    return EXIT_OK


def cmd_solve2d(args) -> int:
    problem = _load_problem(args)
    if not isinstance(problem, ProblemSpec2D):
        raise ValueError(f"{problem.label} is not a 2D problem")
    options = _solve_options(args, args.n)
    grid = make_grid(problem, args.m1, args.m2)
    acc = harness.E2Accumulator(problem.exact, grid.mesh(), grid.cell_area) if problem.has_exact else None
    options.observer = acc
    result = solve_2d_adi(problem, args.m1, args.m2, args.n, options)
    _require_finite(result.u_final)
    if args.out:
        several = len(result.snapshots) > 1
        X, Y = np.meshgrid(grid.x.nodes, grid.y.nodes)
        for n, u in result.snapshots:
            path = _snapshot_path(args.out, n, several)
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["x", "y", "u"])
                writer.writerows(zip(X.ravel().tolist(), Y.ravel().tolist(), u.ravel().tolist()))
    summary = {
        "problem": problem.label, "alpha": problem.alpha, "beta": problem.beta,
        "m1": args.m1, "m2": args.m2, "n": args.n, "wall_seconds": result.wall_time,
    }
    if acc is not None:
        summary["E2"] = acc.value
    print(json.dumps(summary))
    return EXIT_OK


def cmd_convergence(args) -> int:
    base = _load_problem(args)
    alphas = args.alphas or [None]
    betas = args.betas or [None] * len(alphas)
    if len(betas) != len(alphas):
        raise ValueError("--betas must pair one-to-one with --alphas")
    options = SolveOptions(require_condition=args.enforce, assert_shape=args.assert_shape)
    tables = []
    for alpha, beta in zip(alphas, betas):
        table = harness.run_convergence(base, args.kind, args.steps, args.fixed, alpha=alpha, beta=beta, options=options)
        tables.append(table)
        path = None
        if args.out:
            path = Path(args.out)
            if len(alphas) > 1:
                path = path.with_name(f"{path.stem}_alpha{table.metadata['alpha']}{path.suffix}")
        text = harness.emit_table(table, args.format, path)
        if path is None:
            print(text)
    failed = [r for t in tables for r in t.rows if r.note or not math.isfinite(r.e2)]
    for row in failed:
        log.warning("step %g: %s", row.step, row.note or "non-finite error")
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_spectrum(args) -> int:
    profile = generating_function_profile(args.alpha, args.grid)
    rows = profile.to_rows()
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re_g", "im_g", "ratio"])
        writer.writerows(rows)
    print(json.dumps({"alpha": args.alpha, "rho": profile.rho, "sigma": profile.sigma, "out": args.out}))
    return EXIT_OK


# --- parser ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracwsgd", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, help="JSON problem definition used instead of a built-in label")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_args(p, with_beta=False):
        p.add_argument("problem", nargs="?", help="built-in problem label, e.g. ex5.1")
        p.add_argument("--alpha", type=float)
        if with_beta:
            p.add_argument("--beta", type=float)
        p.add_argument("--assert-shape", choices=["convex", "concave"], dest="assert_shape")
        p.add_argument("--enforce", action="store_true", help="exit 2 if the stability condition fails")

    p = sub.add_parser("check", help="evaluate the stability conditions")
    problem_args(p, with_beta=True)
    p.add_argument("--samples", type=int, default=1024, help="grid intervals for shape classification")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve1d", help="Crank-Nicolson solve of a 1D problem")
    problem_args(p)
    p.add_argument("--m", type=int, required=True, help="number of mesh intervals")
    p.add_argument("--n", type=int, required=True, help="number of time steps")
    p.add_argument("--krylov", action="store_true", help="use FFT-based GMRES instead of a dense LU")
    p.add_argument("--rtol", type=float, default=1e-12, help="relative residual target for GMRES")
    p.add_argument("--snapshots", help="comma-separated step indices, or 'all' (default: final step)")
    p.add_argument("--out", help="CSV path for snapshots (x,u)")
    p.set_defaults(func=cmd_solve1d)

    p = sub.add_parser("solve2d", help="ADI solve of a 2D problem")
    problem_args(p, with_beta=True)
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--snapshots")
    p.add_argument("--out", help="CSV path for snapshots (x,y,u)")
    p.set_defaults(func=cmd_solve2d)

    p = sub.add_parser("convergence", help="run a convergence study")
    problem_args(p)
    p.add_argument("--kind", choices=["spatial", "temporal"], required=True)
    p.add_argument("--steps", type=_step, nargs="+", required=True)
    p.add_argument("--fixed", type=_step, required=True, help="the step held fixed (tau or h)")
    p.add_argument("--alphas", type=float, nargs="+")
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    p.add_argument("--out")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("spectrum", help="export the generating function on [-pi, pi]")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConditionViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (LinearSolveError, ConvergenceError, NumericalFailure, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (KeyError, ValueError, OSError) as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
