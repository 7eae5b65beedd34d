"""Crank-Nicolson time stepping for the 1D variable-coefficient problem."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .conditions import check_problem
from .operators import FractionalOperator, assemble_A, strang_circulant_eigenvalues
from .problems import ProblemSpec

DENSE_SOLVE_MAX_DIM = 1024


class LinearSolveError(RuntimeError):
    """The Krylov solver did not reach the requested residual."""


class ConditionViolation(RuntimeError):
    """A required stability condition does not hold for the problem."""

    def __init__(self, message, reports=()):
        super().__init__(message)
        self.reports = list(reports)


@dataclass(frozen=True)
class Grid1D:
    x_left: float
    x_right: float
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("need at least one interior node (m >= 2)")
        if self.x_right <= self.x_left:
            raise ValueError("empty interval")

    @property
    def h(self) -> float:
        return (self.x_right - self.x_left) / self.m

    @property
    def nodes(self) -> np.ndarray:
        """Interior nodes ``x_1 .. x_{m-1}``."""
        return self.x_left + self.h * np.arange(1, self.m)


@dataclass
class SolveOptions:
    method: str = "auto"  # "auto" | "dense" | "krylov"
    rtol: float = 1e-12
    max_krylov_iter: int = 5000
    restart: int = 60
    preconditioner: Optional[str] = "strang"  # or None
    require_condition: bool = False
    assert_shape: Optional[str] = None
    snapshot_steps: Optional[tuple] = None  # step indices to keep; None keeps none
    energy_check: bool = False
    energy_weight: str = "dplus"  # coefficient whose reciprocal weights the energy norm
    observer: Optional[Callable] = None  # called as observer(n, t_n, u_n)


@dataclass
class SolveResult:
    u_final: np.ndarray
    snapshots: list = field(default_factory=list)
    linear_solve_stats: list = field(default_factory=list)
    wall_time: float = 0.0
    diagnostics: dict = field(default_factory=dict)


class ShiftedSolver:
    """Solves ``(I - nu A) x = b`` repeatedly for a fixed operator and ``nu``.

    Small systems are LU-factored once; larger ones use restarted GMRES on
    the FFT-based product, optionally preconditioned by the Strang circulant
    of ``I - nu (mean d+ W + mean d- W^T)``.
    """

    def __init__(self, op: FractionalOperator, nu: float, options: Optional[SolveOptions] = None):
        if nu < 0:
            raise ValueError("nu must be nonnegative")
        self.op = op
        self.nu = float(nu)
        self.options = options or SolveOptions()
        method = self.options.method
        if method == "auto":
            method = "dense" if op.size <= DENSE_SOLVE_MAX_DIM else "krylov"
        if method not in ("dense", "krylov"):
            raise ValueError(f"unknown linear solve method {method!r}")
        self.method = method
        self.stats: list = []
        n = op.size
        if method == "dense":
            self._lu = scipy.linalg.lu_factor(np.eye(n) - self.nu * op.dense())
        else:
            self._operator = scipy.sparse.linalg.LinearOperator(
                (n, n), matvec=lambda v: v - self.nu * op.apply(v), dtype=float
            )
            self._precond = None
            if self.options.preconditioner == "strang":
                lam = strang_circulant_eigenvalues(op.w)
                eig = 1.0 - self.nu * (op.dplus.mean() * lam + op.dminus.mean() * np.conj(lam))
                self._precond = scipy.sparse.linalg.LinearOperator(
                    (n, n), matvec=lambda v: np.fft.ifft(np.fft.fft(v) / eig).real, dtype=float
                )

    def matvec(self, x) -> np.ndarray:
        return x - self.nu * self.op.apply(x)

    def solve(self, rhs, step: Optional[int] = None) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if self.nu == 0.0:
            self.stats.append({"step": step, "iterations": 0, "residual": 0.0})
            return rhs.copy()
        if self.method == "dense":
            x = scipy.linalg.lu_solve(self._lu, rhs)
            self.stats.append({"step": step, "iterations": 0})
            return x
        return self._gmres(rhs, step)

    def _gmres(self, rhs, step):
        opts = self.options
        norm_b = np.linalg.norm(rhs)
        if norm_b == 0.0:
            self.stats.append({"step": step, "iterations": 0, "residual": 0.0})
            return np.zeros_like(rhs)
        target = opts.rtol * norm_b
        count = [0]

        def tick(_):
            count[0] += 1

        x = np.zeros_like(rhs)
        r = rhs
        residual = norm_b
        best, stalled = np.inf, 0
        while count[0] < opts.max_krylov_iter:
            # refinement pass: one restart cycle on the correction equation, so
            # progress is judged by the true (unpreconditioned) residual
            d, _ = scipy.sparse.linalg.gmres(
                self._operator, r, rtol=max(0.5 * target / residual, 1e-15), atol=0.0,
                restart=opts.restart, maxiter=1,
                M=self._precond, callback=tick, callback_type="pr_norm",
            )
            x = x + d
            r = rhs - self.matvec(x)
            residual = np.linalg.norm(r)
            if residual <= target:
                self.stats.append({"step": step, "iterations": count[0], "residual": residual / norm_b})
                return x
            stalled = stalled + 1 if residual > 0.5 * best else 0
            best = min(best, residual)
            if stalled >= 5:
                break
        where = f" (time step {step})" if step is not None else ""
        reason = "stagnated (rounding floor of the residual)" if stalled >= 5 else "hit the iteration cap"
        raise LinearSolveError(
            f"GMRES {reason} at relative residual {residual / norm_b:.3e} > {opts.rtol:.1e} "
            f"after {count[0]} iterations{where}"
        )


def linear_solve(op: FractionalOperator, nu: float, rhs, options: Optional[SolveOptions] = None) -> np.ndarray:
    """One-off solve of ``(I - nu A) x = rhs``."""
    return ShiftedSolver(op, nu, options).solve(rhs)


def stability_functional(u, dplus, h: float) -> float:
    """Weighted energy ``h * sum u_i^2 / d+_i``."""
    u = np.asarray(u, dtype=float)
    dplus = np.asarray(dplus, dtype=float)
    if np.any(dplus <= 0):
        raise ValueError("energy weight coefficient must be strictly positive")
    return float(h * np.sum(u * u / dplus))


def energy_bound(phi_energy: float, forcing_energy_max: float, T: float) -> float:
    """``e^{2T} (||phi||^2 + 2T max ||f||^2)`` in the weighted norm."""
    return float(np.exp(2.0 * T) * (phi_energy + 2.0 * T * forcing_energy_max))


def enforce_conditions(problem, assert_shape=None) -> list:
    reports = check_problem(problem, assert_shape=assert_shape)
    failed = [r for r in reports if not r.satisfied]
    if failed:
        detail = "; ".join(f"{r.condition_id}: lhs={r.lhs_value:.4g} {r.notes}".strip() for r in failed)
        raise ConditionViolation(f"stability condition not satisfied for {problem.label}: {detail}", reports)
    return reports


def solve_1d(problem: ProblemSpec, m: int, n_steps: int, options: Optional[SolveOptions] = None) -> SolveResult:
    """March ``(I - nu A) u^{n+1} = (I + nu A) u^n + tau f^{n+1/2}`` to ``t = T``.

    ``nu = tau / (2 h^alpha)``, zero boundary values, ``u^0`` the initial
    data at the interior nodes, forcing sampled at ``t_{n+1/2}``.
    """
    options = options or SolveOptions()
    start = time.perf_counter()
    diagnostics: dict = {}
    if options.require_condition:
        diagnostics["conditions"] = [r.to_dict() for r in enforce_conditions(problem, options.assert_shape)]

    grid = Grid1D(problem.x_left, problem.x_right, m)
    x, h = grid.nodes, grid.h
    tau = problem.T / n_steps
    alpha = problem.alpha
    dplus = np.broadcast_to(problem.dplus(x), x.shape).astype(float)
    dminus = np.broadcast_to(problem.dminus(x), x.shape).astype(float)
    op = assemble_A(dplus, dminus, alpha, m)
    nu = tau / (2.0 * h**alpha)
    solver = ShiftedSolver(op, nu, options)

    keep = set(options.snapshot_steps) if options.snapshot_steps is not None else set()
    snapshots = []
    u = problem.initial_at(x).astype(float)
    if 0 in keep:
        snapshots.append((0, u.copy()))
    if options.observer is not None:
        options.observer(0, 0.0, u)

    weight = dplus if options.energy_weight == "dplus" else dminus
    if options.energy_check:
        phi_energy = stability_functional(u, weight, h)
        f_max = 0.0
        violations = 0
        energies = [phi_energy]

    for n in range(n_steps):
        f_half = problem.forcing_at(x, (n + 0.5) * tau)
        rhs = u + nu * op.apply(u) + tau * f_half
        u = solver.solve(rhs, step=n)
        if options.energy_check:
            f_max = max(f_max, stability_functional(f_half, weight, h))
            e = stability_functional(u, weight, h)
            energies.append(e)
            if e > energy_bound(phi_energy, f_max, problem.T) * (1 + 1e-12):
                violations += 1
        if n + 1 in keep:
            snapshots.append((n + 1, u.copy()))
        if options.observer is not None:
            options.observer(n + 1, (n + 1) * tau, u)

    if options.energy_check:
        diagnostics["energy"] = energies
        diagnostics["energy_bound"] = energy_bound(phi_energy, f_max, problem.T)
        diagnostics["energy_violations"] = violations
    diagnostics["linear_solver"] = solver.method
    return SolveResult(
        u_final=u,
        snapshots=snapshots,
        linear_solve_stats=solver.stats,
        wall_time=time.perf_counter() - start,
        diagnostics=diagnostics,
    )
