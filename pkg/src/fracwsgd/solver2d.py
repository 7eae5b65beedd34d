"""ADI Crank-Nicolson scheme for the 2D problem on a rectangle.

Fields are stored as arrays of shape ``(ny, nx)`` (interior nodes only), so a
C-order ravel runs over ``x`` fastest, matching the Kronecker ordering
``u = [u_11, u_21, ..., u_{M1-1,1}, u_12, ...]``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .operators import assemble_A
from .problems import ProblemSpec2D
from .solver1d import Grid1D, SolveOptions, SolveResult, enforce_conditions

CN_REFERENCE_MAX_UNKNOWNS = 961


@dataclass(frozen=True)
class Grid2D:
    x: Grid1D
    y: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.y.m - 1, self.x.m - 1)

    def mesh(self):
        """Broadcastable ``(X, Y)`` of shapes ``(1, nx)`` and ``(ny, 1)``."""
        return self.x.nodes[None, :], self.y.nodes[:, None]

    @property
    def cell_area(self) -> float:
        return self.x.h * self.y.h


@dataclass(frozen=True)
class Field2D:
    values: np.ndarray  # (ny, nx)

    def to_vector(self) -> np.ndarray:
        return np.ascontiguousarray(self.values).ravel()

    @classmethod
    def from_vector(cls, vec, nx: int, ny: int) -> "Field2D":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (nx * ny,):
            raise ValueError(f"expected {nx * ny} entries, got {vec.shape}")
        return cls(vec.reshape(ny, nx).copy())


def direction_matrix(dplus, dminus, order: float, m: int, h: float) -> np.ndarray:
    """Dense ``(D+ W + D- W^T) / h^order`` for one coordinate direction."""
    return assemble_A(dplus, dminus, order, m).dense() / h**order


class ADIStepper:
    """Holds both directional factors for one run: ``I +- tau/2 B_x`` and ``I +- tau/2 B_y``.

    The implicit factors are LU-factored once at construction.
    """

    def __init__(self, bx: np.ndarray, by: np.ndarray, tau: float):
        self.tau = float(tau)
        self.bx, self.by = bx, by
        self.nx, self.ny = bx.shape[0], by.shape[0]
        ix, iy = np.eye(self.nx), np.eye(self.ny)
        self._plus = {"x": ix + 0.5 * tau * bx, "y": iy + 0.5 * tau * by}
        self._lu = {
            "x": scipy.linalg.lu_factor(ix - 0.5 * tau * bx),
            "y": scipy.linalg.lu_factor(iy - 0.5 * tau * by),
        }

    @classmethod
    def for_problem(cls, problem: ProblemSpec2D, grid: Grid2D, tau: float) -> "ADIStepper":
        x, y = grid.x.nodes, grid.y.nodes
        bx = direction_matrix(
            np.broadcast_to(problem.dplus(x), x.shape), np.broadcast_to(problem.dminus(x), x.shape),
            problem.alpha, grid.x.m, grid.x.h,
        )
        by = direction_matrix(
            np.broadcast_to(problem.eplus(y), y.shape), np.broadcast_to(problem.eminus(y), y.shape),
            problem.beta, grid.y.m, grid.y.h,
        )
        return cls(bx, by, tau)

    def apply_factored_pair(self, u: np.ndarray, direction: str, sign: str) -> np.ndarray:
        """Multiply by ``I + tau/2 B`` (``sign="plus"``) or solve with ``I - tau/2 B`` (``"minus"``).

        ``direction="x"`` acts on every row of the ``(ny, nx)`` field,
        ``"y"`` on every column.
        """
        u = np.asarray(u, dtype=float)
        if u.shape != (self.ny, self.nx):
            raise ValueError(f"field shape {u.shape} does not match ({self.ny}, {self.nx})")
        if direction not in ("x", "y") or sign not in ("plus", "minus"):
            raise ValueError("direction must be 'x'/'y' and sign 'plus'/'minus'")
        if direction == "x":
            if sign == "plus":
                return u @ self._plus["x"].T
            return scipy.linalg.lu_solve(self._lu["x"], u.T).T
        if sign == "plus":
            return self._plus["y"] @ u
        return scipy.linalg.lu_solve(self._lu["y"], u)

    def step(self, u: np.ndarray, forcing_half: np.ndarray) -> np.ndarray:
        r = self.apply_factored_pair(self.apply_factored_pair(u, "y", "plus"), "x", "plus")
        r = r + self.tau * forcing_half
        return self.apply_factored_pair(self.apply_factored_pair(r, "x", "minus"), "y", "minus")


def apply_factored_pair(stepper: ADIStepper, u, direction: str, sign: str) -> np.ndarray:
    return stepper.apply_factored_pair(u, direction, sign)


def make_grid(problem: ProblemSpec2D, m1: int, m2: int) -> Grid2D:
    return Grid2D(Grid1D(problem.x_left, problem.x_right, m1), Grid1D(problem.y_left, problem.y_right, m2))


def solve_2d_adi(
    problem: ProblemSpec2D, m1: int, m2: int, n_steps: int, options: Optional[SolveOptions] = None
) -> SolveResult:
    """``(I - tau/2 A_x)(I - tau/2 A_y) u^{n+1} = (I + tau/2 A_x)(I + tau/2 A_y) u^n + tau f^{n+1/2}``.

    The implicit side is solved as an x-sweep (rows) followed by a y-sweep
    (columns).
    """
    options = options or SolveOptions()
    start = time.perf_counter()
    diagnostics: dict = {}
    if options.require_condition:
        diagnostics["conditions"] = [r.to_dict() for r in enforce_conditions(problem, options.assert_shape)]
    grid = make_grid(problem, m1, m2)
    tau = problem.T / n_steps
    stepper = ADIStepper.for_problem(problem, grid, tau)
    X, Y = grid.mesh()

    keep = set(options.snapshot_steps) if options.snapshot_steps is not None else set()
    snapshots = []
    u = problem.initial_at(X, Y).astype(float)
    if 0 in keep:
        snapshots.append((0, u.copy()))
    if options.observer is not None:
        options.observer(0, 0.0, u)
    norms = [float(np.sqrt(grid.cell_area * np.sum(u * u)))]
    for n in range(n_steps):
        u = stepper.step(u, problem.forcing_at(X, Y, (n + 0.5) * tau))
        norms.append(float(np.sqrt(grid.cell_area * np.sum(u * u))))
        if n + 1 in keep:
            snapshots.append((n + 1, u.copy()))
        if options.observer is not None:
            options.observer(n + 1, (n + 1) * tau, u)
    diagnostics["l2_norms"] = norms
    diagnostics["linear_solver"] = "dense-sweeps"
    return SolveResult(
        u_final=u, snapshots=snapshots, wall_time=time.perf_counter() - start, diagnostics=diagnostics
    )


def kron_operators(problem: ProblemSpec2D, m1: int, m2: int):
    """Explicit ``A_x = I (x) B_x`` and ``A_y = B_y (x) I`` on the vectorised field."""
    grid = make_grid(problem, m1, m2)
    nx, ny = grid.x.m - 1, grid.y.m - 1
    if nx * ny > CN_REFERENCE_MAX_UNKNOWNS:
        raise ValueError(f"explicit Kronecker operators capped at {CN_REFERENCE_MAX_UNKNOWNS} unknowns")
    x, y = grid.x.nodes, grid.y.nodes
    stepper_parts = ADIStepper.for_problem(problem, grid, 0.0)
    bx, by = stepper_parts.bx, stepper_parts.by
    return np.kron(np.eye(ny), bx), np.kron(by, np.eye(nx))


def solve_2d_cn_dense(problem: ProblemSpec2D, m1: int, m2: int, n_steps: int) -> np.ndarray:
    """Unsplit Crank-Nicolson reference (desk-scale only); returns the final field."""
    ax, ay = kron_operators(problem, m1, m2)
    grid = make_grid(problem, m1, m2)
    tau = problem.T / n_steps
    a = ax + ay
    eye = np.eye(a.shape[0])
    lu = scipy.linalg.lu_factor(eye - 0.5 * tau * a)
    plus = eye + 0.5 * tau * a
    X, Y = grid.mesh()
    u = problem.initial_at(X, Y).astype(float).ravel()
    for n in range(n_steps):
        f = problem.forcing_at(X, Y, (n + 0.5) * tau).ravel()
        u = scipy.linalg.lu_solve(lu, plus @ u + tau * f)
    return u.reshape(grid.shape)

