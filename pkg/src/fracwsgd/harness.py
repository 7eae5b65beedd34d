"""Error metrics, convergence studies and table emission."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .problems import ProblemSpec, ProblemSpec2D, get_problem
from .solver1d import Grid1D, LinearSolveError, SolveOptions, solve_1d
from .solver2d import make_grid, solve_2d_adi

CSV_HEADER = ("step", "E2", "rate", "cpu_seconds")


class E2Accumulator:
    """Streaming ``max_n sqrt(cell * sum e^2)``; pass ``update`` as a solver observer."""

    def __init__(self, exact, nodes: tuple, cell: float):
        self.exact = exact
        self.nodes = nodes
        self.cell = float(cell)
        self.value = 0.0
        self.steps_seen = 0

    def update(self, n: int, t: float, u: np.ndarray) -> None:
        err = np.asarray(u, dtype=float) - self.exact(*self.nodes, t)
        norm = math.sqrt(self.cell * float(np.sum(err * err)))
        if not math.isfinite(norm):
            norm = math.inf
        self.value = max(self.value, norm)
        self.steps_seen += 1

    __call__ = update


def error_E2(snapshots, exact, grid, times) -> float:
    """Maximum over the listed time levels of the discrete L2 error.

    ``snapshots`` is a sequence of arrays aligned with ``times``; ``grid`` is
    a :class:`Grid1D` or :class:`Grid2D`. ``exact`` is called as
    ``exact(x, t)`` or ``exact(X, Y, t)``.
    """
    if exact is None:
        raise ValueError("no exact solution available for the error metric")
    snapshots = list(snapshots)
    times = list(times)
    if len(snapshots) != len(times):
        raise ValueError("need one time per snapshot")
    if isinstance(grid, Grid1D):
        acc = E2Accumulator(exact, (grid.nodes,), grid.h)
    else:
        acc = E2Accumulator(exact, grid.mesh(), grid.cell_area)
    for n, (u, t) in enumerate(zip(snapshots, times)):
        acc.update(n, t, u)
    return acc.value


@dataclass
class ConvergenceRow:
    step: float
    e2: float
    rate: Optional[float] = None
    cpu_seconds: float = 0.0
    note: str = ""


@dataclass
class ConvergenceTable:
    study_kind: str  # "spatial" | "temporal"
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.study_kind not in ("spatial", "temporal"):
            raise ValueError(f"study_kind must be spatial or temporal, got {self.study_kind!r}")

    @property
    def e2(self) -> list:
        return [r.e2 for r in self.rows]

    @property
    def rates(self) -> list:
        return [r.rate for r in self.rows]

    def recompute_rates(self) -> None:
        prev = None
        for row in self.rows:
            row.rate = convergence_rate(prev, row.e2) if prev is not None else None
            prev = row.e2


def convergence_rate(e_coarse: float, e_fine: float) -> Optional[float]:
    """``log2(E(coarse) / E(fine))``; ``None`` when either error is unusable."""
    if not (math.isfinite(e_coarse) and math.isfinite(e_fine)) or e_coarse <= 0 or e_fine <= 0:
        return None
    return math.log2(e_coarse / e_fine)


def _resolve(problem) -> Union[ProblemSpec, ProblemSpec2D]:
    return get_problem(problem) if isinstance(problem, str) else problem


def _count(length: float, step: float, what: str) -> int:
    n = round(length / step)
    if n < 1 or abs(n * step - length) > 1e-9 * length:
        raise ValueError(f"{what} {step!r} does not divide {length!r}")
    return int(n)


def run_single(problem, m: int, n_steps: int, options: Optional[SolveOptions] = None, m2: Optional[int] = None):
    """Run one solve and return ``(E2, wall_seconds)``."""
    options = options or SolveOptions()
    if not problem.has_exact:
        raise ValueError(f"problem {problem.label!r} has no exact solution")
    tau = problem.T / n_steps
    if isinstance(problem, ProblemSpec2D):
        grid = make_grid(problem, m, m if m2 is None else m2)
        acc = E2Accumulator(problem.exact, grid.mesh(), grid.cell_area)
        start = time.perf_counter()
        solve_2d_adi(problem, grid.x.m, grid.y.m, n_steps, replace(options, observer=acc))
    else:
        grid = Grid1D(problem.x_left, problem.x_right, m)
        acc = E2Accumulator(problem.exact, (grid.nodes,), grid.h)
        start = time.perf_counter()
        solve_1d(problem, m, n_steps, replace(options, observer=acc))
    elapsed = time.perf_counter() - start
    if acc.steps_seen != n_steps + 1:
        raise RuntimeError(f"observer saw {acc.steps_seen} of {n_steps + 1} time levels (tau={tau})")
    return acc.value, elapsed


def run_convergence(
    problem,
    study_kind: str,
    steps: Sequence[float],
    fixed: float,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    options: Optional[SolveOptions] = None,
) -> ConvergenceTable:
    """Solve once per step and tabulate E2 with successive-halving rates.

    For a spatial study ``steps`` are mesh widths and ``fixed`` is the time
    step; for a temporal study the roles swap. Solver failures are recorded
    in the row's ``note`` with ``E2 = nan`` instead of aborting the table.
    """
    problem = _resolve(problem)
    if isinstance(problem, ProblemSpec2D):
        problem = problem.with_orders(
            problem.alpha if alpha is None else alpha, problem.beta if beta is None else beta
        )
    elif alpha is not None:
        problem = problem.with_alpha(alpha)
    table = ConvergenceTable(study_kind)
    table.metadata = {
        "problem": problem.label,
        "alpha": problem.alpha,
        "fixed_step": fixed,
    }
    if isinstance(problem, ProblemSpec2D):
        table.metadata["beta"] = problem.beta
    length = problem.x_right - problem.x_left
    for step in steps:
        h, tau = (step, fixed) if study_kind == "spatial" else (fixed, step)
        m = _count(length, h, "mesh width")
        n_steps = _count(problem.T, tau, "time step")
        try:
            e2, elapsed = run_single(problem, m, n_steps, options)
            note = ""
            if not math.isfinite(e2):
                note = "non-finite solution"
        except (LinearSolveError, FloatingPointError, np.linalg.LinAlgError) as exc:
            e2, elapsed, note = math.nan, 0.0, f"{type(exc).__name__}: {exc}"
        table.rows.append(ConvergenceRow(step=float(step), e2=e2, cpu_seconds=elapsed, note=note))
    table.recompute_rates()
    return table


# --- emission ---


def _sci(value: Optional[float]) -> str:
    if value is None or not math.isfinite(value):
        return "nan" if value is not None else ""
    return f"{value:.4e}"


def _step_label(step: float) -> str:
    inv = 1.0 / step
    return f"1/{round(inv)}" if abs(inv - round(inv)) < 1e-9 * inv else f"{step:g}"


def table_to_csv(table: ConvergenceTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in table.rows:
        writer.writerow(
            [
                repr(float(row.step)),
                repr(float(row.e2)),
                "" if row.rate is None else repr(float(row.rate)),
                repr(float(row.cpu_seconds)),
            ]
        )
    return buf.getvalue()


def table_to_markdown(table: ConvergenceTable, include_cpu: bool = True) -> str:
    step_name = "h" if table.study_kind == "spatial" else "tau"
    rate_name = "Rate1" if table.study_kind == "spatial" else "Rate2"
    meta = ", ".join(f"{k}={v}" for k, v in table.metadata.items())
    header = [step_name, "E2", rate_name] + (["CPU (s)"] if include_cpu else [])
    lines = [f"<!-- {meta} -->", "| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for row in table.rows:
        cells = [_step_label(row.step), _sci(row.e2), "*" if row.rate is None else f"{row.rate:.4f}"]
        if include_cpu:
            cells.append(f"{row.cpu_seconds:.3f}")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def combined_markdown(tables: Sequence[ConvergenceTable], order_key: str = "alpha") -> str:
    """Side-by-side layout: one ``E2 | rate`` column pair per table, shared step column.

    CPU times are omitted so the output is deterministic.
    """
    if not tables:
        raise ValueError("no tables to combine")
    steps = [r.step for r in tables[0].rows]
    for t in tables[1:]:
        if [r.step for r in t.rows] != steps:
            raise ValueError("tables must share the step ladder")
    kind = tables[0].study_kind
    step_name = "h" if kind == "spatial" else "tau"
    rate_name = "Rate1" if kind == "spatial" else "Rate2"
    top = [""] + [f"{order_key}={t.metadata.get(order_key)}" for t in tables for _ in (0, 1)]
    header = [step_name] + [name for _ in tables for name in ("E2", rate_name)]
    lines = [
        "| " + " | ".join(top) + " |",
        "|" + "---|" * len(header),
        "| " + " | ".join(header) + " |",
    ]
    for i, step in enumerate(steps):
        cells = [_step_label(step)]
        for t in tables:
            row = t.rows[i]
            cells += [_sci(row.e2), "*" if row.rate is None else f"{row.rate:.4f}"]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def emit_table(table: ConvergenceTable, fmt: str = "csv", path: Union[str, Path, None] = None) -> str:
    """Render ``table`` as ``csv`` or ``markdown``; write it when ``path`` is given.

    CSV keeps full double precision so stored rates can be recomputed
    exactly from the stored errors. Markdown uses five significant digits.
    """
    if not table.rows:
        raise ValueError("cannot emit an empty table")
    if fmt == "csv":
        text = table_to_csv(table)
    elif fmt in ("markdown", "md"):
        text = table_to_markdown(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write table to {path}: {exc.strerror}") from exc
    return text


def load_table_csv(source: Union[str, Path], study_kind: str = "spatial") -> ConvergenceTable:
    """Read a table written by :func:`emit_table` (``source`` is a path or CSV text)."""
    text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    table = ConvergenceTable(study_kind)
    for step, e2, rate, cpu in reader:
        table.rows.append(
            ConvergenceRow(float(step), float(e2), None if rate == "" else float(rate), float(cpu))
        )
    return table
