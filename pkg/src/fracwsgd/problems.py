"""Manufactured polynomial solutions and the registry of built-in test problems."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .expr import compile_expression


def gamma_real(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise ValueError(f"gamma_real needs a positive argument, got {x!r}")
    return math.gamma(x)


def _rgamma(x: float) -> float:
    # 1/Gamma, zero at the poles 0, -1, -2, ...
    if x <= 0 and float(x).is_integer():
        return 0.0
    return 1.0 / math.gamma(x)


def rl_derivative_monomial(k: int, alpha: float, side: str, x, x_left: float, x_right: float):
    """Riemann-Liouville derivative of order ``alpha`` of a shifted monomial.

    ``side="left"`` differentiates ``(x - x_left)**k`` from the left end,
    ``side="right"`` differentiates ``(x_right - x)**k`` from the right end;
    both give ``Gamma(k+1)/Gamma(k+1-alpha) * s**(k-alpha)`` with ``s`` the
    distance to that end.
    """
    if k < 0:
        raise ValueError(f"monomial degree must be nonnegative, got {k}")
    if side == "left":
        s = np.asarray(x, dtype=float) - x_left
    elif side == "right":
        s = x_right - np.asarray(x, dtype=float)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    c = math.factorial(k) * _rgamma(k + 1 - alpha)
    if c == 0.0:
        return np.zeros_like(s) if np.ndim(s) else 0.0
    return c * s ** (k - alpha)


@dataclass(frozen=True)
class PolynomialSolution:
    """``scale * t**time_power * sum_k left_coeffs[k] (x - x_left)**k``.

    The same spatial polynomial is cached in the right-shifted basis
    ``sum_k right_coeffs[k] (x_right - x)**k`` for right-sided derivatives.
    """

    left_coeffs: tuple
    x_left: float
    x_right: float
    time_power: float = 0.0
    scale: float = 1.0
    right_coeffs: tuple = field(init=False)

    def __post_init__(self):
        c = [float(v) for v in self.left_coeffs]
        length = self.x_right - self.x_left
        # (x - xL) = L - (xR - x): binomial re-expansion
        right = [0.0] * len(c)
        for k, ck in enumerate(c):
            for j in range(k + 1):
                right[j] += ck * math.comb(k, j) * length ** (k - j) * (-1.0) ** j
        object.__setattr__(self, "left_coeffs", tuple(c))
        object.__setattr__(self, "right_coeffs", tuple(right))

    def spatial(self, x):
        s = np.asarray(x, dtype=float) - self.x_left
        return sum(ck * s**k for k, ck in enumerate(self.left_coeffs))

    def spatial_right(self, x):
        s = self.x_right - np.asarray(x, dtype=float)
        return sum(ck * s**k for k, ck in enumerate(self.right_coeffs))

    def time_factor(self, t):
        return self.scale * t**self.time_power

    def time_factor_derivative(self, t):
        if self.time_power == 0:
            return 0.0 * t
        return self.scale * self.time_power * t ** (self.time_power - 1)

    def __call__(self, x, t):
        return self.time_factor(t) * self.spatial(x)

    def left_rl(self, x, alpha: float):
        """Left RL derivative of the spatial part (needs zero boundary data)."""
        return sum(
            ck * rl_derivative_monomial(k, alpha, "left", x, self.x_left, self.x_right)
            for k, ck in enumerate(self.left_coeffs)
            if ck != 0.0
        )

    def right_rl(self, x, alpha: float):
        return sum(
            ck * rl_derivative_monomial(k, alpha, "right", x, self.x_left, self.x_right)
            for k, ck in enumerate(self.right_coeffs)
            if ck != 0.0
        )

    def expansion_mismatch(self, n: int = 10) -> float:
        x = np.linspace(self.x_left, self.x_right, n)
        scale = max(1.0, float(np.max(np.abs(self.spatial(x)))))
        return float(np.max(np.abs(self.spatial(x) - self.spatial_right(x)))) / scale


@dataclass(frozen=True)
class TensorPolynomialSolution:
    """``scale * t**time_power * X(x) * Y(y)`` with polynomial factors."""

    x_part: PolynomialSolution
    y_part: PolynomialSolution
    time_power: float = 0.0
    scale: float = 1.0

    def spatial(self, x, y):
        return self.x_part.spatial(x) * self.y_part.spatial(y)

    def time_factor(self, t):
        return self.scale * t**self.time_power

    def time_factor_derivative(self, t):
        if self.time_power == 0:
            return 0.0 * t
        return self.scale * self.time_power * t ** (self.time_power - 1)

    def __call__(self, x, y, t):
        return self.time_factor(t) * self.spatial(x, y)


def manufacture_forcing(sol: PolynomialSolution, dplus: Callable, dminus: Callable, alpha: float) -> Callable:
    """``f = u_t - d+ * (left RL of u) - d- * (right RL of u)`` in closed form."""

    def forcing(x, t):
        x = np.asarray(x, dtype=float)
        space = dplus(x) * sol.left_rl(x, alpha) + dminus(x) * sol.right_rl(x, alpha)
        return sol.time_factor_derivative(t) * sol.spatial(x) - sol.time_factor(t) * space

    return forcing


def manufacture_forcing_2d(
    sol: TensorPolynomialSolution,
    dplus: Callable,
    dminus: Callable,
    eplus: Callable,
    eminus: Callable,
    alpha: float,
    beta: float,
) -> Callable:
    px, py = sol.x_part, sol.y_part

    def forcing(x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        fx = dplus(x) * px.left_rl(x, alpha) + dminus(x) * px.right_rl(x, alpha)
        fy = eplus(y) * py.left_rl(y, beta) + eminus(y) * py.right_rl(y, beta)
        space = fx * py.spatial(y) + px.spatial(x) * fy
        return sol.time_factor_derivative(t) * sol.spatial(x, y) - sol.time_factor(t) * space

    return forcing


@dataclass(frozen=True)
class ProblemSpec:
    """1D problem ``u_t = d+ D_left^alpha u + d- D_right^alpha u + f`` with zero boundary values.

    When ``forcing`` is omitted it is manufactured from ``solution``; when
    ``initial`` is omitted it is the solution at ``t = 0`` (or zero).
    """

    label: str
    x_left: float
    x_right: float
    alpha: float
    dplus: Callable
    dminus: Callable
    T: float = 1.0
    solution: Optional[PolynomialSolution] = None
    forcing: Optional[Callable] = None
    initial: Optional[Callable] = None

    def __post_init__(self):
        if not (1.0 < self.alpha < 2.0):
            raise ValueError(f"alpha must lie in (1, 2), got {self.alpha}")
        if self.x_right <= self.x_left:
            raise ValueError("empty domain")

    def with_alpha(self, alpha: float) -> "ProblemSpec":
        return dataclasses.replace(self, alpha=alpha)

    @property
    def has_exact(self) -> bool:
        return self.solution is not None

    def exact(self, x, t):
        if self.solution is None:
            raise ValueError(f"problem {self.label!r} has no exact solution")
        return self.solution(x, t)

    def forcing_at(self, x, t):
        if self.forcing is not None:
            return np.broadcast_to(self.forcing(x, t), np.shape(x)).astype(float)
        if self.solution is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return manufacture_forcing(self.solution, self.dplus, self.dminus, self.alpha)(x, t)

    def initial_at(self, x):
        if self.initial is not None:
            return np.broadcast_to(self.initial(x), np.shape(x)).astype(float)
        if self.solution is not None:
            return self.solution(x, 0.0)
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ProblemSpec2D:
    label: str
    x_left: float
    x_right: float
    y_left: float
    y_right: float
    alpha: float
    beta: float
    dplus: Callable
    dminus: Callable
    eplus: Callable
    eminus: Callable
    T: float = 1.0
    solution: Optional[TensorPolynomialSolution] = None
    forcing: Optional[Callable] = None
    initial: Optional[Callable] = None

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not (1.0 < value < 2.0):
                raise ValueError(f"{name} must lie in (1, 2), got {value}")

    def with_orders(self, alpha: float, beta: float) -> "ProblemSpec2D":
        return dataclasses.replace(self, alpha=alpha, beta=beta)

    @property
    def has_exact(self) -> bool:
        return self.solution is not None

    def exact(self, x, y, t):
        if self.solution is None:
            raise ValueError(f"problem {self.label!r} has no exact solution")
        return self.solution(x, y, t)

    def forcing_at(self, x, y, t):
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        if self.forcing is not None:
            return np.broadcast_to(self.forcing(x, y, t), shape).astype(float)
        if self.solution is None:
            return np.zeros(shape)
        f = manufacture_forcing_2d(
            self.solution, self.dplus, self.dminus, self.eplus, self.eminus, self.alpha, self.beta
        )
        return f(x, y, t)

    def initial_at(self, x, y):
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        if self.initial is not None:
            return np.broadcast_to(self.initial(x, y), shape).astype(float)
        if self.solution is not None:
            return np.broadcast_to(self.solution(x, y, 0.0), shape).astype(float)
        return np.zeros(shape)


@dataclass(frozen=True)
class RemarkMatrices:
    """Diagonal coefficient data for the small counterexample with an unstable eigenvalue."""

    dplus: tuple
    dminus: tuple
    alpha: float
    m: int
    expected_real_parts: tuple


# --- registry ---

_U1D = (0.0, 0.0, 0.0, 64.0, -192.0, 192.0, -64.0)  # 2^6 x^3 (1-x)^3
_U2D = (0.0, 0.0, 0.0, 0.0, 16.0, -32.0, 24.0, -8.0, 1.0)  # x^4 (2-x)^4


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _hat_small(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < 1 / 3, x / 10, np.where(x <= 2 / 3, 1 / 15, -x / 10 + 1 / 10))


def _hat_tall(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < 1 / 3, 2 * x, np.where(x <= 2 / 3, 20.0, -2 * x + 2))


def _unit_interval(label: str, alpha: float, dplus: Callable, dminus: Callable) -> ProblemSpec:
    sol = PolynomialSolution(_U1D, 0.0, 1.0, time_power=3)
    return ProblemSpec(label, 0.0, 1.0, alpha, dplus, dminus, T=1.0, solution=sol)


def builtin_problems() -> dict:
    """Label -> problem. Each entry carries its default order(s); use
    ``with_alpha`` / ``with_orders`` to vary them."""
    pi = np.pi
    sol2 = TensorPolynomialSolution(
        PolynomialSolution(_U2D, 0.0, 2.0), PolynomialSolution(_U2D, 0.0, 2.0), time_power=3
    )
    return {
        "ex5.1": _unit_interval("ex5.1", 1.5, lambda x: (x + 2.0) ** 2, lambda x: 5.0 * (x + 2.0) ** 3),
        "ex5.2": _unit_interval(
            "ex5.2", 1.5, lambda x: np.cos(pi / 12 * (x + 2.0)), lambda x: 0.5 * (x - 0.5) ** 2
        ),
        "ex5.3": ProblemSpec2D(
            "ex5.3", 0.0, 2.0, 0.0, 2.0, 1.3, 1.5,
            dplus=lambda x: np.cos(pi / 24 * (x + 4.0)),
            dminus=lambda x: np.sin(pi / 24 * (x + 4.0)),
            eplus=lambda y: np.sin(pi / 12 * (y + 6.0)),
            eminus=lambda y: (y - 1.0) ** 2 / 8.0,
            T=1.0,
            solution=sol2,
        ),
        "ex5.4": _unit_interval("ex5.4", 1.005, lambda x: -10000.0 * x * (1.0 - x) + 2500.0, _one),
        "ex5.5": _unit_interval(
            "ex5.5", 1.005, lambda x: np.cos(35 * pi * x) + 1.01, lambda x: np.sin(35 * pi * x) + 1.01
        ),
        "ex5.6": _unit_interval("ex5.6", 1.07, _hat_small, _one),
        "ex5.7": _unit_interval("ex5.7", 1.01, _hat_tall, _one),
        "remark2.1": RemarkMatrices(
            dplus=(3.0, 0.5, math.sqrt(3.0)),
            dminus=(1.0, 1.0, math.sqrt(3.0)),
            alpha=1.1,
            m=4,
            expected_real_parts=(0.1801, -1.0706, -0.499),
        ),
    }


def get_problem(label: str):
    registry = builtin_problems()
    try:
        return registry[label]
    except KeyError:
        raise KeyError(f"unknown problem {label!r}; known: {', '.join(sorted(registry))}") from None


# --- JSON configs ---


def load_problem_config(source: Union[str, Path, dict]) -> Union[ProblemSpec, ProblemSpec2D]:
    """Build a problem from a JSON file (or an already-parsed dict).

    1D keys: ``label``, ``domain: [xL, xR]``, ``alpha``, ``dplus``, ``dminus``
    (expressions in ``x``), optional ``T``, ``forcing`` (in ``x, t``),
    ``initial`` (in ``x``) and ``solution: {coeffs, time_power, scale}`` with
    coefficients of powers of ``(x - xL)``.

    2D configs set ``dim: 2``, ``domain: [[xL, xR], [yL, yR]]``, ``beta``,
    ``eplus``/``eminus`` (in ``y``), and ``solution: {x_coeffs, y_coeffs,
    time_power, scale}``; ``forcing`` is in ``x, y, t``.
    """
    if isinstance(source, dict):
        cfg = source
    else:
        cfg = json.loads(Path(source).read_text())
    dim = int(cfg.get("dim", 1))
    label = str(cfg.get("label", "config"))
    T = float(cfg.get("T", 1.0))
    sol_cfg = cfg.get("solution")

    if dim == 1:
        x_left, x_right = (float(v) for v in cfg["domain"])
        solution = None
        if sol_cfg is not None:
            solution = PolynomialSolution(
                tuple(sol_cfg["coeffs"]), x_left, x_right,
                time_power=float(sol_cfg.get("time_power", 0.0)),
                scale=float(sol_cfg.get("scale", 1.0)),
            )
        return ProblemSpec(
            label, x_left, x_right, float(cfg["alpha"]),
            dplus=compile_expression(str(cfg["dplus"]), ("x",)),
            dminus=compile_expression(str(cfg["dminus"]), ("x",)),
            T=T,
            solution=solution,
            forcing=compile_expression(cfg["forcing"], ("x", "t")) if "forcing" in cfg else None,
            initial=compile_expression(cfg["initial"], ("x",)) if "initial" in cfg else None,
        )
    if dim == 2:
        (x_left, x_right), (y_left, y_right) = ((float(a), float(b)) for a, b in cfg["domain"])
        solution = None
        if sol_cfg is not None:
            solution = TensorPolynomialSolution(
                PolynomialSolution(tuple(sol_cfg["x_coeffs"]), x_left, x_right),
                PolynomialSolution(tuple(sol_cfg["y_coeffs"]), y_left, y_right),
                time_power=float(sol_cfg.get("time_power", 0.0)),
                scale=float(sol_cfg.get("scale", 1.0)),
            )
        return ProblemSpec2D(
            label, x_left, x_right, y_left, y_right, float(cfg["alpha"]), float(cfg["beta"]),
            dplus=compile_expression(str(cfg["dplus"]), ("x",)),
            dminus=compile_expression(str(cfg["dminus"]), ("x",)),
            eplus=compile_expression(str(cfg["eplus"]), ("y",)),
            eminus=compile_expression(str(cfg["eminus"]), ("y",)),
            T=T,
            solution=solution,
            forcing=compile_expression(cfg["forcing"], ("x", "y", "t")) if "forcing" in cfg else None,
            initial=compile_expression(cfg["initial"], ("x", "y")) if "initial" in cfg else None,
        )
    raise ValueError(f"dim must be 1 or 2, got {dim}")
