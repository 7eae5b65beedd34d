"""Coefficient shape classification and the sufficient stability conditions.

Three checks are provided:

* ``cond-12``: ratio condition ``1 + k - sqrt(2) (k_max - k_min) / sigma >= 0``
  on ``d-/d+`` (or ``d+/d-``);
* ``cond-24``: sum condition on ``d+`` and ``d-`` with order ``alpha``;
* ``cond-28``: the same sum condition on ``e+`` and ``e-`` with order ``beta``.

Each condition only applies when the relevant coefficients are convex or
concave; otherwise the verdict is "not satisfied" with an explanatory note.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .spectral import sigma_alpha


class Shape(str, enum.Enum):
    CONVEX = "convex"
    CONCAVE = "concave"
    NEITHER = "neither"
    ASSERTED_CONVEX = "user-asserted-convex"
    ASSERTED_CONCAVE = "user-asserted-concave"

    @property
    def is_convex(self) -> bool:
        return self in (Shape.CONVEX, Shape.ASSERTED_CONVEX)

    @property
    def is_concave(self) -> bool:
        return self in (Shape.CONCAVE, Shape.ASSERTED_CONCAVE)


def _asserted(shape) -> Optional[Shape]:
    if shape is None:
        return None
    if isinstance(shape, Shape):
        return shape
    shape = str(shape).lower()
    if shape in ("convex", "user-asserted-convex"):
        return Shape.ASSERTED_CONVEX
    if shape in ("concave", "user-asserted-concave"):
        return Shape.ASSERTED_CONCAVE
    raise ValueError(f"cannot assert shape {shape!r}; use 'convex' or 'concave'")


def _second_differences(samples) -> tuple[np.ndarray, float]:
    d = np.asarray(samples, dtype=float)
    if d.ndim != 1 or len(d) < 3:
        raise ValueError("shape classification needs at least 3 samples")
    return d[:-2] - 2.0 * d[1:-1] + d[2:], float(np.max(np.abs(d)))


def classify_shape(samples, tol: Optional[float] = None) -> Shape:
    """Discrete convexity test on uniformly spaced samples.

    ``tol`` defaults to ``1e-10 * max|d|``. Affine data counts as convex.
    """
    dd, scale = _second_differences(samples)
    if tol is None:
        tol = 1e-10 * scale
    if np.all(dd >= -tol):
        return Shape.CONVEX
    if np.all(dd <= tol):
        return Shape.CONCAVE
    return Shape.NEITHER


def _is_affine(samples) -> bool:
    dd, scale = _second_differences(samples)
    return bool(np.all(np.abs(dd) <= 1e-10 * scale))


@dataclass(frozen=True)
class CoefficientProfile:
    x: np.ndarray
    d: np.ndarray
    shape: Shape
    min_val: float
    max_val: float

    @classmethod
    def from_samples(cls, x, d, assert_shape=None) -> "CoefficientProfile":
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        if x.shape != d.shape:
            raise ValueError("x and d must have the same shape")
        shape = _asserted(assert_shape) or classify_shape(d)
        return cls(x, d, shape, float(d.min()), float(d.max()))

    @classmethod
    def from_function(cls, func: Callable, x_left: float, x_right: float, n: int = 1024, assert_shape=None):
        """Sample ``func`` on ``n + 1`` uniform points of the closed interval."""
        x = np.linspace(x_left, x_right, n + 1)
        d = np.broadcast_to(np.asarray(func(x), dtype=float), x.shape)
        return cls.from_samples(x, d, assert_shape)

    @property
    def strictly_positive(self) -> bool:
        return self.min_val > 0.0

    @property
    def affine(self) -> bool:
        return _is_affine(self.d)


@dataclass
class ConditionReport:
    condition_id: str
    order: float
    sigma: float
    kappa_min: float
    kappa_max: float
    kappa: float
    lhs_value: float
    satisfied: bool
    ratio_orientation: Optional[str] = None
    shape: Optional[str] = None
    bounds: dict = field(default_factory=dict)
    notes: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=float)

    def format_text(self) -> str:
        rows = [
            ("condition", self.condition_id),
            ("order", f"{self.order:g}"),
            ("sigma", f"{self.sigma:.6g}"),
        ]
        if self.ratio_orientation:
            rows.append(("ratio", self.ratio_orientation))
        if self.shape:
            rows.append(("shape", self.shape))
        if self.bounds:
            rows.extend((k, f"{v:.6g}") for k, v in self.bounds.items())
        else:
            rows.extend(
                [
                    ("kappa_min", f"{self.kappa_min:.6g}"),
                    ("kappa_max", f"{self.kappa_max:.6g}"),
                    ("kappa", f"{self.kappa:.6g}"),
                ]
            )
        rows.append(("lhs", f"{self.lhs_value:.6g}"))
        rows.append(("verdict", "satisfied" if self.satisfied else "NOT satisfied"))
        if self.notes:
            rows.append(("notes", self.notes))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


INAPPLICABLE = "condition framework inapplicable: coefficient is neither convex nor concave"


def _kappa_for(profile: CoefficientProfile) -> Optional[float]:
    # affine data is both convex and concave, so the larger bound is admissible
    if profile.shape in (Shape.CONVEX,) and profile.affine:
        return profile.max_val
    if profile.shape.is_concave:
        return profile.max_val
    if profile.shape.is_convex:
        return profile.min_val
    return None


def _ratio_report(ratio: CoefficientProfile, alpha: float, orientation: str) -> ConditionReport:
    sigma = sigma_alpha(alpha)
    kmin, kmax = ratio.min_val, ratio.max_val
    kappa = _kappa_for(ratio)
    notes = ""
    if kappa is None:
        kappa = kmin
        notes = INAPPLICABLE
    lhs = 1.0 + kappa - math.sqrt(2.0) * (kmax - kmin) / sigma
    return ConditionReport(
        condition_id="cond-12",
        order=alpha,
        sigma=sigma,
        kappa_min=kmin,
        kappa_max=kmax,
        kappa=kappa,
        lhs_value=lhs,
        satisfied=(lhs >= 0.0) and not notes,
        ratio_orientation=orientation,
        shape=ratio.shape.value,
        notes=notes,
    )


def check_condition_ratio(
    dplus: CoefficientProfile, dminus: CoefficientProfile, alpha: float, assert_shape=None
) -> ConditionReport:
    """Evaluate the ratio condition for ``A = D+ W + D- W^T``.

    The ratio ``d-/d+`` is used when ``d+ > 0`` on the grid, ``d+/d-`` when
    ``d- > 0``; if both are positive the more favourable report is returned.
    ``assert_shape`` overrides the grid classification of the ratio.
    """
    if dplus.d.shape != dminus.d.shape:
        raise ValueError("coefficient profiles must share a grid")
    candidates = []
    if dplus.strictly_positive:
        ratio = CoefficientProfile.from_samples(dplus.x, dminus.d / dplus.d, assert_shape)
        candidates.append(_ratio_report(ratio, alpha, "d-/d+"))
    if dminus.strictly_positive:
        ratio = CoefficientProfile.from_samples(dplus.x, dplus.d / dminus.d, assert_shape)
        candidates.append(_ratio_report(ratio, alpha, "d+/d-"))
    if not candidates:
        raise ValueError(
            "neither d+ nor d- is strictly positive on the grid; use check_condition_sum instead"
        )
    return max(candidates, key=lambda r: (r.satisfied, not r.notes, r.lhs_value))


def check_condition_sum(
    dplus: CoefficientProfile,
    dminus: CoefficientProfile,
    order: float,
    sigma: Optional[float] = None,
    condition_id: str = "cond-24",
) -> ConditionReport:
    """Sum condition ``k+ + k- - sqrt(2)(k+max + k-max - k+min - k-min)/sigma > 0``."""
    if dplus.min_val < 0 or dminus.min_val < 0:
        raise ValueError("sum condition requires nonnegative coefficients")
    if sigma is None:
        sigma = sigma_alpha(order)
    kp, km = _kappa_for(dplus), _kappa_for(dminus)
    notes = ""
    if kp is None or km is None:
        notes = INAPPLICABLE
        kp = dplus.min_val if kp is None else kp
        km = dminus.min_val if km is None else km
    spread = dplus.max_val + dminus.max_val - dplus.min_val - dminus.min_val
    lhs = kp + km - math.sqrt(2.0) * spread / sigma
    sym = "chi" if condition_id == "cond-28" else "kappa"
    bounds = {
        f"{sym}+_min": dplus.min_val,
        f"{sym}+_max": dplus.max_val,
        f"{sym}-_min": dminus.min_val,
        f"{sym}-_max": dminus.max_val,
        f"{sym}+": kp,
        f"{sym}-": km,
    }
    return ConditionReport(
        condition_id=condition_id,
        order=order,
        sigma=sigma,
        kappa_min=min(dplus.min_val, dminus.min_val),
        kappa_max=max(dplus.max_val, dminus.max_val),
        kappa=kp + km,
        lhs_value=lhs,
        satisfied=(lhs > 0.0) and not notes,
        shape=f"+:{dplus.shape.value}, -:{dminus.shape.value}",
        bounds=bounds,
        notes=notes,
    )


def check_problem(problem, n: int = 1024, assert_shape=None) -> list[ConditionReport]:
    """Condition reports for a 1D (ratio, falling back to sum) or 2D problem."""
    from .problems import ProblemSpec, ProblemSpec2D

    if isinstance(problem, ProblemSpec):
        dp = CoefficientProfile.from_function(problem.dplus, problem.x_left, problem.x_right, n)
        dm = CoefficientProfile.from_function(problem.dminus, problem.x_left, problem.x_right, n)
        if dp.strictly_positive or dm.strictly_positive:
            return [check_condition_ratio(dp, dm, problem.alpha, assert_shape)]
        return [check_condition_sum(_reassert(dp, assert_shape), _reassert(dm, assert_shape), problem.alpha)]
    if isinstance(problem, ProblemSpec2D):
        dp = CoefficientProfile.from_function(problem.dplus, problem.x_left, problem.x_right, n, assert_shape)
        dm = CoefficientProfile.from_function(problem.dminus, problem.x_left, problem.x_right, n, assert_shape)
        ep = CoefficientProfile.from_function(problem.eplus, problem.y_left, problem.y_right, n, assert_shape)
        em = CoefficientProfile.from_function(problem.eminus, problem.y_left, problem.y_right, n, assert_shape)
        return [
            check_condition_sum(dp, dm, problem.alpha, condition_id="cond-24"),
            check_condition_sum(ep, em, problem.beta, condition_id="cond-28"),
        ]
    raise TypeError(f"cannot check conditions for {type(problem).__name__}")


def _reassert(profile: CoefficientProfile, assert_shape) -> CoefficientProfile:
    if assert_shape is None:
        return profile
    return CoefficientProfile.from_samples(profile.x, profile.d, assert_shape)


@dataclass
class EigenvalueReport:
    eigenvalues: np.ndarray
    unstable: np.ndarray  # indices with positive real part

    @property
    def stable(self) -> bool:
        return len(self.unstable) == 0

    def format_text(self) -> str:
        lines = []
        for i, lam in enumerate(self.eigenvalues):
            flag = "  <- positive real part" if i in self.unstable else ""
            lines.append(f"lambda_{i}  {lam.real:+.6f} {lam.imag:+.6f}i{flag}")
        lines.append("verdict  " + ("all real parts <= 0" if self.stable else "UNSTABLE eigenvalue present"))
        return "\n".join(lines)


def eigenvalue_check(dplus, dminus, alpha: float, m: int, tol: float = 0.0) -> EigenvalueReport:
    """Eigenvalues of the dense ``D+ W + D- W^T`` for explicit nodal coefficients.

    Eigenvalues are sorted by decreasing real part; those with real part
    above ``tol`` are flagged.
    """
    from .operators import assemble_A
    from .spectral import eigenvalues_small

    a = assemble_A(np.asarray(dplus, dtype=float), np.asarray(dminus, dtype=float), alpha, m).dense()
    lam = np.asarray(eigenvalues_small(a), dtype=complex)
    lam = lam[np.argsort(-lam.real, kind="stable")]
    return EigenvalueReport(lam, np.flatnonzero(lam.real > tol))


def normalized_operator_dense(dplus, dminus, alpha: float, orientation: str = "d-/d+") -> np.ndarray:
    """Dense ``D+^{-1} A`` for orientation ``"d-/d+"`` or ``D-^{-1} A`` for ``"d+/d-"``.

    This is the matrix whose symmetric part the ratio condition controls.
    """
    from .operators import assemble_A

    dplus = np.asarray(dplus, dtype=float)
    op = assemble_A(dplus, np.asarray(dminus, dtype=float), alpha, len(dplus) + 1)
    if orientation == "d-/d+":
        return op.normalized_dense("dplus")
    if orientation == "d+/d-":
        return op.normalized_dense("dminus")
    raise ValueError(f"unknown ratio orientation {orientation!r}")
