"""Grünwald-Letnikov and WSGD weight sequences for the shift pair (1, 0)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Constant of the zero-sum tail bound ``eps(n) = TAIL_CONSTANT * n**-alpha``.
#: Direct summation gives sup_alpha |sum w_k| n**alpha ~= 0.2821 at n = 10**6,
#: but 0.655 at n = 2 and exactly 1 at n = 1, alpha = 2; 1.0 covers every n >= 1.
TAIL_CONSTANT = 1.0


def _check_order(alpha: float) -> None:
    if not (1.0 < alpha <= 2.0):
        raise ValueError(f"order alpha must lie in (1, 2], got {alpha!r}")


def grunwald_weights(alpha: float, n: int) -> np.ndarray:
    """Return ``g_0 .. g_n``, the power-series coefficients of ``(1 - z)**alpha``.

    Evaluated by the recursion ``g_k = (1 - (alpha + 1)/k) g_{k-1}``, with the
    factor written as ``(k - 1 - alpha)/k`` so that it carries no cancellation
    error when ``alpha`` is close to 2.
    """
    _check_order(alpha)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    k = np.arange(1, n + 1, dtype=float)
    return np.concatenate([[1.0], np.cumprod((k - 1.0 - alpha) / k)])


@dataclass(frozen=True)
class WsgdWeights:
    """Grünwald weights ``g`` and their weighted-shifted combination ``w``."""

    alpha: float
    g: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.g.setflags(write=False)
        self.w.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.w) - 1


def wsgd_weights(alpha: float, n: int) -> WsgdWeights:
    """WSGD weights ``w_0 .. w_n``.

    ``w_0 = alpha/2`` and ``w_k = (alpha/2) g_k + ((2 - alpha)/2) g_{k-1}``.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    g = grunwald_weights(alpha, n)
    w = np.empty(n + 1)
    w[0] = 0.5 * alpha * g[0]
    w[1:] = 0.5 * alpha * g[1:] + 0.5 * (2.0 - alpha) * g[:-1]
    return WsgdWeights(alpha=float(alpha), g=g, w=w)


def tail_bound(alpha: float, n: int) -> float:
    """Upper bound on ``|sum_{k<=n} w_k|``; the infinite sum is exactly zero."""
    return TAIL_CONSTANT * float(n) ** (-alpha)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    detail: str = ""


def verify_weight_properties(weights: WsgdWeights, rtol: float = 1e-12) -> list[PropertyCheck]:
    """Check the standard structural properties of the WSGD weights.

    Every check is reported; nothing raises. At ``alpha = 2`` the stencil is
    ``[1, -2, 1, 0, ...]`` whose partial sums vanish from ``m = 2`` on, so the
    strict negativity of partial sums is relaxed to ``<= 0`` there.
    """
    a, w, n = weights.alpha, weights.w, weights.n
    checks = []

    checks.append(PropertyCheck("w0 == alpha/2", bool(w[0] == 0.5 * a), f"w0={w[0]!r}"))
    checks.append(PropertyCheck("w1 < 0", bool(w[1] < 0), f"w1={w[1]!r}"))

    if n >= 2:
        w2 = a * (a * a + a - 4.0) / 4.0
        ok = abs(w[2] - w2) <= rtol * max(1.0, abs(w2))
        checks.append(PropertyCheck("w2 closed form", bool(ok), f"w2={w[2]!r} expected {w2!r}"))

    if n >= 3:
        tail = w[3:]
        chain = np.concatenate([[1.0, w[0]], tail])
        diffs = np.diff(chain)
        ok = bool(np.all(diffs <= 0.0) and tail[-1] >= 0.0)
        worst = float(diffs.max()) if len(diffs) else 0.0
        checks.append(PropertyCheck("1 >= w0 >= w3 >= w4 >= ... >= 0", ok, f"max increase {worst:.3e}"))

    if n >= 2:
        partial = np.cumsum(w)[2:]
        ok = bool(np.all(partial < 0.0)) if a < 2.0 else bool(np.all(partial <= 0.0))
        checks.append(PropertyCheck("partial sums < 0 for m >= 2", ok, f"max partial sum {partial.max():.3e}"))

    total = float(np.sum(w))
    eps = tail_bound(a, n)
    checks.append(PropertyCheck("|sum w_k| <= eps(n)", abs(total) <= eps, f"sum={total:.3e}, eps={eps:.3e}"))
    return checks
