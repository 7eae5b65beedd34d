"""Generating function of the WSGD Toeplitz matrix and small dense eigensolvers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coeffs import wsgd_weights

JACOBI_MAX_DIM = 2048
QR_MAX_DIM = 512


class ConvergenceError(RuntimeError):
    """An iterative eigensolver hit its iteration cap."""


def _check_open_order(alpha: float) -> None:
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"order must lie in (1, 2), got {alpha!r}")


def generating_function(alpha: float, x):
    r"""Closed form of ``g(alpha, x) = sum_k w_k exp(i (k-1) x)``.

    Equals ``[(alpha/2) e^{-ix} + (2-alpha)/2] (1 - e^{ix})^alpha`` on the
    principal branch. The power is taken in polar form, modulus
    ``(2 sin|x/2|)^alpha`` and argument ``alpha (x - pi)/2`` for ``x >= 0`` or
    ``alpha (x + pi)/2`` for ``x < 0``, which stays clean near ``x = 0``.
    """
    x = np.asarray(x, dtype=float)
    modulus = (2.0 * np.sin(np.abs(x) / 2.0)) ** alpha
    arg = np.where(x >= 0.0, 0.5 * alpha * (x - np.pi), 0.5 * alpha * (x + np.pi))
    power = modulus * np.exp(1j * arg)
    g = (0.5 * alpha * np.exp(-1j * x) + 0.5 * (2.0 - alpha)) * power
    return g if g.ndim else complex(g)


def truncated_series(alpha: float, x, n: int):
    """``sum_{k=0}^n w_k exp(i (k-1) x)``, for checking the closed form."""
    w = wsgd_weights(alpha, n).w
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(n + 1)
    return np.exp(1j * np.outer(x, k - 1)) @ w


def sigma_alpha(alpha: float) -> float:
    """``min_x Re[-g]/|g| = |cos(alpha pi / 2)|``."""
    _check_open_order(alpha)
    return abs(np.cos(0.5 * alpha * np.pi))


def rho_alpha(alpha: float) -> float:
    """Largest ``|Im g / Re g|``, attained as ``x -> 0``."""
    _check_open_order(alpha)
    return float(np.tan(-0.5 * alpha * np.pi))


def _ratio_grid(n_grid: int) -> np.ndarray:
    # uniform grid on [-pi, pi) with x = 0 dropped (g vanishes there)
    x = -np.pi + 2.0 * np.pi * np.arange(n_grid) / n_grid
    return x[x != 0.0]


def sigma_alpha_numeric(alpha: float, n_grid: int = 4096) -> float:
    """Grid minimum of ``Re[-g]/|g|`` over ``(-pi, pi) \\ {0}``."""
    if n_grid < 64:
        raise ValueError("n_grid must be at least 64")
    x = _ratio_grid(n_grid)
    g = generating_function(alpha, x)
    return float(np.min(-g.real / np.abs(g)))


@dataclass(frozen=True)
class GeneratingFunctionProfile:
    alpha: float
    rho: float
    sigma: float
    samples: Optional[tuple] = None  # (x, g) arrays

    def to_rows(self):
        """Rows ``(x, Re g, Im g, Re[-g]/|g|)`` for CSV export."""
        if self.samples is None:
            return []
        x, g = self.samples
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(np.abs(g) > 0, -g.real / np.abs(g), np.nan)
        return list(zip(x.tolist(), g.real.tolist(), g.imag.tolist(), ratio.tolist()))


def generating_function_profile(alpha: float, n_grid: Optional[int] = None) -> GeneratingFunctionProfile:
    samples = None
    if n_grid is not None:
        x = np.linspace(-np.pi, np.pi, n_grid)
        samples = (x, np.atleast_1d(generating_function(alpha, x)))
    return GeneratingFunctionProfile(alpha=alpha, rho=rho_alpha(alpha), sigma=sigma_alpha(alpha), samples=samples)


def _trapezoid_form(u: np.ndarray, v: np.ndarray, alpha: float, n: int) -> complex:
    x = -np.pi + 2.0 * np.pi * np.arange(n) / n
    k = np.arange(1, len(u) + 1)
    # sum_k u_k e^{-ikx} and sum_k v_k e^{ikx} on the grid, via FFT
    pad_u = np.zeros(n)
    pad_v = np.zeros(n)
    pad_u[k] = u
    pad_v[k] = v
    phase = np.exp(1j * np.pi * np.arange(n))  # e^{-ik(-pi)} = (-1)^k shift to start at -pi
    big_u = np.fft.fft(pad_u * phase.real)
    big_v = np.fft.ifft(pad_v * phase.real) * n
    return complex(np.mean(big_u * big_v * generating_function(alpha, x)))


def quadratic_form_integral(u, v, alpha: float, n_quad: Optional[int] = None, extrapolate: bool = True) -> float:
    r"""``(1/2pi) \int (sum u_k e^{-ikx})(sum v_k e^{ikx}) g(alpha, x) dx``.

    Trapezoidal quadrature on ``n_quad`` uniform points. The symbol has an
    ``|x|^alpha`` kink at the origin, so the rule converges like
    ``n_quad**-(alpha + 1)`` rather than spectrally; with ``extrapolate`` a
    Richardson step with that known exponent removes the leading term.
    The real part equals ``u^T W_alpha v``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    size = len(u)
    minimum = 1 << int(np.ceil(np.log2(max(8 * size, 2))))
    if n_quad is None:
        n_quad = max(minimum, 1 << 16)
    elif n_quad < minimum or n_quad & (n_quad - 1):
        raise ValueError(f"n_quad must be a power of two >= {minimum}")
    coarse = _trapezoid_form(u, v, alpha, n_quad)
    if not extrapolate:
        return coarse.real
    fine = _trapezoid_form(u, v, alpha, 2 * n_quad)
    factor = 2.0 ** (alpha + 1.0)
    return ((factor * fine - coarse) / (factor - 1.0)).real


# --- symmetric eigenproblem: cyclic Jacobi in round-robin (parallel) order ---


def _round_robin(n: int) -> list[np.ndarray]:
    """Pairings covering every (p, q), p < q, once per sweep; n-1 (or n) rounds."""
    players = list(range(n if n % 2 == 0 else n + 1))
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        rounds.append(np.array(pairs, dtype=int).reshape(-1, 2))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigenvalues(s, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues (ascending) of a real symmetric matrix by cyclic Jacobi.

    Iterates until the off-diagonal Frobenius norm is at most ``tol * ||s||_F``.
    Rotations within a round act on disjoint index pairs, so each round is
    applied as one vectorised update.
    """
    a = np.array(s, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > JACOBI_MAX_DIM:
        raise ValueError(f"dimension {n} exceeds dense diagnostic cap {JACOBI_MAX_DIM}")
    if n == 1:
        return a.diagonal().copy()
    scale = np.linalg.norm(a)
    target = tol * scale
    rounds = _round_robin(n)

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm():
        return np.linalg.norm(a[off_mask])

    for _ in range(max_sweeps):
        if off_norm() <= target:
            return np.sort(a.diagonal())
        for pairs in rounds:
            p, q = pairs[:, 0], pairs[:, 1]
            apq = a[p, q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            sn = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - sn[:, None] * rq
            a[q, :] = sn[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * sn
            a[:, q] = cp * sn + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
    if off_norm() <= target:
        return np.sort(a.diagonal())
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def symmetric_part(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def symmetric_part_max_eigenvalue(a) -> float:
    """Largest eigenvalue of ``(a + a^T)/2``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    return float(jacobi_eigenvalues(symmetric_part(a), tol=1e-12)[-1])


# --- general eigenproblem: Hessenberg reduction + shifted QR ---


def hessenberg(a) -> np.ndarray:
    """Upper Hessenberg form by Householder reflections (complex copy)."""
    h = np.array(a, dtype=complex, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h


def _givens(a: complex, b: complex):
    r = np.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0, 0.0
    return a / r, b / r


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    tr, det = a + d, a * d - b * c
    disc = np.sqrt(tr * tr / 4.0 - det + 0j)
    mu1, mu2 = tr / 2.0 + disc, tr / 2.0 - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def _qr_eigenvalues(a: np.ndarray, max_iter: int) -> np.ndarray:
    h = hessenberg(a)
    n = h.shape[0]
    eps = np.finfo(float).eps
    hi = n - 1
    its = 0
    total = 0
    while hi > 0:
        # locate the active unreduced block [lo, hi]
        lo = hi
        while lo > 0:
            if abs(h[lo, lo - 1]) <= eps * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1]) + 1e-300):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        if total >= max_iter:
            raise ConvergenceError(f"QR iteration cap {max_iter} reached with {hi + 1} eigenvalues unresolved")
        its += 1
        total += 1
        if its % 11 == 0:
            mu = h[hi, hi] + abs(h[hi, hi - 1]) * (0.75 + 0.5j)
        else:
            mu = _wilkinson_shift(h, hi)
        for i in range(lo, hi + 1):
            h[i, i] -= mu
        rots = []
        for k in range(lo, hi):
            c, s = _givens(h[k, k], h[k + 1, k])
            rk, rk1 = h[k, k:].copy(), h[k + 1, k:].copy()
            h[k, k:] = np.conj(c) * rk + np.conj(s) * rk1
            h[k + 1, k:] = -s * rk + c * rk1
            rots.append((c, s))
        for k, (c, s) in zip(range(lo, hi), rots):
            top = min(k + 2, hi) + 1
            ck, ck1 = h[:top, k].copy(), h[:top, k + 1].copy()
            h[:top, k] = ck * c + ck1 * s
            h[:top, k + 1] = -ck * np.conj(s) + ck1 * np.conj(c)
        for i in range(lo, hi + 1):
            h[i, i] += mu
    return h.diagonal().copy()


def eigenvalues_small(a, vectors: bool = False, max_iter: Optional[int] = None):
    """All eigenvalues of a small real matrix via Hessenberg + shifted QR.

    With ``vectors=True`` also returns a matrix whose columns are unit
    eigenvectors, computed by inverse iteration.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > QR_MAX_DIM:
        raise ValueError(f"dimension {n} exceeds cap {QR_MAX_DIM}")
    if max_iter is None:
        max_iter = 60 * max(n, 1)
    lam = _qr_eigenvalues(a, max_iter) if n > 1 else a.diagonal().astype(complex)
    if not vectors:
        return lam
    return lam, _inverse_iteration(a, lam)


def _inverse_iteration(a: np.ndarray, lam: np.ndarray, steps: int = 3) -> np.ndarray:
    n = a.shape[0]
    scale = max(np.linalg.norm(a), 1.0)
    rng = np.random.default_rng(0)
    vecs = np.empty((n, n), dtype=complex)
    for j, mu in enumerate(lam):
        shifted = a - (mu + 1e-10 * scale) * np.eye(n)
        v = rng.standard_normal(n) + 0j
        for _ in range(steps):
            v = np.linalg.solve(shifted, v)
            v /= np.linalg.norm(v)
        vecs[:, j] = v
    return vecs
