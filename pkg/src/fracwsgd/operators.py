"""Toeplitz WSGD matrix and the variable-coefficient operator ``D+ W + D- W^T``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeffs import wsgd_weights

DENSE_MAX_DIM = 2048


def _embedding_length(size: int) -> int:
    return 1 << int(np.ceil(np.log2(max(2 * size, 2))))


@dataclass(frozen=True)
class ToeplitzOperator:
    """Nonsymmetric Toeplitz matrix stored by its first column and first row.

    Entry ``(i, j)`` is ``first_col[i - j]`` below the diagonal and
    ``first_row[j - i]`` above it. Products use a power-of-two circulant
    embedding whose FFT is cached at construction.
    """

    first_col: np.ndarray
    first_row: np.ndarray
    spectrum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        col = np.asarray(self.first_col, dtype=float)
        row = np.asarray(self.first_row, dtype=float)
        if col.shape != row.shape or col.ndim != 1 or len(col) == 0:
            raise ValueError("first_col and first_row must be nonempty 1D arrays of equal length")
        if col[0] != row[0]:
            raise ValueError("first_col[0] and first_row[0] must agree")
        n = len(col)
        length = _embedding_length(n)
        c = np.zeros(length)
        c[:n] = col
        c[length - n + 1:] = row[1:][::-1]
        spectrum = np.fft.fft(c)
        for name, value in (("first_col", col), ("first_row", row), ("spectrum", spectrum)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def size(self) -> int:
        return len(self.first_col)

    def dense(self) -> np.ndarray:
        n = self.size
        i, j = np.indices((n, n))
        d = i - j
        return np.where(d >= 0, self.first_col[np.clip(d, 0, n - 1)], self.first_row[np.clip(-d, 0, n - 1)])

    def apply(self, u, transpose: bool = False) -> np.ndarray:
        """``T u`` (or ``T^T u``) for a vector or for each column of a 2D array."""
        u = np.asarray(u, dtype=float)
        n = self.size
        if u.shape[0] != n:
            raise ValueError(f"dimension mismatch: operator size {n}, input {u.shape[0]}")
        length = len(self.spectrum)
        lam = np.conj(self.spectrum) if transpose else self.spectrum
        if u.ndim == 1:
            return np.fft.ifft(lam * np.fft.fft(u, n=length)).real[:n]
        return np.fft.ifft(lam[:, None] * np.fft.fft(u, n=length, axis=0), axis=0).real[:n]

    def transpose(self) -> "ToeplitzOperator":
        return ToeplitzOperator(self.first_row, self.first_col)


def toeplitz_apply(t: ToeplitzOperator, u, transpose: bool = False) -> np.ndarray:
    return t.apply(u, transpose=transpose)


def assemble_W(alpha: float, m: int) -> ToeplitzOperator:
    """The ``(m-1) x (m-1)`` WSGD matrix with ``w_1`` on the diagonal.

    ``w_0`` sits on the superdiagonal and ``w_k`` on the ``(k-1)``-th
    subdiagonal.
    """
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    w = wsgd_weights(alpha, max(m - 1, 1)).w
    n = m - 1
    col = w[1:n + 1].copy()
    row = np.zeros(n)
    row[0] = w[1]
    if n > 1:
        row[1] = w[0]
    return ToeplitzOperator(col, row)


def strang_circulant_eigenvalues(t: ToeplitzOperator) -> np.ndarray:
    """Eigenvalues of Strang's circulant approximation to ``t`` (same size)."""
    n = t.size
    c = np.zeros(n)
    half = n // 2
    c[:half + 1] = t.first_col[:half + 1]
    tail = t.first_row[1:n - half]
    if len(tail):
        c[n - len(tail):] = tail[::-1]
    return np.fft.fft(c)


@dataclass(frozen=True)
class FractionalOperator:
    """``A = D+ W + D- W^T`` without the ``tau / (2 h^alpha)`` scaling."""

    w: ToeplitzOperator
    dplus: np.ndarray
    dminus: np.ndarray
    alpha: float

    def __post_init__(self):
        for name in ("dplus", "dminus"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return self.w.size

    def apply(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return self.dplus * self.w.apply(u) + self.dminus * self.w.apply(u, transpose=True)
        return self.dplus[:, None] * self.w.apply(u) + self.dminus[:, None] * self.w.apply(u, transpose=True)

    def dense(self) -> np.ndarray:
        if self.size > DENSE_MAX_DIM:
            raise ValueError(f"dense materialisation capped at {DENSE_MAX_DIM}, size is {self.size}")
        wd = self.w.dense()
        return self.dplus[:, None] * wd + self.dminus[:, None] * wd.T

    def normalized_dense(self, by: str = "dplus") -> np.ndarray:
        """``D+^{-1} A`` (``by="dplus"``) or ``D-^{-1} A`` (``by="dminus"``)."""
        if by not in ("dplus", "dminus"):
            raise ValueError("by must be 'dplus' or 'dminus'")
        diag = self.dplus if by == "dplus" else self.dminus
        if np.any(diag <= 0):
            raise ValueError(f"{by} must be strictly positive to normalise")
        return self.dense() / diag[:, None]


def assemble_A(dplus, dminus, alpha: float, m: int) -> FractionalOperator:
    dplus = np.asarray(dplus, dtype=float)
    dminus = np.asarray(dminus, dtype=float)
    if dplus.shape != (m - 1,) or dminus.shape != (m - 1,):
        raise ValueError(f"coefficient samples must have length m-1 = {m - 1}")
    if np.any(dplus < 0) or np.any(dminus < 0):
        raise ValueError("diffusion coefficients must be nonnegative")
    return FractionalOperator(assemble_W(alpha, m), dplus, dminus, float(alpha))
