"""Measure sup |sum_{k<=n} w_k| * n**alpha, the constant behind the zero-sum tail bound."""

import numpy as np

from fracwsgd.coeffs import TAIL_CONSTANT, wsgd_weights

alphas = np.linspace(1.0005, 2.0, 400)
for n_max in (10**3, 10**6):
    best = (0.0, None, None)
    for a in alphas:
        w = wsgd_weights(a, n_max).w
        n = np.arange(len(w), dtype=float)
        scaled = np.abs(np.cumsum(w))[1:] * n[1:] ** a
        i = int(np.argmax(scaled))
        if scaled[i] > best[0]:
            best = (float(scaled[i]), float(a), i + 1)
    print(f"n <= {n_max:>7}: sup = {best[0]:.4f} at alpha = {best[1]:.4f}, n = {best[2]}")

w = wsgd_weights(1.5, 10**6).w
print(f"asymptotic value at n = 1e6, alpha = 1.5: {abs(w.sum()) * 1e6 ** 1.5:.4f}")
print(f"TAIL_CONSTANT in use: {TAIL_CONSTANT}")
