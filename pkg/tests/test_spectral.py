import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fracwsgd.coeffs import wsgd_weights
from fracwsgd.operators import assemble_A, assemble_W
from fracwsgd.spectral import (
    ConvergenceError,
    eigenvalues_small,
    generating_function,
    generating_function_profile,
    jacobi_eigenvalues,
    quadratic_form_integral,
    rho_alpha,
    sigma_alpha,
    sigma_alpha_numeric,
    symmetric_part_max_eigenvalue,
    truncated_series,
)

ALPHAS = [1.05 + 0.05 * i for i in range(19)]
finite = dict(allow_nan=False, allow_infinity=False)


def test_generating_function_vanishes_at_zero():
    assert generating_function(1.5, 0.0) == 0


def test_generating_function_at_pi():
    expected = (-0.75 + 0.25) * 2**1.5
    assert generating_function(1.5, np.pi) == pytest.approx(expected, abs=1e-14)
    series = truncated_series(1.5, np.pi, 100_000)
    assert abs(series - expected) < 1e-6


def test_closed_form_matches_series_within_tail():
    x = np.linspace(-np.pi, np.pi, 41)
    for alpha in (1.1, 1.5, 1.9):
        n = 4000
        # w_k >= 0 for k > 3 and the full series sums to zero, so the exact tail
        # of absolute values is minus the partial sum
        tail = -wsgd_weights(alpha, n).w.sum()
        err = np.abs(generating_function(alpha, x) - truncated_series(alpha, x, n))
        assert np.all(err <= tail + 1e-13)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_real_part_dominates_modulus(alpha):
    x = np.linspace(-np.pi, np.pi, 1001)
    g = generating_function(alpha, x)
    assert np.all(-g.real >= 0)
    assert np.all(-g.real - sigma_alpha(alpha) * np.abs(g) >= -1e-12)


@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
def test_imaginary_to_real_ratio_decreases(alpha):
    x = np.linspace(1e-4, np.pi, 4000)
    g = generating_function(alpha, x)
    ratio = g.imag / g.real
    assert np.all(np.diff(ratio) <= 1e-12)


def test_sigma_values():
    assert sigma_alpha(1.5) == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert sigma_alpha(2 - 1e-9) == pytest.approx(1.0, abs=1e-12)
    assert sigma_alpha(1.03) == pytest.approx(abs(math.cos(0.515 * math.pi)), rel=1e-15)
    assert sigma_alpha(1.03) == pytest.approx(0.0471065, abs=1e-7)
    assert sigma_alpha_numeric(1.03) == pytest.approx(sigma_alpha(1.03), abs=1e-4)


@pytest.mark.parametrize("alpha", [0.9, 1.0, 2.0, 2.1])
def test_sigma_domain(alpha):
    with pytest.raises(ValueError):
        sigma_alpha(alpha)


def test_sigma_numeric_against_closed_form():
    assert sigma_alpha_numeric(1.5, 4096) == pytest.approx(0.70710, abs=1e-4)
    assert sigma_alpha_numeric(1.2, 4096) == pytest.approx(abs(math.cos(0.6 * math.pi)), abs=1e-4)
    assert sigma_alpha_numeric(1.9, 4096) >= sigma_alpha(1.9) - 1e-4
    with pytest.raises(ValueError):
        sigma_alpha_numeric(1.5, 32)


def test_profile_relations():
    prof = generating_function_profile(1.3, 257)
    assert prof.sigma == pytest.approx(1 / math.sqrt(1 + prof.rho**2))
    assert prof.rho == pytest.approx(rho_alpha(1.3))
    rows = prof.to_rows()
    assert len(rows) == 257 and len(rows[0]) == 4
    assert generating_function_profile(1.3).to_rows() == []


def _dense_form(u, v, alpha):
    return u @ assemble_W(alpha, len(u) + 1).dense() @ v


def test_quadrature_unit_vectors():
    alpha = 1.4
    w = wsgd_weights(alpha, 3).w
    e = np.eye(3)
    assert quadratic_form_integral(e[0], e[0], alpha) == pytest.approx(w[1], abs=1e-12)
    assert quadratic_form_integral(e[0], e[1], alpha) == pytest.approx(w[0], abs=1e-12)


def test_quadrature_rejects_mismatch_and_bad_grid():
    with pytest.raises(ValueError):
        quadratic_form_integral(np.ones(3), np.ones(4), 1.5)
    with pytest.raises(ValueError):
        quadratic_form_integral(np.ones(16), np.ones(16), 1.5, n_quad=100)


def test_quadrature_without_extrapolation_is_algebraic():
    rng = np.random.default_rng(3)
    u = rng.standard_normal(15)
    exact = _dense_form(u, u, 1.5)
    errs = [abs(quadratic_form_integral(u, u, 1.5, n, extrapolate=False) - exact) for n in (256, 512)]
    assert errs[0] / errs[1] == pytest.approx(2**2.5, rel=0.1)


@settings(max_examples=120)
@given(
    alpha=st.floats(1.01, 1.99),
    m=st.integers(2, 128),
    data=st.data(),
)
def test_quadrature_matches_dense_form(alpha, m, data):
    vec = arrays(np.float64, m - 1, elements=st.floats(-1, 1, **finite))
    u, v = data.draw(vec), data.draw(vec)
    exact = _dense_form(u, v, alpha)
    approx = quadratic_form_integral(u, v, alpha)
    scale = max(1.0, np.abs(u).sum() * np.abs(v).sum())
    assert abs(approx - exact) <= 1e-10 * scale


def test_symmetric_max_eigenvalue_small_cases():
    assert symmetric_part_max_eigenvalue(np.eye(3)) == pytest.approx(1.0)
    assert symmetric_part_max_eigenvalue(np.array([[0.0, 1.0], [-1.0, 0.0]])) == pytest.approx(0.0, abs=1e-15)


def test_symmetric_part_definite_for_ex51():
    x = np.arange(1, 64) / 64
    a = assemble_A((x + 2) ** 2, 5 * (x + 2) ** 3, 1.5, 64).dense()
    assert symmetric_part_max_eigenvalue(a) <= 1e-10


def test_jacobi_matches_numpy(rng):
    s = rng.standard_normal((40, 40))
    s = s + s.T
    np.testing.assert_allclose(np.sort(jacobi_eigenvalues(s)), np.linalg.eigvalsh(s), atol=1e-11)


def test_symmetric_cap():
    with pytest.raises(ValueError):
        symmetric_part_max_eigenvalue(np.zeros((2049, 2049)))


def test_qr_diagonal_and_rotation():
    lam = eigenvalues_small(np.diag([3.0, 0.5, math.sqrt(3)]))
    np.testing.assert_allclose(np.sort(lam.real), [0.5, math.sqrt(3), 3.0], atol=1e-12)
    theta = 0.7
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    lam = eigenvalues_small(rot)
    expected = np.array([np.exp(1j * theta), np.exp(-1j * theta)])
    assert np.allclose(np.sort_complex(lam), np.sort_complex(expected), atol=1e-12)


def test_qr_remark_matrix():
    a = assemble_A([3.0, 0.5, math.sqrt(3)], [1.0, 1.0, math.sqrt(3)], 1.1, 4).dense()
    real = np.sort(eigenvalues_small(a).real)
    np.testing.assert_allclose(real, [-1.0706, -0.499, 0.1801], atol=5e-4)


def test_qr_eigenpairs_have_small_residual(rng):
    a = rng.standard_normal((30, 30))
    lam, vecs = eigenvalues_small(a, vectors=True)
    ref = np.linalg.eigvals(a)
    assert all(np.min(np.abs(ref - z)) < 1e-10 for z in lam)
    assert all(np.min(np.abs(lam - z)) < 1e-10 for z in ref)
    for j in range(30):
        assert np.linalg.norm(a @ vecs[:, j] - lam[j] * vecs[:, j]) <= 1e-8 * np.linalg.norm(a)


def test_qr_reports_non_convergence(rng):
    with pytest.raises(ConvergenceError):
        eigenvalues_small(rng.standard_normal((20, 20)), max_iter=2)


def test_qr_cap():
    with pytest.raises(ValueError):
        eigenvalues_small(np.zeros((513, 513)))
