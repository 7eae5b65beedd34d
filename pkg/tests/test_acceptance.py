"""Acceptance criteria, each checked at its stated tolerance.

Every test records a PASS/FAIL line with per-cell detail; the lines are
printed in the terminal summary (see conftest.py).
"""

import math
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from fracwsgd.coeffs import verify_weight_properties, wsgd_weights
from fracwsgd.conditions import (
    CoefficientProfile,
    check_condition_ratio,
    check_problem,
    eigenvalue_check,
    normalized_operator_dense,
)
from fracwsgd.harness import combined_markdown, run_convergence
from fracwsgd.operators import assemble_A, assemble_W
from fracwsgd.problems import get_problem
from fracwsgd.solver1d import SolveOptions, solve_1d
from fracwsgd.solver2d import make_grid, solve_2d_adi, solve_2d_cn_dense
from fracwsgd.spectral import quadratic_form_integral, sigma_alpha, symmetric_part_max_eigenvalue

GOLDEN = Path(__file__).resolve().parents[1] / "docs" / "expected" / "table1.md"
LADDER = [1 / 32, 1 / 64, 1 / 128, 1 / 256]

TABLE1 = {
    1.03: ([2.5354e-03, 6.2839e-04, 1.5658e-04, 3.8931e-05], [2.0125, 2.0047, 2.0079]),
    1.1: ([2.5622e-03, 6.3474e-04, 1.5815e-04, 3.9321e-05], [2.0132, 2.0049, 2.0079]),
    1.5: ([2.3497e-03, 5.8328e-04, 1.4542e-04, 3.6155e-05], [2.0102, 2.0039, 2.0080]),
}
TABLE2 = ([4.3687e-03, 1.0873e-03, 2.6764e-04, 6.3069e-05], [2.0065, 2.0224, 2.0853])
TABLE21 = {
    1.17: ([2.2324e-03, 5.5622e-04, 1.3883e-04, 3.4547e-05], [2.0048, 2.0032, 2.0067]),
    1.2: ([2.2215e-03, 5.5364e-04, 1.3821e-04, 3.4397e-05], [2.0045, 2.0021, 2.0065]),
    1.5: ([2.0459e-03, 5.1092e-04, 1.2770e-04, 3.1803e-05], [2.0015, 2.0003, 2.0056]),
}
TABLE3 = {
    (1.22, 1.31): ([2.4858e-03, 6.2222e-04, 1.5559e-04], [1.9982, 1.9997]),
    (1.3, 1.5): ([2.5374e-03, 6.3691e-04, 1.5941e-04], [1.9942, 1.9983]),
}


def record(name, passed, detail):
    ACCEPTANCE_RESULTS[name] = (bool(passed), detail)
    assert passed, detail


def compare(label, got, want, tol, relative):
    lines, ok = [], True
    for i, (g, w) in enumerate(zip(got, want)):
        dev = abs(g - w) / abs(w) if relative else abs(g - w)
        good = math.isfinite(g) and dev <= tol
        ok &= good
        lines.append(f"{label}[{i}] got {g:.5g} want {w:.5g} ({'ok' if good else 'MISS'})")
    return ok, "; ".join(lines)


def table_check(name, tables, expected, key_fmt, e2_tol=0.01, rate_tol=0.02):
    e2_ok, rate_ok, e2_detail, rate_detail = True, True, [], []
    for key, (e2_want, rate_want) in expected.items():
        table = tables[key]
        ok, d = compare(key_fmt(key), table.e2, e2_want, e2_tol, relative=True)
        e2_ok &= ok
        e2_detail.append(d)
        ok, d = compare(key_fmt(key), table.rates[1:], rate_want, rate_tol, relative=False)
        rate_ok &= ok
        rate_detail.append(d)
    return (e2_ok, " | ".join(e2_detail)), (rate_ok, " | ".join(rate_detail))


# --- shared runs ---


@pytest.fixture(scope="module")
def table1():
    return {a: run_convergence("ex5.1", "spatial", LADDER, 1 / 1000, alpha=a) for a in TABLE1}


@pytest.fixture(scope="module")
def table21():
    return {a: run_convergence("ex5.2", "spatial", LADDER, 1 / 1000, alpha=a) for a in TABLE21}


@pytest.fixture(scope="module")
def table3():
    # h is the true mesh width on [0, 2]: h = 1/32 means 64 intervals per side
    return {
        ab: run_convergence("ex5.3", "spatial", LADDER[:3], 1 / 1000, alpha=ab[0], beta=ab[1])
        for ab in TABLE3
    }


# --- 1: Table 1 ---


def test_c1_table1_errors(table1):
    (ok, detail), _ = table_check("1", table1, TABLE1, lambda a: f"alpha={a}")
    record("C1a Table 1 E2 within 1%", ok, detail)


def test_c1_table1_rates(table1):
    _, (ok, detail) = table_check("1", table1, TABLE1, lambda a: f"alpha={a}")
    record("C1b Table 1 Rate1 within 0.02", ok, detail)


def test_c1_golden_markdown(table1):
    text = combined_markdown([table1[a] for a in TABLE1])
    ok = GOLDEN.exists() and GOLDEN.read_text() == text
    record("C1c Table 1 markdown matches docs/expected/table1.md", ok, str(GOLDEN))


# --- 2: Table 2 ---


def test_c2_table2():
    table = run_convergence("ex5.1", "temporal", [1 / 10, 1 / 20, 1 / 40, 1 / 80], 1 / 500, alpha=1.5)
    ok, detail = compare("tau", table.e2, TABLE2[0], 0.01, relative=True)
    record("C2a Table 2 E2 within 1%", ok, detail)


def test_c2_table2_rates():
    table = run_convergence("ex5.1", "temporal", [1 / 10, 1 / 20, 1 / 40, 1 / 80], 1 / 500, alpha=1.5)
    ok, detail = compare("tau", table.rates[1:], TABLE2[1], 0.03, relative=False)
    record("C2b Table 2 Rate2 within 0.03", ok, detail)


# --- 3: second 1D table (ex5.2) ---


def test_c3_ex52_errors(table21):
    (ok, detail), _ = table_check("3", table21, TABLE21, lambda a: f"alpha={a}")
    record("C3a ex5.2 table E2 within 1%", ok, detail)


def test_c3_ex52_rates(table21):
    _, (ok, detail) = table_check("3", table21, TABLE21, lambda a: f"alpha={a}")
    record("C3b ex5.2 table Rate1 within 0.02", ok, detail)


# --- 4: Table 3 (2D ADI) ---


def test_c4_table3_errors(table3):
    (ok, detail), _ = table_check("4", table3, TABLE3, lambda ab: f"(a,b)={ab}")
    record("C4a Table 3 E2 within 1%", ok, detail)


def test_c4_table3_rates(table3):
    _, (ok, detail) = table_check("4", table3, TABLE3, lambda ab: f"(a,b)={ab}")
    record("C4b Table 3 Rate1 within 0.02", ok, detail)


# --- 5: the 3x3 counterexample ---


def test_c5_remark_eigenvalues():
    r = get_problem("remark2.1")
    report = eigenvalue_check(r.dplus, r.dminus, r.alpha, r.m)
    got = sorted(report.eigenvalues.real, reverse=True)
    want = sorted(r.expected_real_parts, reverse=True)
    ok, detail = compare("Re(lambda)", got, want, 5e-4, relative=False)
    flagged = [round(report.eigenvalues[i].real, 4) for i in report.unstable]
    ok &= flagged == [0.1801]
    record("C5 3x3 eigenvalue real parts within 5e-4, positive one flagged", ok, f"{detail}; flagged {flagged}")


# --- 6: condition verdicts ---


def test_c6_condition_verdicts():
    cases = [(f"ex5.1 a={a}", "ex5.1", a, None, True) for a in (1.03, 1.1, 1.5)]
    cases += [(f"ex5.2 a={a}", "ex5.2", a, None, True) for a in (1.17, 1.2, 1.5)]
    cases += [("ex5.6 a=1.07 asserted concave", "ex5.6", 1.07, "concave", True)]
    cases += [(f"ex5.4 a={a}", "ex5.4", a, None, False) for a in (1.005, 1.1, 1.5, 1.9)]
    cases += [("ex5.5 (neither)", "ex5.5", 1.005, None, False), ("ex5.7 a=1.01", "ex5.7", 1.01, None, False)]
    ok, lines = True, []
    for name, label, alpha, shape, expect in cases:
        p = get_problem(label).with_alpha(alpha)
        dp = CoefficientProfile.from_function(p.dplus, p.x_left, p.x_right)
        dm = CoefficientProfile.from_function(p.dminus, p.x_left, p.x_right)
        rep = check_condition_ratio(dp, dm, alpha, assert_shape=shape)
        good = rep.satisfied == expect
        if label == "ex5.5":
            good &= rep.shape == "neither"
        ok &= good
        lines.append(f"{name}: {'satisfied' if rep.satisfied else 'not satisfied'} ({'ok' if good else 'MISS'})")
    record("C6 condition verdicts", ok, "; ".join(lines))


# --- 7: ex5.6 substitute for the large-scale tables ---


def test_c7_ex56_rates():
    table = run_convergence("ex5.6", "spatial", LADDER, 1 / 1000, alpha=1.07)
    rates = table.rates[1:]
    ok = all(r is not None and 1.95 <= r <= 2.05 for r in rates)
    record("C7 ex5.6 a=1.07 Rate1 in [1.95, 2.05]", ok, "rates " + ", ".join(f"{r:.4f}" for r in rates))


# --- 8: property suites ---

CASES = 120


def test_c8a_weight_identities():
    rng = np.random.default_rng(81)
    failures = 0
    for _ in range(CASES):
        alpha = rng.uniform(1.0, 2.0) if rng.random() < 0.95 else 2.0
        alpha = max(alpha, 1.0 + 1e-9)
        n = int(rng.integers(2, 5000))
        checks = verify_weight_properties(wsgd_weights(alpha, n))
        w2 = wsgd_weights(alpha, 2).w[2]
        closed = alpha * (alpha**2 + alpha - 4) / 4
        failures += (not all(c.passed for c in checks)) or abs(w2 - closed) > 1e-14
    record("C8a weight identities", failures == 0, f"{CASES} cases, {failures} failures")


def test_c8b_quadrature_oracle():
    rng = np.random.default_rng(82)
    worst = 0.0
    for _ in range(CASES):
        alpha = rng.uniform(1.01, 1.99)
        m = int(rng.integers(2, 129))
        u, v = rng.uniform(-1, 1, m - 1), rng.uniform(-1, 1, m - 1)
        dense = u @ assemble_W(alpha, m).dense() @ v
        worst = max(worst, abs(quadratic_form_integral(u, v, alpha) - dense))
    record("C8b dense form vs quadrature <= 1e-10", worst <= 1e-10, f"{CASES} cases, worst {worst:.2e}")


def test_c8c_scaled_form_inequality():
    rng = np.random.default_rng(83)
    worst = -np.inf
    for _ in range(CASES):
        alpha = rng.uniform(1.01, 2.0)
        n = int(rng.integers(2, 65))
        slopes = np.sort(rng.normal(0, rng.uniform(0.1, 10), n - 1))
        d = np.concatenate([[0.0], np.cumsum(slopes)]) / n
        d = d - d.min() + rng.uniform(0, 1)
        wa = assemble_W(alpha, n + 1).dense()
        w = -wa - wa.T
        u = rng.standard_normal(n)
        lhs = (d * u) @ w @ (d * u)
        rhs = 2 * np.max(d**2) * (u @ w @ u)
        worst = max(worst, (lhs - rhs) / max(1.0, abs(rhs)))
    record("C8c u'DWDu <= 2 max d^2 u'Wu", worst <= 1e-12, f"{CASES} cases, max (lhs-rhs)/|rhs| {worst:.2e}")


def test_c8d_condition_implies_definiteness():
    rng = np.random.default_rng(84)
    satisfied, worst = 0, -np.inf
    while satisfied < CASES:
        alpha = rng.uniform(1.01, 1.99)
        m = int(rng.choice([16, 32, 64]))
        x = np.arange(1, m) / m
        bump = (x - rng.uniform(-0.5, 1.5)) ** 2
        bump /= bump.max()
        kappa0 = rng.uniform(0, 5)
        spread = rng.uniform(0, 1) * sigma_alpha(alpha) * (1 + kappa0) / math.sqrt(2)
        ratio = kappa0 + spread * (bump if rng.random() < 0.5 else 1 - bump)
        dplus = rng.uniform(0.1, 5.0, m - 1)
        dminus = ratio * dplus
        rep = check_condition_ratio(
            CoefficientProfile.from_samples(x, dplus), CoefficientProfile.from_samples(x, dminus), alpha
        )
        if not rep.satisfied:
            continue
        satisfied += 1
        a = normalized_operator_dense(dplus, dminus, alpha, rep.ratio_orientation)
        worst = max(worst, symmetric_part_max_eigenvalue(a) / np.linalg.norm(a))
    # the built-in problems at their satisfied orders
    for label, alphas in (("ex5.1", (1.03, 1.1, 1.5)), ("ex5.2", (1.17, 1.2, 1.5))):
        for alpha in alphas:
            p = get_problem(label).with_alpha(alpha)
            rep = check_problem(p)[0]
            for m in (16, 32, 64):
                x = np.arange(1, m) / m
                a = normalized_operator_dense(p.dplus(x), p.dminus(x), alpha, rep.ratio_orientation)
                worst = max(worst, symmetric_part_max_eigenvalue(a) / np.linalg.norm(a))
    record("C8d max eig H(A_alpha) <= 1e-8 ||A_alpha||_F", worst <= 1e-8,
           f"{CASES} random + 18 registry cases, worst ratio {worst:.2e}")


def test_c8e_energy_bound():
    rng = np.random.default_rng(85)
    violations = 0
    for _ in range(CASES):
        alpha = rng.choice([1.03, 1.1, 1.5]) if rng.random() < 0.5 else rng.uniform(1.03, 1.99)
        p = get_problem("ex5.1").with_alpha(float(alpha))
        if not check_problem(p)[0].satisfied:
            continue
        m = int(rng.integers(8, 65))
        n = int(rng.integers(5, 60))
        res = solve_1d(p, m, n, SolveOptions(energy_check=True))
        violations += res.diagnostics["energy_violations"]
    record("C8e weighted energy bound along ex5.1 runs", violations == 0, f"{CASES} runs, {violations} violations")


def test_c8f_fft_vs_dense():
    rng = np.random.default_rng(86)
    worst = 0.0
    for _ in range(CASES):
        alpha = rng.uniform(1.01, 2.0)
        size = int(rng.choice([7, 16, 63, 128, 511]))
        op = assemble_A(rng.uniform(0, 3, size), rng.uniform(0, 3, size), alpha, size + 1)
        u = rng.standard_normal(size)
        dense = op.dense() @ u
        worst = max(worst, np.linalg.norm(op.apply(u) - dense) / np.linalg.norm(dense))
        t = op.w
        worst = max(worst, np.linalg.norm(t.apply(u, transpose=True) - t.dense().T @ u) / np.linalg.norm(t.dense().T @ u))
    record("C8f FFT apply vs dense <= 1e-12", worst <= 1e-12, f"{CASES} cases, worst relative {worst:.2e}")


def test_c8g_adi_splitting_decay():
    p = get_problem("ex5.3").with_orders(1.3, 1.5)
    m = 32  # h = 1/16 on [0, 2]
    grid = make_grid(p, m, m)
    diffs = []
    steps = (10, 20, 40, 80)
    for n in steps:
        adi = solve_2d_adi(p, m, m, n).u_final
        cn = solve_2d_cn_dense(p, m, m, n)
        diffs.append(math.sqrt(grid.cell_area * np.sum((adi - cn) ** 2)))
    ratios = [a / b for a, b in zip(diffs, diffs[1:])]
    ok = all(3.3 <= r <= 4.7 for r in ratios)
    record("C8g ADI vs unsplit CN decays ~4x per tau halving", ok,
           "differences " + ", ".join(f"{d:.3e}" for d in diffs) + "; ratios " + ", ".join(f"{r:.3f}" for r in ratios))
