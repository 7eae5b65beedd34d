"""Condition verdicts for every built-in problem, plus the behaviour of the
scheme on the examples that violate the condition."""

import math

from fracwsgd.conditions import check_problem, eigenvalue_check
from fracwsgd.harness import run_convergence
from fracwsgd.problems import RemarkMatrices, builtin_problems

CASES = [
    ("ex5.1", (1.03, 1.1, 1.5), None),
    ("ex5.2", (1.17, 1.2, 1.5), None),
    ("ex5.3", (None,), None),
    ("ex5.4", (1.005, 1.5), None),
    ("ex5.5", (1.005,), None),
    ("ex5.6", (1.07,), None),
    ("ex5.6", (1.07,), "concave"),
    ("ex5.7", (1.01,), None),
]

registry = builtin_problems()
print("| problem | order | shape override | condition | lhs | verdict | note |")
print("|---|---|---|---|---|---|---|")
for label, alphas, shape in CASES:
    for alpha in alphas:
        p = registry[label] if alpha is None else registry[label].with_alpha(alpha)
        for rep in check_problem(p, assert_shape=shape):
            verdict = "satisfied" if rep.satisfied else "not satisfied"
            print(f"| {label} | {rep.order:g} | {shape or '-'} | {rep.condition_id} | {rep.lhs_value:.4g} "
                  f"| {verdict} | {rep.notes or ''} |")

remark = registry["remark2.1"]
assert isinstance(remark, RemarkMatrices)
print("\n3x3 counterexample:")
print(eigenvalue_check(remark.dplus, remark.dminus, remark.alpha, remark.m).format_text())

print("\nBehaviour on the violating examples (tau = 1/1000):")
for label in ("ex5.4", "ex5.5", "ex5.7"):
    table = run_convergence(label, "spatial", [1 / 32, 1 / 64, 1 / 128], 1 / 1000)
    cells = ", ".join(
        f"h=1/{round(1 / r.step)}: E2={r.e2:.3e}" + (f" rate={r.rate:.2f}" if r.rate is not None else "")
        for r in table.rows
    )
    growth = "diverging" if any(not math.isfinite(e) or e > 1 for e in table.e2) else "bounded"
    print(f"{label} (alpha={table.metadata['alpha']}): {cells} [{growth}]")
