"""Second-order WSGD finite differences for space-fractional diffusion with variable coefficients."""

from .coeffs import WsgdWeights, grunwald_weights, verify_weight_properties, wsgd_weights
from .conditions import (
    CoefficientProfile,
    ConditionReport,
    Shape,
    check_condition_ratio,
    check_condition_sum,
    check_problem,
    eigenvalue_check,
)
from .harness import ConvergenceTable, emit_table, error_E2, load_table_csv, run_convergence
from .operators import FractionalOperator, ToeplitzOperator, assemble_A, assemble_W
from .problems import ProblemSpec, ProblemSpec2D, builtin_problems, get_problem, load_problem_config
from .solver1d import ConditionViolation, LinearSolveError, SolveOptions, SolveResult, solve_1d
from .solver2d import solve_2d_adi, solve_2d_cn_dense
from .spectral import generating_function, sigma_alpha, symmetric_part_max_eigenvalue

__version__ = "0.1.0"
