"""Solvers for the backward time-tempered fractional Feynman-Kac equation.

Finite-difference and P1 finite-element schemes for the Laplace-transformed
density ``G(x0, p, t)``, the discrete tempered substantial derivative they
share, manufactured test problems, discrete norms, convergence studies and
Euler-summation Laplace inversion back to the density in ``A``.
"""
__version__ = "0.1.0"

from .coeffs import (CoefficientTable, d0_weight, d_coeffs, grunwald, q_partial_sums,
                     tempered_grunwald)
from .core import (ModelParams, SolutionHistory, SpaceGrid, TimeGrid, build_space_grid,
                   build_time_grid, validate_model)
from .errors import *  # noqa: F401,F403
from .fdm import TridiagonalOperator, assemble_fdm_system, march_fdm, tridiag_solve
from .fem import (FemMatrices, FemSolution, assemble_fem, fem_load, march_fem,
                  weighted_mass_apply)
from .history import (HistoryConvolver, HistoryWeights, general_ic_correction,
                      substantial_history_sum)
from .laplace import InversionConfig, euler_invert, partial_sum, solver_evaluator
from .manufactured import (ManufacturedProblem, example1, example2, example3, example3_pdf,
                           lift_boundary)
from .norms import (NormReport, fem_h1_error, fem_h1_seminorm, level_norms,
                    refinement_error, spacetime_norms)
from .quadrature import QuadratureRule, caputo_of, gauss_jacobi, gauss_legendre, rl_integral
from .study import ConvergenceReport, StudyConfig, emit_report, ladder_from_rule, run_study
