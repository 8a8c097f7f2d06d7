"""Symmetry-preserving difference schemes for ODEs, with baselines and a
benchmark harness."""

from .grid import (DegenerateStencil, GridPoint, Stencil, Trajectory,
                   FLAG_DIVERGED, FLAG_NEAR_POLE, FLAG_OK, FLAG_SOLVER_FAILED)
from .rootfind import (Divergence, NonConvergence, NumericalError, RootConfig,
                       SingularDerivative, SingularJacobian, fixed_point,
                       newton_1d, newton_2d)
from .problems import OdeProblem, example_problem
from .reference import (DenseSolution, FirstOrderSystem, OutOfRange,
                        SolverTolerances, StepUnderflow, UnsupportedOrder,
                        integrate_adaptive, integrate_fixed, startup_values,
                        to_first_order)
from .invariants import (DegenerateOrdinates, DomainError, JetPoint,
                         NonPositiveAbscissa, PoleOfChart, diff_invariants,
                         ex1_xi, ex2_J, ex2_xi, ex3_J, ex3_xi, ex4_J, ex4_xi,
                         ex5_J1, ex5_R)
from .groups import GroupElement, UndefinedAction, apply_group
from .schemes import (ChartPole, NegativeBase, NegativeRadicand, NoRealRoot,
                      NonMonotone, SchemeConfig, gamma_from_startups, mesh_ex3,
                      run_scheme, scheme_config, step_ex1, step_ex2,
                      step_ex3_y, step_ex4, step_ex5)
from .standard import (UniformStencil, p3_derivatives, run_standard,
                       standard_step_ex1, standard_step_third_order)
from .experiments import (ErrorReport, ExperimentSpec, InsufficientRows,
                          ReportRow, SingularityBundle, emit_outputs,
                          estimate_order, run_experiment, singularity_run)

__version__ = "0.1.0"
