"""Optimal atom-centered basis sets for a 1D double-well diatomic model.

Minimizes density-matrix-projection and energy-error criteria over the
Stiefel manifold of coefficient matrices expressed in a truncated Hermite
function basis, against 3-point finite-difference references.
"""

__version__ = "0.1.0"

from .criteria import CriterionKind, eval_JA, eval_JE, grad_JA, grad_JE
from .evaluate import density_error, energy_curve, overlap_condition_sweep
from .galerkin import (
    OvercompletenessError,
    expand,
    hbs_coefficients,
    inv_sqrt_spd,
    lcao_density,
    reduced_ground_pair,
    reduced_overlap,
)
from .grid import Grid, build_grid, fd_hamiltonian, h1_metric, potential
from .hermite import assemble_dimer, hermite_columns, hermite_functions
from .reference import (
    Measure,
    NumericalFailure,
    build_offline,
    default_measure,
    solve_ground_pair,
    uniform_measure,
)
from .stiefel import (
    OptimReport,
    OptimSettings,
    minimize,
    random_stiefel,
    retract,
    tangent_project,
)

__all__ = [
    "CriterionKind",
    "Grid",
    "Measure",
    "NumericalFailure",
    "OptimReport",
    "OptimSettings",
    "OvercompletenessError",
    "assemble_dimer",
    "build_grid",
    "build_offline",
    "default_measure",
    "density_error",
    "energy_curve",
    "eval_JA",
    "eval_JE",
    "expand",
    "fd_hamiltonian",
    "grad_JA",
    "grad_JE",
    "h1_metric",
    "hbs_coefficients",
    "hermite_columns",
    "hermite_functions",
    "inv_sqrt_spd",
    "lcao_density",
    "minimize",
    "overlap_condition_sweep",
    "potential",
    "random_stiefel",
    "reduced_ground_pair",
    "reduced_overlap",
    "retract",
    "solve_ground_pair",
    "tangent_project",
    "uniform_measure",
]
