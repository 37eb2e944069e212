"""Locate and certify the maximal fold of -Du = lam*u^q + u^gamma with Dirichlet data.

Three mutually cross-checking routes: saddle-point search on the scaled
two-field quotient, bordered Newton on the augmented fold system, and
pseudo-arclength branch continuation, plus an independent 1D time-map oracle.
"""

from .errors import (
    BlowUpError,
    ConeError,
    ConvergenceError,
    DisconnectedDomainError,
    GridMismatchError,
    IndefiniteOperatorError,
    PositivityError,
)
from .mesh import (
    Grid,
    ScalarField,
    build_interval,
    build_masked_2d,
    inner,
    min_normal_derivative,
    parse_bitmap,
)
from .laplace import (
    DiscreteOperator,
    apply_laplacian,
    laplacian_operator,
    linearization,
    principal_eigenpair,
    smallest_eigenpair,
    solve,
)
from .quotient import (
    Pairings,
    ProblemParams,
    QuotientEval,
    QuotientWorkspace,
    grad_lambda_u,
    grad_lambda_v,
    grad_rayleigh_u,
    grad_rayleigh_v,
    lambda_scaled,
    lambda_tilde,
    rayleigh,
    residual,
    t_opt,
)
from .oracle import TimeMapTable, lambda_star_1d, lambda_star_disk, time_map

__version__ = "0.1.0"
