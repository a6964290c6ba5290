"""Sharp lower bounds for the first nonzero eigenvalue of the weighted p-Laplacian.

The bound is the first Neumann eigenvalue ``mu_p(kappa, D)`` of a
one-dimensional model ODE, computed by Prüfer-phase shooting. The package
also carries the generalized trigonometric functions, a variational
(Rayleigh) oracle and the capped-cylinder constructions that show the
bound cannot be improved.
"""

from .eigensolver import (
    EigenResult,
    check_gradient_comparison,
    delta_bar,
    lambda0,
    model_for_range,
    mu_p,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    RevolutionSurface,
    SurfaceSpec,
    build_surface,
    bump,
    cylinder_interval,
    reduce_to_interval,
    ricci_f,
    sharpness_experiment,
    surface_gradient_comparison,
    verify_curvature,
)
from .ode_model import (
    ModelParams,
    ModelSolution,
    PruferTrajectory,
    integrate_prufer,
    prufer_rhs,
    scale_solution,
    solve_ivp_cap,
    solve_ivp_odd,
)
from .ptrig import arctan_p, cos_p, pi_p, sin_p, sincos_p, tan_p
from .rayleigh import (
    DiscreteEigenpair,
    WeightedInterval,
    minimize_rayleigh,
    project_constraint,
    rayleigh_quotient,
)

__version__ = "0.1.0"
