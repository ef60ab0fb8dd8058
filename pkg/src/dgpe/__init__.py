"""Pseudospectral toolkit for the dipolar Gross-Pitaevskii equation.

Simulates ``i u_t + (1/2) Lap u = lambda1 |u|^2 u + lambda2 (K * |u|^2) u``
on a periodic 3D box, computes ground states and the sharp interpolation
constant, integrates in time with Strang splitting, and classifies the
predicted dynamics (scattering, blow-up, grow-up, threshold behavior) from
conserved quantities.
"""

from .errors import DomainError, NonConvergenceError, NumericalAbortError
from .functionals import CouplingParams, FunctionalBundle, evaluate_bundle
from .grid import ComplexField, Grid, make_grid
from .groundstate import (
    GroundStateRecord,
    MinimizerOptions,
    compute_ground_state,
    minimize_weinstein,
    rescale_to_bound_state,
    thresholds,
)
from .propagator import PropagatorConfig, Trajectory, evolve, strang_step
from .classifier import (
    RegimeVerdict,
    TheoremReport,
    ThresholdSet,
    classify_regime,
)
from .datafactory import DataSpec, build_field, gaussian, quadratic_phase

__version__ = "0.1.0"

__all__ = [
    "CouplingParams",
    "FunctionalBundle",
    "ComplexField",
    "Grid",
    "make_grid",
    "evaluate_bundle",
    "GroundStateRecord",
    "MinimizerOptions",
    "compute_ground_state",
    "minimize_weinstein",
    "rescale_to_bound_state",
    "thresholds",
    "PropagatorConfig",
    "Trajectory",
    "evolve",
    "strang_step",
    "RegimeVerdict",
    "TheoremReport",
    "ThresholdSet",
    "classify_regime",
    "DataSpec",
    "build_field",
    "gaussian",
    "quadratic_phase",
    "DomainError",
    "NonConvergenceError",
    "NumericalAbortError",
    "__version__",
]
