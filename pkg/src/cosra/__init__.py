"""Certified bounds on the competitive spectral radius of matrix games.

Two players alternately pick nonnegative matrices from finite sets; one
wants to maximize and the other to minimize the growth rate of the
resulting infinite product.  This package computes the value of that
game with certified two-sided error bounds, by discretizing a nonlinear
eigenproblem on a cross-section of the positive orthant and running
damped relative value iteration.
"""

from . import continuity, metrics, strategies
from .cone import InvariantCone, build_invariant_cone, cone_contains, in_cone_mask
from .errors import (
    CosraError,
    DegenerateImage,
    DepthOverflow,
    DifferentParts,
    InvalidParam,
    IterationCap,
    NoFiniteDistance,
    NotLipschitz,
    NotPrimitive,
    ResolutionTooCoarse,
)
from .estimator import CompetitiveSpectralRadius
from .game import (
    GameInstance,
    ValidationReport,
    build_leslie,
    game_from_dict,
    game_from_leslie,
    game_from_matrices,
    game_from_pairs,
    leslie_benchmark,
    load_game,
    positivity_depth,
    validate_game,
)
from .grid import Grid, certify_covering, generate_grid, grid_point_count, resolution_for_points
from .metrics import (
    MatrixSet,
    SupportPattern,
    funk_mat,
    funk_vec,
    hausdorff_thompson,
    hilbert_vec,
    thompson_mat,
    thompson_vec,
)
from .shapley import (
    ImageTableau,
    ValueFunction,
    bounds_M,
    build_tableau,
    eval_F_hat,
    interp_minus,
    interp_plus,
    step_gauge_image,
)
from .solver import (
    CertResult,
    SolveResult,
    certify_subeigenvector,
    rvi_km_solve,
    value_iteration_oracle,
    write_eigenfunction_csv,
    write_result_json,
)
from .strategies import Trajectory, check_projective_fixed_point, optimal_actions, simulate

__version__ = "0.1.0"
