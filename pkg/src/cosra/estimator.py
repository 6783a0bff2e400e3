"""Estimator-style front end so the solver composes with the sklearn ecosystem.

The whole pipeline (validation, invariant cone, grid, tableau, damped
iteration) hides behind a single `fit(game)`; hyperparameters are
regular constructor arguments, so `get_params`, `set_params`,
`sklearn.base.clone` and grid-search style sweeps over `resolution` or
`stop` all work as usual.  Fitted state follows the trailing-underscore
convention.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .cone import build_invariant_cone
from .errors import InvalidParam
from .game import GameInstance, game_from_dict, load_game, validate_game
from .grid import generate_grid
from .shapley import DEFAULT_CACHE_ENTRIES, build_tableau, interp_minus, interp_plus
from .solver import rvi_km_solve
from .strategies import optimal_actions, simulate

__all__ = ["CompetitiveSpectralRadius", "as_game_instance", "check_section_points"]


def as_game_instance(game) -> GameInstance:
    """Accept a GameInstance, a description dict, or a path to a JSON file."""
    if isinstance(game, GameInstance):
        return game
    if isinstance(game, dict):
        return game_from_dict(game)
    if isinstance(game, (str, bytes)) or hasattr(game, "__fspath__"):
        return load_game(game)
    raise InvalidParam(f"cannot interpret {type(game).__name__} as a game")


def check_section_points(X, e_star, *, tol: float = 1e-9) -> np.ndarray:
    """Validate an (n, d) batch of nonnegative points on the section <x, e*> = 1."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != len(e_star):
        raise InvalidParam(f"expected points of dimension {len(e_star)}")
    if not np.all(np.isfinite(X)) or np.any(X < 0):
        raise InvalidParam("points must be finite and nonnegative")
    mass = X @ np.asarray(e_star, dtype=float)
    if np.any(np.abs(mass - 1.0) > tol):
        raise InvalidParam("points must satisfy <x, e*> = 1")
    return X


class CompetitiveSpectralRadius(BaseEstimator):
    """Certified two-sided solver for the matrix multiplication game value.

    Parameters
    ----------
    resolution : int, default 80
        Lattice parameter m of the simplex grid.
    stop : float or None, default None
        Increment threshold of the damped iteration; None uses the
        grid's certified covering radius.
    tol : float, default 1e-9
        Slack for cone membership tests.
    max_generators : int, default 10**6
        Cap on the invariant-cone enumeration.
    cache_entries : int, default DEFAULT_CACHE_ENTRIES
        Full distance tableaus are cached below this size.

    Attributes (after fit)
    ----------------------
    value_ : float            additive eigenvalue estimate (log scale)
    growth_factor_ : float    exp(value_), the competitive spectral radius
    interval_ : (lo, hi)      certified bracket for the game value
    n_iter_ : int             damped iterations run
    value_function_ : ValueFunction
    game_, cone_, grid_, tableau_, result_ : pipeline objects
    """

    def __init__(
        self,
        resolution: int = 80,
        stop: float | None = None,
        tol: float = 1e-9,
        max_generators: int = 10**6,
        cache_entries: int = DEFAULT_CACHE_ENTRIES,
    ):
        self.resolution = resolution
        self.stop = stop
        self.tol = tol
        self.max_generators = max_generators
        self.cache_entries = cache_entries

    def fit(self, X, y=None):
        """Solve the game described by X (GameInstance, dict, or JSON path)."""
        game = as_game_instance(X)
        report = validate_game(game)
        report.raise_if_invalid()
        self.game_ = game
        self.report_ = report
        self.cone_ = build_invariant_cone(game, report, max_generators=self.max_generators)
        self.grid_ = generate_grid(game, self.cone_, self.resolution, tol=self.tol)
        self.tableau_ = build_tableau(game, self.grid_, cache_entries=self.cache_entries)
        self.result_ = rvi_km_solve(game, self.grid_, self.tableau_, stop=self.stop)
        self.value_ = self.result_.lambda_
        self.growth_factor_ = self.result_.growth_factor
        self.interval_ = self.result_.interval
        self.n_iter_ = self.result_.iterations
        self.value_function_ = self.result_.value
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise InvalidParam("estimator is not fitted; call fit(game) first")

    def predict(self, X) -> np.ndarray:
        """Greedy (minimizer, maximizer) action indices for each section point."""
        self._check_fitted()
        pts = check_section_points(X, self.game_.e_star, tol=self.tol)
        out = np.empty((len(pts), 2), dtype=np.int64)
        for k, x in enumerate(pts):
            out[k] = optimal_actions(self.value_function_, x, self.game_, self.tableau_)
        return out

    def interpolate(self, X, kind: str = "+") -> np.ndarray:
        """Lipschitz extension of the fitted value function at arbitrary points."""
        self._check_fitted()
        pts = check_section_points(X, self.game_.e_star, tol=self.tol)
        fn = interp_plus if kind == "+" else interp_minus
        return np.array([fn(self.value_function_, x, self.tableau_) for x in pts])

    def simulate(self, x0, steps: int = 60):
        """Greedy play from x0; see strategies.simulate."""
        self._check_fitted()
        return simulate(self.value_function_, self.game_, self.grid_, self.tableau_, x0, steps)
