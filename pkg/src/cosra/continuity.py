"""Lipschitz dependence of the value on the matrix sets, tested by experiment.

The value moves by at most the Hausdorff-Thompson distance between the
pair-matrix families (plus solver slack), and scaling one side by c
shifts it by exactly log c.  Perturbations are multiplicative on the
positive entries so the support pattern, and with it the part of the
cone, never changes; additive noise would break the comparability
hypothesis the bound rests on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone import build_invariant_cone
from .game import GameInstance, game_from_pairs
from .grid import generate_grid
from .metrics import MatrixSet, hausdorff_thompson
from .shapley import build_tableau
from .solver import rvi_km_solve

__all__ = [
    "perturb_set",
    "perturb_game",
    "scale_pairs",
    "lipschitz_experiment",
    "LipschitzReport",
]


def perturb_set(S, epsilon: float, seed=None) -> np.ndarray:
    """Multiply every positive entry by exp(u), u uniform on [-epsilon, epsilon].

    Preserves the support pattern and keeps the Hausdorff-Thompson
    distance to the original set at most epsilon.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    mats = S.matrices if isinstance(S, MatrixSet) else np.asarray(S, dtype=float)
    rng = np.random.default_rng(seed)
    u = rng.uniform(-epsilon, epsilon, size=mats.shape)
    out = mats * np.exp(u)
    out[mats == 0] = 0.0
    return out


def perturb_game(game: GameInstance, epsilon: float, seed=None) -> tuple:
    """Perturb the per-pair family; returns (game', Hausdorff-Thompson distance)."""
    na, nb, d, _ = game.pair_matrices.shape
    flat = game.pairs_flat
    new_flat = perturb_set(flat, epsilon, seed=seed)
    dist = hausdorff_thompson(flat, new_flat)
    new_game = game_from_pairs(
        new_flat.reshape(na, nb, d, d),
        e_star=game.e_star,
        a_labels=game.a_labels,
        b_labels=game.b_labels,
    )
    return new_game, dist


def scale_pairs(game: GameInstance, c: float) -> GameInstance:
    """Scale every pair matrix by c > 0; the value shifts by exactly log c."""
    if c <= 0:
        raise ValueError("scale must be positive")
    return game_from_pairs(
        c * game.pair_matrices,
        e_star=game.e_star,
        a_labels=game.a_labels,
        b_labels=game.b_labels,
    )


@dataclass(frozen=True)
class LipschitzReport:
    """Per-trial distances and value shifts of the perturbation experiment."""

    epsilon: float
    stop: float
    resolution: int
    lambda_base: float
    distances: tuple
    lambda_shifts: tuple
    slacks: tuple  # allowed bound per trial: distance + 5 stop
    max_ratio: float  # largest |shift| / distance over trials with distance > 0
    all_within_bound: bool

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "stop": self.stop,
            "resolution": self.resolution,
            "lambda_base": self.lambda_base,
            "distances": list(self.distances),
            "lambda_shifts": list(self.lambda_shifts),
            "slacks": list(self.slacks),
            "max_ratio": self.max_ratio,
            "all_within_bound": self.all_within_bound,
        }


def _solve_on_fresh_grid(game: GameInstance, m: int, stop: float):
    cone = build_invariant_cone(game)
    grid = generate_grid(game, cone, m)
    tab = build_tableau(game, grid)
    return rvi_km_solve(game, grid, tab, stop=stop)


def lipschitz_experiment(
    game: GameInstance,
    epsilon: float,
    trials: int,
    m: int = 30,
    stop: float = 0.01,
    seed: int = 0,
) -> LipschitzReport:
    """Solve perturbed copies of the game and compare value shifts to distances.

    Every trial must satisfy |lambda - lambda'| <= distance + 5 stop
    (two certified residual brackets plus the scale of one grid step).
    """
    base = _solve_on_fresh_grid(game, m, stop)
    dists, shifts, slacks = [], [], []
    for t in range(trials):
        g2, dist = perturb_game(game, epsilon, seed=seed + t)
        res2 = _solve_on_fresh_grid(g2, m, stop)
        dists.append(float(dist))
        shifts.append(float(res2.lambda_ - base.lambda_))
        slacks.append(float(dist + 5.0 * stop))
    ratios = [abs(s) / d for s, d in zip(shifts, dists) if d > 0]
    return LipschitzReport(
        epsilon=float(epsilon),
        stop=float(stop),
        resolution=m,
        lambda_base=base.lambda_,
        distances=tuple(dists),
        lambda_shifts=tuple(shifts),
        slacks=tuple(slacks),
        max_ratio=max(ratios) if ratios else 0.0,
        all_within_bound=all(abs(s) <= sl for s, sl in zip(shifts, slacks)),
    )
