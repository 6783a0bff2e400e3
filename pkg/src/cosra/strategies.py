"""Greedy strategies and trajectory simulation from a converged value function.

Actions are read off the one-step lookahead: the minimizer picks the
action whose worst-case continuation value (gauge plus interpolated
value at the normalized successor) is smallest, the maximizer answers
with the largest continuation for that choice.  Ties resolve toward the
lowest action index.  The initial state is moved to the nearest grid
point (the value function is anchored there); after that the simulation
follows exact off-grid states, interpolating values where needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DifferentParts
from .game import GameInstance
from .grid import Grid
from .metrics import hilbert_vec
from .shapley import ImageTableau, ValueFunction, interp_plus, step_gauge_image

__all__ = ["Trajectory", "optimal_actions", "simulate", "check_projective_fixed_point", "action_string"]


@dataclass(frozen=True)
class Trajectory:
    """States, moves and accumulated payoff of one simulated play."""

    states: np.ndarray  # (steps + 1, d)
    actions: tuple  # ((a_index, b_index), ...)
    gauges: np.ndarray  # (steps,)
    cumulative: np.ndarray  # running sums of gauges
    cycle: tuple | None  # (start, period) of the periodic action tail
    limit_point: np.ndarray | None

    @property
    def mean_payoff(self) -> float:
        return float(self.cumulative[-1] / len(self.gauges))


def _action_values(v, x, game: GameInstance, tableau: ImageTableau) -> np.ndarray:
    vals = np.empty((game.n_min, game.n_max))
    for a in range(game.n_min):
        for b in range(game.n_max):
            gauge, image = step_gauge_image(x, game.pair(a, b), game.e_star)
            vals[a, b] = gauge + interp_plus(v, image, tableau)
    return vals


def optimal_actions(v, x, game: GameInstance, tableau: ImageTableau) -> tuple:
    """Greedy (minimizer, maximizer) action indices at state x."""
    vals = _action_values(v, x, game, tableau)
    a = int(vals.max(axis=1).argmin())  # argmin takes the first of tied rows
    b = int(vals[a].argmax())
    return a, b


def _detect_cycle(actions, states, state_tol: float = 1e-8):
    """Smallest period of the action tail, confirmed by state proximity."""
    n = len(actions)
    for q in range(1, n // 2 + 1):
        s = n - q  # walk the q-periodic tail back as far as it goes
        while s > 0 and actions[s - 1] == actions[s - 1 + q]:
            s -= 1
        if s + 2 * q > n:
            continue  # fewer than two full periods observed
        try:
            close = hilbert_vec(states[-1], states[-1 - q]) < state_tol
        except DifferentParts:
            close = False
        if close:
            return s, q
    return None


def simulate(
    v: ValueFunction,
    game: GameInstance,
    grid: Grid,
    tableau: ImageTableau,
    x0,
    steps: int,
) -> Trajectory:
    """Play both greedy strategies for a number of steps.

    A periodic action tail (with states closing up to 1e-8 in the
    Hilbert metric) is reported as (start, period), and the final state
    doubles as the limit point of the play.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    x = np.asarray(x0, dtype=float)
    x = x / float(x @ game.e_star)
    # anchor the start on the grid; first occurrence wins ties
    start_idx = int(np.argmin(((grid.points - x[None, :]) ** 2).sum(axis=1)))
    x = grid.points[start_idx].copy()
    states = [x]
    actions = []
    gauges = []
    for _ in range(steps):
        a, b = optimal_actions(v, x, game, tableau)
        gauge, x = step_gauge_image(x, game.pair(a, b), game.e_star)
        actions.append((a, b))
        gauges.append(gauge)
        states.append(x)
    cycle = _detect_cycle(actions, states)
    return Trajectory(
        states=np.asarray(states),
        actions=tuple(actions),
        gauges=np.asarray(gauges),
        cumulative=np.cumsum(gauges),
        cycle=cycle,
        limit_point=states[-1].copy() if cycle is not None else None,
    )


def check_projective_fixed_point(x, M, e_star, tol: float = 1e-3) -> bool:
    """True iff x is projectively fixed by M within tol (Hilbert metric)."""
    _, image = step_gauge_image(np.asarray(x, dtype=float), M, e_star)
    try:
        return hilbert_vec(x, image) <= tol
    except DifferentParts:
        return False


def action_string(game: GameInstance, actions) -> str:
    """Human-readable move string, e.g. 'α3β1α2β1...' for the population game."""
    return "".join(game.a_labels[a] + game.b_labels[b] for a, b in actions)
